#pragma once

#include <cstdint>
#include <functional>

#include "sc/amortized.hpp"
#include "sc/metrics.hpp"
#include "sc/objectives.hpp"

namespace sc {

// --- Adam (ascent) ----------------------------------------------------------

struct AdamState {
  Vec first_moment;
  Vec second_moment;
  std::int64_t step_count = 0;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  static AdamState init(int dim, double learning_rate);
};

// One bias-corrected ascent step (we maximize; params move along +grad).
// Mutates the state and returns the updated parameters.
Vec adam_step(AdamState& state, const Vec& params, const Vec& grad);

// --- L-BFGS -----------------------------------------------------------------

struct LbfgsOptions {
  int max_iters = 100;
  int memory = 10;          // history size m
  double tolerance = 1e-8;  // stop when ||grad|| < tolerance
  double armijo_c = 1e-4;
  double shrink = 0.5;
  int max_backtracks = 40;
};

struct LbfgsResult {
  Vec x;
  double value = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  bool line_search_failed = false;  // best-so-far returned after 40 backtracks
};

// Minimizes fg (which writes the gradient into its second argument) by the
// two-loop recursion with Armijo backtracking. Accepted values are monotone
// non-increasing; curvature pairs with s^T y <= 0 are skipped.
LbfgsResult lbfgs_minimize(const std::function<double(const Vec&, Vec&)>& fg,
                           const Vec& x0, const LbfgsOptions& options = {});

// --- Annealing schedules ----------------------------------------------------

enum class AnnealMode { None, Prior, Beta, Tempering };

struct AnnealingSchedule {
  AnnealMode mode = AnnealMode::None;
  double tempering_c = 1.0;  // used by Tempering only
};

// Per-epoch weights (epoch >= 1):
//   none:      (1, 1)
//   prior:     gamma = max(1, 2 (5 - epoch)), delta = 1
//   beta:      gamma = 1, delta = min(1, 1 / (7 - epoch)), 1 from epoch 7 on
//   tempering: (c, c)
AnnealingWeights schedule_weights(const AnnealingSchedule& schedule, int epoch);

// --- Training ---------------------------------------------------------------

enum class EStepOptimizer { Lbfgs, Adam };

struct TrainConfig {
  PosteriorVariant variant = PosteriorVariant::Diagonal;
  int rank = 5;               // LowRank only
  int batch_size = 512;
  int epochs = 10;
  int e_step_iters = 50;      // L-BFGS iterations (or Adam steps) per E-step
  double dict_lr = 0.05;      // Adam rate for the dictionary preimage
  double encoder_lr = 1e-3;   // Adam rate for the amortized encoder
  double e_step_adam_lr = 0.01;  // only with e_optimizer = Adam
  std::uint64_t seed = 1;
  AnnealingSchedule schedule;
  EStepOptimizer e_optimizer = EStepOptimizer::Lbfgs;
  int lbfgs_memory = 10;
  int hidden_width = 0;       // amortized trunk width; 0 means 4 * D

  void validate(int n_data) const;
};

struct TraceRow {
  int epoch = 0;
  double total_elbo = 0.0;
  double q_entropy_avg = 0.0;
  double prior_entropy = 0.0;
  double likelihood_entropy = 0.0;
  double sigma2_opt = 0.0;
  double gini_mean = 0.0;
  double gini_sd = 0.0;
  double gamma = 1.0;
  double delta = 1.0;
  double wallclock_seconds = 0.0;
};

struct TrainResult {
  std::vector<TraceRow> trace;
  DictionaryPreimage preimage;
  PosteriorSet posteriors;
  Vec lambda_opt;
  double sigma2_opt = 0.0;
};

using SnapshotHook = std::function<void(int epoch, const DictionaryPreimage&)>;

// EM-like training with persistent per-datapoint posteriors: per minibatch an
// E-step (joint optimization of the batch posteriors at fixed dictionary,
// batch-local lambda_opt/sigma2_opt) followed by one ascent step on the
// preimage. Per epoch the full-dataset unannealed objective goes to the
// trace; the last epoch's row is recorded after a final full E-step pass so
// the reported value is at re-optimized posteriors.
TrainResult em_train(const Dataset& data, const TrainConfig& config,
                     const DictionaryPreimage* init = nullptr,
                     const SnapshotHook& snapshot = {});

struct AmortizedResult {
  std::vector<TraceRow> trace;
  DictionaryPreimage preimage;
  EncoderParams encoder;
  PosteriorSet posteriors;  // encodings of the full dataset at the end
  Vec lambda_opt;
  double sigma2_opt = 0.0;
};

// Joint stochastic ascent on encoder parameters and preimage; the objective
// gradient is chained through the encoder's backward pass and lambda_opt /
// sigma2_opt are batch-local.
AmortizedResult amortized_train(const Dataset& data, const TrainConfig& config,
                                const SnapshotHook& snapshot = {});

struct EvalResult {
  ElboBreakdown breakdown;
  GiniReport gini;
  PosteriorSet posteriors;
  Mat w;  // the normalized dictionary that was evaluated
};

// Normalizes the columns of w, freezes them, and optimizes only the
// variational parameters (E-steps to convergence); reports the full-dataset
// breakdown and Gini statistics.
EvalResult eval_external_dictionary(const Mat& w, const Dataset& data,
                                    PosteriorVariant variant, int rank = 5,
                                    int max_rounds = 40, int iters_per_round = 80);

}  // namespace sc
