#pragma once

#include "sc/model.hpp"
#include "sc/special_math.hpp"

namespace sc {

// Weights of the annealed objective: total = q_entropy_avg
// - gamma * prior_entropy - delta * likelihood_entropy. (1, 1) is the plain
// objective; beta-annealing maps to (1, 1/beta) and energy tempering to (c, c).
struct AnnealingWeights {
  double gamma = 1.0;
  double delta = 1.0;
};

struct ElboBreakdown {
  double q_entropy_avg = 0.0;       // (1/N) sum_n H[q^(n)], nats
  double prior_entropy = 0.0;       // H[p(z)] at lambda_opt, nats
  double likelihood_entropy = 0.0;  // H[p(x|z)] at sigma2_opt, nats
  Vec lambda_opt;                   // H, per-latent optimal Laplace scales
  double sigma2_opt = 0.0;          // optimal observation variance
  double total = 0.0;               // q - gamma*prior - delta*likelihood
};

// Backend used for erf (and through it the M-function) inside objective and
// gradient evaluation. The closed-form Buermann variant exists for
// benchmarking; everything defaults to the exact erf.
void set_objective_erf_backend(ErfBackend backend);
ErfBackend objective_erf_backend();

// lambda_opt_h = (1/N) sum_n softened_magnitude(nu_h^(n), tau_h^(n)).
Vec lambda_opt(const PosteriorSet& posteriors);

// sigma2_opt = (1/(D N)) sum_n [ tr(W^T W T^(n)) + ||W nu^(n) - x^(n)||^2 ].
// For diagonal posteriors the trace reduces to sum_h tau_h^2 (unit columns).
double sigma2_opt(const PosteriorSet& posteriors, const Mat& w_tilde,
                  const Dataset& data);

// The analytic entropy objective. The dictionary is obtained from the
// preimage by column normalization.
ElboBreakdown entropy_elbo(const PosteriorSet& posteriors,
                           const DictionaryPreimage& preimage, const Dataset& data,
                           AnnealingWeights weights = {});

// Same objective evaluated at an already-normalized dictionary.
ElboBreakdown entropy_elbo_given_w(const PosteriorSet& posteriors, const Mat& w_tilde,
                                   const Dataset& data, AnnealingWeights weights = {});

// Closed-form classical ELBO at explicit model parameters.
double classical_elbo(const PosteriorSet& posteriors, const ModelParams& theta,
                      const Dataset& data);

// Gradients of entropy_elbo(...).total with respect to every stored posterior
// entry (flat layout of model.hpp), the normalized dictionary, and the
// preimage. The preimage gradient applies the normalization Jacobian
// (I - u u^T)/||v|| per column to the dictionary gradient.
struct ElboGradients {
  ElboBreakdown breakdown;
  std::vector<Vec> posterior;  // per datapoint, flat layout
  Mat w_tilde;                 // D x H
  Mat preimage;                // D x H
};

ElboGradients entropy_elbo_gradients(const PosteriorSet& posteriors,
                                     const DictionaryPreimage& preimage,
                                     const Dataset& data, AnnealingWeights weights = {});

ElboGradients entropy_elbo_gradients_given_w(const PosteriorSet& posteriors,
                                             const Mat& w_tilde, const Dataset& data,
                                             AnnealingWeights weights = {});

// Gradients of classical_elbo with respect to the posteriors, the dictionary,
// the scales, and the observation variance. On the manifold
// lambda = lambda_opt, sigma2 = sigma2_opt these coincide with the entropy
// objective's gradients; away from it the dictionary gradients obey
// grad_W entropy = (sigma2 / sigma2_opt) grad_W classical.
struct ClassicalGradients {
  double value = 0.0;
  std::vector<Vec> posterior;
  Mat w;        // D x H
  Vec lambdas;  // H
  double sigma2 = 0.0;
};

ClassicalGradients classical_elbo_gradients(const PosteriorSet& posteriors,
                                            const ModelParams& theta,
                                            const Dataset& data);

// The l1-flavored local objective for diagonal posteriors (to be minimized):
// (D/2) log sigma2_opt + gamma * sum_h log lambda_opt_h.
double l1_local_objective(const PosteriorSet& posteriors,
                          const DictionaryPreimage& preimage, const Dataset& data,
                          double gamma);

// Jacobian of column normalization applied to a dictionary gradient.
Mat chain_through_normalization(const DictionaryPreimage& preimage,
                                const Mat& w_gradient);

}  // namespace sc
