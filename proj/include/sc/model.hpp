#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "sc/numeric.hpp"

namespace sc {

// Likelihood/prior parameters of the reparameterized model: a dictionary
// with unit-norm columns, per-latent Laplace scales, and isotropic
// observation variance.
struct ModelParams {
  Mat w_tilde;   // D x H, every column has Euclidean norm 1
  Vec lambdas;   // H, all > 0
  double sigma2; // > 0

  int obs_dim() const { return static_cast<int>(w_tilde.rows()); }
  int latent_dim() const { return static_cast<int>(w_tilde.cols()); }

  // Throws if a column norm deviates from 1 by more than 1e-10 or if a scale
  // or the variance is not positive.
  void validate() const;
};

// Unconstrained preimage of the dictionary; the trained parameter. Column
// normalization maps it onto the unit-column manifold.
struct DictionaryPreimage {
  Mat v;  // D x H, no zero columns

  int obs_dim() const { return static_cast<int>(v.rows()); }
  int latent_dim() const { return static_cast<int>(v.cols()); }
};

// Divides each column by its norm. Reports the offending index on a zero
// column.
Mat normalize_columns(const DictionaryPreimage& preimage);

// --- Variational posterior parameterizations -------------------------------
//
// Positivity is handled by log-parameterization throughout: the stored
// Cholesky diagonal and the diagonal/low-rank standard deviations live in
// log-space, so optimizers can treat every entry as unconstrained.

struct FullPosterior {
  Vec nu;          // H
  // Lower triangle of the Cholesky factor; strictly-lower entries are stored
  // as-is, diagonal entries as logs (L_hh = exp(chol_store(h,h))).
  Mat chol_store;  // H x H

  Mat cholesky() const;  // L with positive diagonal
  static FullPosterior from_cholesky(const Vec& nu, const Mat& chol);
  static FullPosterior identity(int latent_dim);
};

struct DiagonalPosterior {
  Vec nu;       // H
  Vec log_tau;  // H, tau_h = exp(log_tau_h)

  Vec tau() const { return log_tau.array().exp(); }
  static DiagonalPosterior identity(int latent_dim);
};

struct LowRankPosterior {
  Vec nu;        // H
  Mat v_factor;  // H x r
  Vec log_s;     // H; T = v_factor v_factor^T + diag(exp(2 log_s))

  static LowRankPosterior identity(int latent_dim, int rank);
};

using PosteriorParams = std::variant<FullPosterior, DiagonalPosterior, LowRankPosterior>;

enum class PosteriorVariant { Full, Diagonal, LowRank };

PosteriorVariant variant_of(const PosteriorParams& p);
int latent_dim_of(const PosteriorParams& p);

// Dense covariance T per the variant formulas; symmetric positive definite.
Mat covariance_of(const PosteriorParams& p);

// Marginal standard deviations tau_h = sqrt(T_hh).
Vec marginal_std(const PosteriorParams& p);

// Posterior mean.
const Vec& mean_of(const PosteriorParams& p);

// --- Flat parameter layout -------------------------------------------------
//
// Optimizers and finite-difference checks see each posterior as a flat
// vector of its stored (unconstrained) entries:
//   Diagonal: [nu(0..H-1), log_tau(0..H-1)]
//   Full:     [nu(0..H-1), lower triangle row-major, diagonal slots = logs]
//   LowRank:  [nu(0..H-1), v_factor row-major, log_s(0..H-1)]

int param_count(const PosteriorParams& p);
Vec flatten(const PosteriorParams& p);
void unflatten(const Vec& flat, PosteriorParams& p);

// One posterior per datapoint, all of the same variant and latent dimension.
struct PosteriorSet {
  std::vector<PosteriorParams> entries;

  int size() const { return static_cast<int>(entries.size()); }
  PosteriorVariant variant() const { return variant_of(entries.at(0)); }
  int latent_dim() const { return latent_dim_of(entries.at(0)); }

  // N identical fresh posteriors: nu = 0, T = I.
  static PosteriorSet identity(int n, int latent_dim, PosteriorVariant variant,
                               int rank = 5);

  void validate() const;  // non-empty, consistent variant and H
};

enum class DataSource { Bars, Patches, Imported };

struct Dataset {
  Mat x;  // N x D, rows are datapoints; values round-trip through float32
  DataSource source = DataSource::Imported;
  std::optional<std::uint64_t> seed;

  int size() const { return static_cast<int>(x.rows()); }
  int obs_dim() const { return static_cast<int>(x.cols()); }
};

// Rounds every entry through float32; the on-disk payload is float32 and
// generators funnel their output through this so in-memory and reloaded
// datasets agree bitwise.
Mat round_to_float32(const Mat& m);

// Draws n datapoints from the generative model: z_h ~ Laplace(lambda_h) by
// inverse CDF, x = W z + eps with eps ~ N(0, sigma2 I). Deterministic for a
// fixed seed. The matrix overload accepts an unnormalized W.
Dataset sample_generative(const ModelParams& theta, int n, std::uint64_t seed);
Dataset sample_generative(const Mat& w, const Vec& lambdas, double sigma2, int n,
                          std::uint64_t seed);

}  // namespace sc
