#include "sc/objectives.hpp"

#include <cmath>
#include <stdexcept>

namespace sc {

namespace {

constexpr double kSqrt2OverPi = 0.7978845608028653558798921198687;
constexpr double kInvSqrt2 = 0.7071067811865475244008443621048;
constexpr double kLog2PiE = 2.8378770664093454835606594728112;
constexpr std::size_t kChunk = 64;  // matches parallel_for's scheduling unit

ErfBackend g_erf_backend = ErfBackend::Exact;

double erf_b(double x) { return erf_via(g_erf_backend, x); }

double m_b(double a) {
  const double abs_a = std::abs(a);
  if (abs_a > 38.0) return abs_a;
  return kSqrt2OverPi * std::exp(-0.5 * a * a) + a * erf_b(a * kInvSqrt2);
}

void check_weights(AnnealingWeights w) {
  if (!(std::isfinite(w.gamma) && std::isfinite(w.delta)) || w.gamma < 0.0 ||
      w.delta < 0.0) {
    throw std::invalid_argument("AnnealingWeights: gamma and delta must be finite and >= 0");
  }
}

void check_shapes(const PosteriorSet& posteriors, const Mat& w, const Dataset& data) {
  posteriors.validate();
  if (posteriors.size() != data.size()) {
    throw std::invalid_argument("shape mismatch: posterior count vs datapoint count");
  }
  if (static_cast<int>(w.rows()) != data.obs_dim()) {
    throw std::invalid_argument("shape mismatch: dictionary rows vs data dimension");
  }
  if (static_cast<int>(w.cols()) != posteriors.latent_dim()) {
    throw std::invalid_argument("shape mismatch: dictionary columns vs latent dimension");
  }
}

double q_entropy_of(const PosteriorParams& p) {
  const int h = latent_dim_of(p);
  if (const auto* full = std::get_if<FullPosterior>(&p)) {
    const Vec log_diag = full->chol_store.diagonal();
    return 0.5 * h * kLog2PiE + pairwise_sum(log_diag);
  }
  if (const auto* diag = std::get_if<DiagonalPosterior>(&p)) {
    return 0.5 * h * kLog2PiE + pairwise_sum(diag->log_tau);
  }
  const Mat t = covariance_of(p);
  const Eigen::LLT<Mat> llt(t);
  if (llt.info() != Eigen::Success) {
    throw std::invalid_argument("q_entropy: covariance not positive definite");
  }
  const Vec log_diag = Mat(llt.matrixL()).diagonal().array().log();
  return 0.5 * h * kLog2PiE + pairwise_sum(log_diag);
}

// tr(W^T W T) + ||W nu - x||^2; the trace reduces to sum_h tau_h^2 for
// diagonal posteriors under unit-norm columns.
double bracket_of(const PosteriorParams& p, const Mat& w, const Mat& gram,
                  const Vec& x) {
  const Vec& nu = mean_of(p);
  const double resid = (w * nu - x).squaredNorm();
  if (const auto* full = std::get_if<FullPosterior>(&p)) {
    const Mat chol = full->cholesky();
    return (gram.cwiseProduct(chol * chol.transpose())).sum() + resid;
  }
  if (const auto* diag = std::get_if<DiagonalPosterior>(&p)) {
    return diag->tau().squaredNorm() + resid;
  }
  const auto& lr = std::get<LowRankPosterior>(p);
  const Vec s2 = (2.0 * lr.log_s).array().exp();
  return ((gram * lr.v_factor).cwiseProduct(lr.v_factor)).sum() +
         gram.diagonal().dot(s2) + resid;
}

struct ValueTerms {
  Vec lambda;      // H
  double sigma2 = 0.0;
  double q_avg = 0.0;
};

ValueTerms compute_terms(const PosteriorSet& posteriors, const Mat& w,
                         const Dataset& data, bool exact_erf) {
  const int n = posteriors.size();
  const int d = data.obs_dim();
  const int h = posteriors.latent_dim();
  const Mat gram = w.transpose() * w;

  Mat soft(n, h);  // softened magnitudes, column-contiguous over n
  std::vector<double> qent(n), bracket(n);
  parallel_for(n, [&](std::size_t i) {
    const auto& p = posteriors.entries[i];
    const Vec tau = marginal_std(p);
    const Vec& nu = mean_of(p);
    for (int j = 0; j < h; ++j) {
      const double a = nu[j] / tau[j];
      soft(static_cast<Eigen::Index>(i), j) =
          tau[j] * (exact_erf ? m_function(a) : m_b(a));
    }
    qent[i] = q_entropy_of(p);
    bracket[i] = bracket_of(p, w, gram, data.x.row(i).transpose());
  });

  ValueTerms terms;
  terms.lambda.resize(h);
  for (int j = 0; j < h; ++j) {
    terms.lambda[j] = pairwise_sum(soft.col(j).data(), n) / static_cast<double>(n);
  }
  terms.sigma2 = pairwise_sum(bracket) / (static_cast<double>(d) * n);
  terms.q_avg = pairwise_sum(qent) / static_cast<double>(n);
  return terms;
}

ElboBreakdown assemble_breakdown(const ValueTerms& terms, int d, AnnealingWeights w) {
  ElboBreakdown b;
  b.lambda_opt = terms.lambda;
  b.sigma2_opt = terms.sigma2;
  b.q_entropy_avg = terms.q_avg;
  b.prior_entropy = laplace_entropy(terms.lambda);
  b.likelihood_entropy = gaussian_likelihood_entropy(terms.sigma2, d);
  b.total = b.q_entropy_avg - w.gamma * b.prior_entropy - w.delta * b.likelihood_entropy;
  return b;
}

// Gradients of q_avg - gamma * prior - delta * likelihood with the prior and
// likelihood scale factors supplied by the caller: (lambda_opt, sigma2_opt)
// recovers the entropy objective, explicit model parameters recover the
// classical ELBO (all entropy-vs-classical differences sit in these scales).
struct GradientScales {
  const Vec& lambda;
  double sigma2;
  double gamma;
  double delta;
};

void posterior_and_w_gradients(const PosteriorSet& posteriors, const Mat& w,
                               const Dataset& data, const GradientScales& s,
                               std::vector<Vec>& pgrads, Mat& wgrad) {
  const int n = posteriors.size();
  const int d = data.obs_dim();
  const int h = posteriors.latent_dim();
  const Mat gram = w.transpose() * w;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double inv_s2n = 1.0 / (s.sigma2 * static_cast<double>(n));

  pgrads.assign(n, Vec());
  const std::size_t n_chunks = (static_cast<std::size_t>(n) + kChunk - 1) / kChunk;
  std::vector<Mat> chunk_w(n_chunks, Mat::Zero(d, h));

  parallel_for(n, [&](std::size_t i) {
    const auto& p = posteriors.entries[i];
    const Vec tau = marginal_std(p);
    const Vec& nu = mean_of(p);
    const Vec x = data.x.row(i).transpose();
    const Vec r = w * nu - x;
    const Vec wr = w.transpose() * r;

    Vec pri_nu(h), pri_tau(h);
    for (int j = 0; j < h; ++j) {
      const double a = nu[j] / tau[j];
      pri_nu[j] = erf_b(a * kInvSqrt2) / s.lambda[j] * inv_n;
      pri_tau[j] = kSqrt2OverPi * std::exp(-0.5 * a * a) / s.lambda[j] * inv_n;
    }

    Vec g(param_count(p));
    g.head(h) = -s.gamma * pri_nu - (s.delta * inv_s2n) * wr;

    if (const auto* full = std::get_if<FullPosterior>(&p)) {
      const Mat chol = full->cholesky();
      const Mat gl = gram * chol;
      int k = h;
      for (int row = 0; row < h; ++row) {
        for (int col = 0; col < row; ++col) {
          g[k++] = -s.gamma * pri_tau[row] * (chol(row, col) / tau[row]) -
                   s.delta * inv_s2n * gl(row, col);
        }
        const double lrr = chol(row, row);
        g[k++] = inv_n - s.gamma * pri_tau[row] * (lrr * lrr / tau[row]) -
                 s.delta * inv_s2n * gl(row, row) * lrr;
      }
    } else if (const auto* diag = std::get_if<DiagonalPosterior>(&p)) {
      const Vec tv = diag->tau();
      for (int j = 0; j < h; ++j) {
        g[h + j] = inv_n - s.gamma * pri_tau[j] * tv[j] -
                   s.delta * inv_s2n * tv[j] * tv[j];
      }
    } else {
      const auto& lr = std::get<LowRankPosterior>(p);
      const int rank = static_cast<int>(lr.v_factor.cols());
      const Vec s2 = (2.0 * lr.log_s).array().exp();
      Mat t = lr.v_factor * lr.v_factor.transpose();
      t.diagonal() += s2;
      const Eigen::LLT<Mat> llt(t);
      const Mat t_inv = llt.solve(Mat::Identity(h, h));
      const Mat tinv_v = t_inv * lr.v_factor;
      const Mat gv = gram * lr.v_factor;
      int k = h;
      for (int row = 0; row < h; ++row) {
        for (int col = 0; col < rank; ++col) {
          g[k++] = inv_n * tinv_v(row, col) -
                   s.gamma * pri_tau[row] * (lr.v_factor(row, col) / tau[row]) -
                   s.delta * inv_s2n * gv(row, col);
        }
      }
      for (int j = 0; j < h; ++j) {
        g[h + h * rank + j] = inv_n * t_inv(j, j) * s2[j] -
                              s.gamma * pri_tau[j] * (s2[j] / tau[j]) -
                              s.delta * inv_s2n * gram(j, j) * s2[j];
      }
    }
    pgrads[i] = std::move(g);

    // w T^(n) + r nu^T accumulated per fixed 64-wide chunk; chunks are each
    // owned by a single worker and combined in index order below.
    Mat& acc = chunk_w[i / kChunk];
    if (std::holds_alternative<DiagonalPosterior>(p)) {
      acc.noalias() += w * tau.array().square().matrix().asDiagonal();
    } else {
      acc.noalias() += w * covariance_of(p);
    }
    acc.noalias() += r * nu.transpose();
  });

  wgrad = Mat::Zero(d, h);
  for (const auto& acc : chunk_w) wgrad += acc;
  wgrad *= -s.delta * inv_s2n;
}

}  // namespace

void set_objective_erf_backend(ErfBackend backend) { g_erf_backend = backend; }
ErfBackend objective_erf_backend() { return g_erf_backend; }

Vec lambda_opt(const PosteriorSet& posteriors) {
  posteriors.validate();
  const int n = posteriors.size();
  const int h = posteriors.latent_dim();
  Mat soft(n, h);
  parallel_for(n, [&](std::size_t i) {
    const Vec tau = marginal_std(posteriors.entries[i]);
    const Vec& nu = mean_of(posteriors.entries[i]);
    for (int j = 0; j < h; ++j) {
      soft(static_cast<Eigen::Index>(i), j) = softened_magnitude(nu[j], tau[j]);
    }
  });
  Vec lambda(h);
  for (int j = 0; j < h; ++j) {
    lambda[j] = pairwise_sum(soft.col(j).data(), n) / static_cast<double>(n);
  }
  return lambda;
}

double sigma2_opt(const PosteriorSet& posteriors, const Mat& w_tilde,
                  const Dataset& data) {
  check_shapes(posteriors, w_tilde, data);
  const int n = posteriors.size();
  const Mat gram = w_tilde.transpose() * w_tilde;
  std::vector<double> bracket(n);
  parallel_for(n, [&](std::size_t i) {
    bracket[i] = bracket_of(posteriors.entries[i], w_tilde, gram,
                            data.x.row(i).transpose());
  });
  return pairwise_sum(bracket) / (static_cast<double>(data.obs_dim()) * n);
}

ElboBreakdown entropy_elbo_given_w(const PosteriorSet& posteriors, const Mat& w_tilde,
                                   const Dataset& data, AnnealingWeights weights) {
  check_weights(weights);
  check_shapes(posteriors, w_tilde, data);
  const ValueTerms terms =
      compute_terms(posteriors, w_tilde, data, g_erf_backend == ErfBackend::Exact);
  return assemble_breakdown(terms, data.obs_dim(), weights);
}

ElboBreakdown entropy_elbo(const PosteriorSet& posteriors,
                           const DictionaryPreimage& preimage, const Dataset& data,
                           AnnealingWeights weights) {
  return entropy_elbo_given_w(posteriors, normalize_columns(preimage), data, weights);
}

namespace {
double classical_value(const ValueTerms& terms, const ModelParams& theta, int d) {
  const int h = static_cast<int>(theta.lambdas.size());
  Vec prior_terms(h);
  for (int j = 0; j < h; ++j) {
    prior_terms[j] =
        -(std::log(2.0 * theta.lambdas[j]) + terms.lambda[j] / theta.lambdas[j]);
  }
  const double lik = -0.5 * d * std::log(2.0 * M_PI * theta.sigma2) -
                     0.5 * d * terms.sigma2 / theta.sigma2;
  return terms.q_avg + pairwise_sum(prior_terms) + lik;
}
}  // namespace

double classical_elbo(const PosteriorSet& posteriors, const ModelParams& theta,
                      const Dataset& data) {
  theta.validate();
  check_shapes(posteriors, theta.w_tilde, data);
  const ValueTerms terms = compute_terms(posteriors, theta.w_tilde, data,
                                         g_erf_backend == ErfBackend::Exact);
  return classical_value(terms, theta, data.obs_dim());
}

ElboGradients entropy_elbo_gradients_given_w(const PosteriorSet& posteriors,
                                             const Mat& w_tilde, const Dataset& data,
                                             AnnealingWeights weights) {
  check_weights(weights);
  check_shapes(posteriors, w_tilde, data);
  const ValueTerms terms =
      compute_terms(posteriors, w_tilde, data, g_erf_backend == ErfBackend::Exact);

  ElboGradients out;
  out.breakdown = assemble_breakdown(terms, data.obs_dim(), weights);
  const GradientScales scales{terms.lambda, terms.sigma2, weights.gamma, weights.delta};
  posterior_and_w_gradients(posteriors, w_tilde, data, scales, out.posterior,
                            out.w_tilde);
  return out;
}

ElboGradients entropy_elbo_gradients(const PosteriorSet& posteriors,
                                     const DictionaryPreimage& preimage,
                                     const Dataset& data, AnnealingWeights weights) {
  ElboGradients out =
      entropy_elbo_gradients_given_w(posteriors, normalize_columns(preimage), data,
                                     weights);
  out.preimage = chain_through_normalization(preimage, out.w_tilde);
  return out;
}

ClassicalGradients classical_elbo_gradients(const PosteriorSet& posteriors,
                                            const ModelParams& theta,
                                            const Dataset& data) {
  theta.validate();
  check_shapes(posteriors, theta.w_tilde, data);
  const int d = data.obs_dim();
  const int h = posteriors.latent_dim();
  const ValueTerms terms = compute_terms(posteriors, theta.w_tilde, data,
                                         g_erf_backend == ErfBackend::Exact);

  ClassicalGradients out;
  out.value = classical_value(terms, theta, d);
  const GradientScales scales{theta.lambdas, theta.sigma2, 1.0, 1.0};
  posterior_and_w_gradients(posteriors, theta.w_tilde, data, scales, out.posterior,
                            out.w);

  out.lambdas.resize(h);
  for (int j = 0; j < h; ++j) {
    out.lambdas[j] =
        (terms.lambda[j] - theta.lambdas[j]) / (theta.lambdas[j] * theta.lambdas[j]);
  }
  out.sigma2 = 0.5 * d * (terms.sigma2 - theta.sigma2) / (theta.sigma2 * theta.sigma2);
  return out;
}

double l1_local_objective(const PosteriorSet& posteriors,
                          const DictionaryPreimage& preimage, const Dataset& data,
                          double gamma) {
  if (!std::isfinite(gamma)) throw std::invalid_argument("l1_local_objective: gamma");
  if (posteriors.variant() != PosteriorVariant::Diagonal) {
    throw std::invalid_argument("l1_local_objective: diagonal posteriors required");
  }
  const Mat w = normalize_columns(preimage);
  check_shapes(posteriors, w, data);
  const ValueTerms terms = compute_terms(posteriors, w, data, true);
  const Vec log_lambda = terms.lambda.array().log();
  return 0.5 * data.obs_dim() * std::log(terms.sigma2) + gamma * pairwise_sum(log_lambda);
}

Mat chain_through_normalization(const DictionaryPreimage& preimage,
                                const Mat& w_gradient) {
  Mat out(preimage.v.rows(), preimage.v.cols());
  for (Eigen::Index c = 0; c < preimage.v.cols(); ++c) {
    const double norm = preimage.v.col(c).norm();
    if (norm == 0.0) {
      throw std::invalid_argument("chain_through_normalization: zero column");
    }
    const Vec u = preimage.v.col(c) / norm;
    const Vec g = w_gradient.col(c);
    out.col(c) = (g - u * u.dot(g)) / norm;
  }
  return out;
}

}  // namespace sc
