#include "sc/oracle.hpp"

#include <cmath>
#include <stdexcept>

#include "sc/rng.hpp"

namespace sc {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

struct AbsMomentIntegrand {
  double nu, tau;
  double operator()(double z) const {
    const double u = (z - nu) / tau;
    return std::exp(-0.5 * u * u) / (tau * std::sqrt(2.0 * M_PI)) * std::abs(z);
  }
};

double adaptive_simpson(const AbsMomentIntegrand& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  if (depth <= 0) {
    throw std::runtime_error("quad_abs_moment: refinement limit reached");
  }
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double simpson_interval(const AbsMomentIntegrand& f, double a, double b, double tol) {
  if (!(b > a)) return 0.0;
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 60);
}

}  // namespace

double quad_abs_moment(double nu, double tau, double tolerance) {
  if (!(tau > 0.0)) throw std::invalid_argument("quad_abs_moment: tau must be positive");
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("quad_abs_moment: tolerance must be positive");
  }
  const AbsMomentIntegrand f{nu, tau};
  const double lo = nu - 12.0 * tau;
  const double hi = nu + 12.0 * tau;
  if (lo < 0.0 && hi > 0.0) {
    return simpson_interval(f, lo, 0.0, 0.5 * tolerance) +
           simpson_interval(f, 0.0, hi, 0.5 * tolerance);
  }
  return simpson_interval(f, lo, hi, tolerance);
}

McEstimate mc_elbo(const PosteriorSet& posteriors, const ModelParams& theta,
                   const Dataset& data, std::int64_t n_samples, std::uint64_t seed) {
  if (n_samples < 100) throw std::invalid_argument("mc_elbo: need n_samples >= 100");
  posteriors.validate();
  const int n = data.size();
  const int d = data.obs_dim();
  const int h = posteriors.latent_dim();
  if (posteriors.size() != n) throw std::invalid_argument("mc_elbo: N mismatch");

  const double log_z_lik = -0.5 * d * (kLog2Pi + std::log(theta.sigma2));
  Vec log_prior_norm(h);
  for (int j = 0; j < h; ++j) log_prior_norm[j] = -std::log(2.0 * theta.lambdas[j]);

  std::vector<double> point_means(n), point_vars(n);
  parallel_for(n, [&](std::size_t i) {
    const Mat t = covariance_of(posteriors.entries[i]);
    const Eigen::LLT<Mat> llt(t);
    if (llt.info() != Eigen::Success) {
      throw std::invalid_argument("mc_elbo: covariance not positive definite");
    }
    const Mat chol = llt.matrixL();
    const double log_det_chol = chol.diagonal().array().log().sum();
    const Vec& nu = mean_of(posteriors.entries[i]);
    const Vec x = data.x.row(i).transpose();

    Rng rng(Rng::derive(seed, i));
    Vec eps(h), z(h);
    double sum = 0.0, sum_sq = 0.0;
    for (std::int64_t s = 0; s < n_samples; ++s) {
      for (int j = 0; j < h; ++j) eps[j] = rng.normal();
      z = nu + chol * eps;
      const double log_q = -0.5 * h * kLog2Pi - log_det_chol - 0.5 * eps.squaredNorm();
      double log_prior = 0.0;
      for (int j = 0; j < h; ++j) {
        log_prior += log_prior_norm[j] - std::abs(z[j]) / theta.lambdas[j];
      }
      const double log_lik =
          log_z_lik - (x - theta.w_tilde * z).squaredNorm() / (2.0 * theta.sigma2);
      const double value = log_lik + log_prior - log_q;
      sum += value;
      sum_sq += value * value;
    }
    const double mean = sum / static_cast<double>(n_samples);
    point_means[i] = mean;
    point_vars[i] =
        (sum_sq - static_cast<double>(n_samples) * mean * mean) /
        static_cast<double>(n_samples - 1);
  });

  McEstimate est;
  est.n_samples = n_samples;
  est.mean = pairwise_sum(point_means) / static_cast<double>(n);
  const double var_of_mean = pairwise_sum(point_vars) /
                             (static_cast<double>(n_samples) * static_cast<double>(n) *
                              static_cast<double>(n));
  est.std_error = std::sqrt(std::max(0.0, var_of_mean));
  return est;
}

Vec finite_diff(const std::function<double(const Vec&)>& objective, const Vec& point,
                double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_diff: step must be positive");
  Vec grad(point.size());
  Vec x = point;
  for (Eigen::Index i = 0; i < point.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(point[i]));
    x[i] = point[i] + h;
    const double fp = objective(x);
    x[i] = point[i] - h;
    const double fm = objective(x);
    x[i] = point[i];
    grad[i] = (fp - fm) / (2.0 * h);
  }
  return grad;
}

}  // namespace sc
