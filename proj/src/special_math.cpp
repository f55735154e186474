#include "sc/special_math.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sc {

namespace {
constexpr double kSqrt2OverPi = 0.7978845608028653558798921198687;  // sqrt(2/pi)
constexpr double kInvSqrt2 = 0.7071067811865475244008443621048;     // 1/sqrt(2)
constexpr double kSqrtPi = 1.7724538509055160272981674833411;       // sqrt(pi)
constexpr double kLog2PiE = 2.8378770664093454835606594728112;      // log(2 pi e)
constexpr double kLog2E = 1.6931471805599453094172321214582;        // log(2 e)

void require_positive(const Vec& v, const char* what) {
  for (Eigen::Index h = 0; h < v.size(); ++h) {
    if (!(v[h] > 0.0)) {
      throw std::invalid_argument(std::string(what) + " must be positive, entry " +
                                  std::to_string(h) + " is " + std::to_string(v[h]));
    }
  }
}
}  // namespace

double m_function(double a) {
  const double abs_a = std::abs(a);
  if (abs_a > 38.0) return abs_a;  // exp(-a^2/2) < 1e-313 here
  return kSqrt2OverPi * std::exp(-0.5 * a * a) + a * std::erf(a * kInvSqrt2);
}

double m_derivative(double a) { return std::erf(a * kInvSqrt2); }

double erf_burmann(double x) {
  const double ax = std::abs(x);
  const double e1 = std::exp(-ax * ax);
  const double bracket = 0.5 * kSqrtPi + (21.0 / 200.0) * e1 - (341.0 / 8000.0) * e1 * e1;
  const double value = (2.0 / kSqrtPi) * std::sqrt(1.0 - e1) * bracket;
  return x < 0.0 ? -value : value;
}

double erf_via(ErfBackend backend, double x) {
  return backend == ErfBackend::Exact ? std::erf(x) : erf_burmann(x);
}

double softened_magnitude(double nu, double tau) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("softened_magnitude: tau must be positive, got " +
                                std::to_string(tau));
  }
  return tau * m_function(nu / tau);
}

double laplace_entropy(const Vec& lambdas) {
  require_positive(lambdas, "laplace_entropy: scales");
  Vec terms = lambdas.array().log() + kLog2E;
  return pairwise_sum(terms);
}

double gaussian_entropy_diag(const Vec& taus) {
  require_positive(taus, "gaussian_entropy_diag: taus");
  Vec terms = taus.array().log() + 0.5 * kLog2PiE;
  return pairwise_sum(terms);
}

double gaussian_entropy_full(const Vec& chol_diag) {
  require_positive(chol_diag, "gaussian_entropy_full: Cholesky diagonal");
  Vec terms = chol_diag.array().log() + 0.5 * kLog2PiE;
  return pairwise_sum(terms);
}

double gaussian_likelihood_entropy(double sigma2, int d) {
  if (!(sigma2 > 0.0)) {
    throw std::invalid_argument("gaussian_likelihood_entropy: sigma2 must be positive, got " +
                                std::to_string(sigma2));
  }
  if (d < 1) throw std::invalid_argument("gaussian_likelihood_entropy: d must be >= 1");
  return 0.5 * static_cast<double>(d) * (kLog2PiE + std::log(sigma2));
}

}  // namespace sc
