#pragma once

#include "sc/numeric.hpp"

namespace sc {

// Gaussian expectation of |z| in standardized form:
//   m_function(a) = sqrt(2/pi) exp(-a^2/2) + a erf(a/sqrt(2))
// Even, strictly greater than |a| everywhere, and m_function(a) - |a| decays
// to zero as |a| grows. For |a| > 38 the exponential term is below 1e-300 and
// |a| is returned directly.
double m_function(double a);

// d/da m_function(a) = erf(a / sqrt(2)); odd, bounded in (-1, 1).
double m_derivative(double a);

// Second-order Buermann closed-form approximation of erf. Odd by
// construction (the sign is taken from x). The decay constant in the two
// correction exponents is fixed at k = 1; the measured maximum absolute error
// against the standard-library erf on [-6, 6] is 3.61e-3 (see
// kErfBurmannMaxError). The exact erf backend is the default everywhere;
// this one is selectable through ErfBackend.
double erf_burmann(double x);

// Documented accuracy bound of erf_burmann, re-verified by the test suite.
inline constexpr double kErfBurmannMaxError = 3.7e-3;

enum class ErfBackend { Exact, Burmann };

// erf evaluated through the selected backend.
double erf_via(ErfBackend backend, double x);

// Softened magnitude |nu|* = tau * m_function(nu / tau); tau must be > 0.
// Upper-bounds |nu| everywhere and approaches it as tau -> 0+.
double softened_magnitude(double nu, double tau);

// Entropy of a product of Laplace distributions: sum_h log(2 e lambda_h).
double laplace_entropy(const Vec& lambdas);

// Entropy of a Gaussian with diagonal covariance diag(tau^2):
// sum_h 1/2 log(2 pi e tau_h^2).
double gaussian_entropy_diag(const Vec& taus);

// Entropy of a Gaussian with covariance T = L L^T given the diagonal of the
// Cholesky factor L: H/2 log(2 pi e) + sum_h log(L_hh).
double gaussian_entropy_full(const Vec& chol_diag);

// Entropy of an isotropic D-dimensional Gaussian: (d/2) log(2 pi e sigma2).
double gaussian_likelihood_entropy(double sigma2, int d);

}  // namespace sc
