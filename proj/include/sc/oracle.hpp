#pragma once

#include <cstdint>
#include <functional>

#include "sc/model.hpp"

namespace sc {

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n_samples = 0;
};

// Monte-Carlo estimate of the classical ELBO: for every datapoint draw
// z = nu + chol(T) eps and average log p(x|z) + log p(z) - log q(z).
// Per-datapoint streams are derived from the seed, so the result does not
// depend on scheduling. Computed from the raw densities, independent of the
// closed-form objective code.
McEstimate mc_elbo(const PosteriorSet& posteriors, const ModelParams& theta,
                   const Dataset& data, std::int64_t n_samples, std::uint64_t seed);

// Adaptive Simpson quadrature of int N(z | nu, tau^2) |z| dz over
// [nu - 12 tau, nu + 12 tau], split at z = 0 (the kink of the integrand).
// Throws on hitting the refinement limit.
double quad_abs_moment(double nu, double tau, double tolerance);

// Central finite differences, one coordinate at a time, with per-coordinate
// step h_i = step * max(1, |x_i|).
Vec finite_diff(const std::function<double(const Vec&)>& objective, const Vec& point,
                double step);

}  // namespace sc
