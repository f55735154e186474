#pragma once

#include "sc/model.hpp"

namespace sc {

// Gini coefficient of a code vector (Hurley-Rickard form): sort c = |code|
// ascending, return 1 - 2 sum_k (c_k / ||c||_1) (H - k + 1/2) / H. Scale and
// permutation invariant, 0 for a uniform vector, 1 - 1/H for a one-hot one.
// An all-zero code is defined as 0; *was_zero reports the case when provided.
double gini(const Vec& code, bool* was_zero = nullptr);

struct GiniReport {
  double mean = 0.0;
  double sd = 0.0;       // population standard deviation
  Vec per_sample;        // N
  int zero_codes = 0;    // all-zero inputs that were scored 0
};

// Per-sample Gini of the posterior means. Needs at least two entries.
GiniReport gini_report(const PosteriorSet& posteriors);

// Largest off-diagonal |<w_i, w_j>| of a unit-column dictionary.
double dictionary_coherence(const Mat& w);

}  // namespace sc
