#include "sc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sc {

double gini(const Vec& code, bool* was_zero) {
  const int h = static_cast<int>(code.size());
  if (h == 0) throw std::invalid_argument("gini: empty code");
  std::vector<double> c(h);
  for (int i = 0; i < h; ++i) c[i] = std::abs(code[i]);
  std::sort(c.begin(), c.end());
  const double l1 = pairwise_sum(c);
  if (was_zero) *was_zero = (l1 == 0.0);
  if (l1 == 0.0) return 0.0;
  std::vector<double> terms(h);
  for (int k = 1; k <= h; ++k) {
    terms[k - 1] = (c[k - 1] / l1) * ((h - k + 0.5) / h);
  }
  return 1.0 - 2.0 * pairwise_sum(terms);
}

GiniReport gini_report(const PosteriorSet& posteriors) {
  posteriors.validate();
  const int n = posteriors.size();
  if (n < 2) throw std::invalid_argument("gini_report: need at least two posteriors");
  GiniReport rep;
  rep.per_sample.resize(n);
  for (int i = 0; i < n; ++i) {
    bool zero = false;
    rep.per_sample[i] = gini(mean_of(posteriors.entries[i]), &zero);
    if (zero) ++rep.zero_codes;
  }
  rep.mean = pairwise_sum(rep.per_sample) / n;
  const Vec centered = rep.per_sample.array() - rep.mean;
  const Vec sq = centered.array().square();
  rep.sd = std::sqrt(pairwise_sum(sq) / n);
  return rep;
}

double dictionary_coherence(const Mat& w) {
  const int h = static_cast<int>(w.cols());
  for (int c = 0; c < h; ++c) {
    if (std::abs(w.col(c).norm() - 1.0) > 1e-8) {
      throw std::invalid_argument("dictionary_coherence: columns must be unit norm");
    }
  }
  double best = 0.0;
  for (int i = 0; i < h; ++i) {
    for (int j = i + 1; j < h; ++j) {
      best = std::max(best, std::abs(w.col(i).dot(w.col(j))));
    }
  }
  return best;
}

}  // namespace sc
