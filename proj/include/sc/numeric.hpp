#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

#include <Eigen/Dense>

namespace sc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Pairwise (tree) summation in a fixed order. All reductions over datapoints
// and latent dimensions go through this so that totals are deterministic and
// independent of the worker count.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 32) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

inline double pairwise_sum(const Vec& v) {
  return pairwise_sum(v.data(), static_cast<std::size_t>(v.size()));
}

namespace detail {
inline int thread_count_slot(int set_to, bool do_set) {
  static int count = [] {
    if (const char* env = std::getenv("SC_THREADS")) {
      const int v = std::atoi(env);
      if (v >= 1) return v;
    }
    return 1;
  }();
  if (do_set && set_to >= 1) count = set_to;
  return count;
}
}  // namespace detail

// Worker cap for data-parallel loops. Defaults to SC_THREADS or 1.
inline int thread_count() { return detail::thread_count_slot(0, false); }
inline void set_thread_count(int n) { detail::thread_count_slot(n, true); }

// Runs fn(i) for i in [0, n). Work is split into fixed-size chunks whose
// boundaries do not depend on the worker count, so per-index outputs (and any
// chunk-ordered reduction built on top) are scheduling-independent.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
  const int workers = thread_count();
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  constexpr std::size_t kChunk = 64;
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  const std::size_t spawn = std::min<std::size_t>(static_cast<std::size_t>(workers), n_chunks);
  pool.reserve(spawn);
  for (std::size_t t = 0; t < spawn; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t c = next.fetch_add(1);
        if (c >= n_chunks) return;
        const std::size_t lo = c * kChunk;
        const std::size_t hi = std::min(n, lo + kChunk);
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace sc
