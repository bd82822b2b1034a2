#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

#include "rpw/metric.hpp"

namespace rpw {

/// Runs fn(0..count-1) with at most `jobs` worker threads. Tasks write to
/// caller-owned slots, so results are independent of scheduling order. The
/// first exception thrown by a task is rethrown on the calling thread.
inline void parallel_for(std::size_t count, unsigned jobs,
                         const std::function<void(std::size_t)>& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < count && !failed.load();
         i = next.fetch_add(1)) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        failed.store(true);
      }
    }
  };
  std::vector<std::thread> pool;
  const unsigned width = std::min<std::size_t>(jobs, count);
  pool.reserve(width);
  for (unsigned t = 0; t < width; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// All pairwise distances between two families of distributions, row-major
/// rows x cols. Deterministic for fixed inputs regardless of `jobs`.
inline std::vector<double> pairwise_distances(const std::vector<DiscreteDistribution>& rows,
                                              const std::vector<DiscreteDistribution>& cols,
                                              const MetricSpec& spec, double ambient_diameter,
                                              unsigned jobs) {
  std::vector<double> out(rows.size() * cols.size(), 0.0);
  parallel_for(out.size(), jobs, [&](std::size_t idx) {
    const std::size_t i = idx / cols.size(), j = idx % cols.size();
    out[idx] = evaluate_metric(spec, rows[i], cols[j], ambient_diameter);
  });
  return out;
}

/// Symmetric all-pairs distance matrix over one family.
inline std::vector<double> distance_matrix(const std::vector<DiscreteDistribution>& dists,
                                           const MetricSpec& spec, double ambient_diameter,
                                           unsigned jobs) {
  const std::size_t n = dists.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::vector<double> out(n * n, 0.0);
  parallel_for(pairs.size(), jobs, [&](std::size_t t) {
    const auto [i, j] = pairs[t];
    const double d = evaluate_metric(spec, dists[i], dists[j], ambient_diameter);
    out[i * n + j] = d;
    out[j * n + i] = d;
  });
  return out;
}

}  // namespace rpw
