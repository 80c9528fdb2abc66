// Minimal data-parallel loop for per-point maps.
//
// Only element-wise maps go through here; reductions stay sequential so that
// results are bit-identical for any worker count.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace gimprint::parallel {

inline std::atomic<unsigned>& worker_count_storage() {
  static std::atomic<unsigned> workers{1};
  return workers;
}

inline void set_workers(unsigned n) { worker_count_storage() = std::max(1u, n); }
inline unsigned workers() { return worker_count_storage(); }

/// Calls fn(i) for every i in [begin, end). fn must only touch data owned by i.
template <class Fn>
void for_each_index(std::size_t begin, std::size_t end, Fn&& fn) {
  const std::size_t n = end > begin ? end - begin : 0;
  const unsigned w = workers();
  if (w <= 1 || n < 4096) {
    for (std::size_t i = begin; i < end; ++i) fn(i);
    return;
  }
  const std::size_t chunk = (n + w - 1) / w;
  std::vector<std::jthread> pool;
  pool.reserve(w);
  for (unsigned t = 0; t < w; ++t) {
    const std::size_t lo = begin + t * chunk;
    const std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
}

}  // namespace gimprint::parallel
