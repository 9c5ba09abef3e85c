#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace repkit {

inline unsigned effective_threads(unsigned requested = 0) {
  if (requested > 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs f(i) for i in [begin, end) on up to `threads` worker threads with a
/// static contiguous partition. Each index must be independent; under that
/// condition the result is identical for any thread count.
template <typename F>
void parallel_for(std::size_t begin, std::size_t end, F&& f, unsigned threads = 0) {
  if (end <= begin) return;
  std::size_t n = end - begin;
  unsigned nthreads = std::min<std::size_t>(effective_threads(threads), n);
  if (nthreads <= 1) {
    for (std::size_t i = begin; i < end; ++i) f(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  std::size_t chunk = (n + nthreads - 1) / nthreads;
  for (unsigned t = 0; t < nthreads; ++t) {
    std::size_t lo = begin + static_cast<std::size_t>(t) * chunk;
    std::size_t hi = std::min(end, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &f] {
      for (std::size_t i = lo; i < hi; ++i) f(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace repkit
