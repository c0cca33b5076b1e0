#ifndef CHAINMIX_PARALLEL_HPP
#define CHAINMIX_PARALLEL_HPP

#include <cstddef>
#include <thread>
#include <vector>

namespace chainmix {

/// Worker count actually used for ensembles; 0 requests the hardware default.
inline std::size_t resolve_threads(std::size_t requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

/// Runs fn(i) for i in [0, n).  Results must be written to per-index slots;
/// the partition of indices over workers never affects the output, so runs
/// are deterministic for any thread count.
template <class Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  if (threads > n) threads = n;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (std::size_t w = 0; w < threads; ++w) {
    pool.emplace_back([&fn, w, n, threads] {
      for (std::size_t i = w; i < n; i += threads) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace chainmix

#endif
