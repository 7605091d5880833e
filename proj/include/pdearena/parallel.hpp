#ifndef PDEARENA_PARALLEL_HPP
#define PDEARENA_PARALLEL_HPP

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace pdearena {

/// Number of worker stripes used by parallel batch loops. Fixed so that the
/// work partition (and therefore every floating-point reduction order) is
/// identical no matter how many threads actually run.
inline constexpr std::size_t kStripes = 16;

inline unsigned worker_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  return std::clamp(hw == 0 ? 1u : hw, 1u, static_cast<unsigned>(kStripes));
}

/// Run body(stripe, begin, end) over a fixed 16-way partition of [0, n).
/// Each stripe is processed serially by one worker; callers reduce
/// per-stripe results in stripe order to stay bit-deterministic.
template <typename Body>
void for_each_stripe(std::size_t n, Body&& body) {
  if (n == 0) return;
  const std::size_t per = (n + kStripes - 1) / kStripes;
  unsigned nthreads = worker_threads();
  if (nthreads <= 1 || n < 2 * per) {
    for (std::size_t s = 0; s < kStripes; ++s) {
      std::size_t b = std::min(n, s * per), e = std::min(n, (s + 1) * per);
      if (b < e) body(s, b, e);
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (unsigned t = 0; t < nthreads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t s = t; s < kStripes; s += nthreads) {
        std::size_t b = std::min(n, s * per), e = std::min(n, (s + 1) * per);
        if (b < e) body(s, b, e);
      }
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace pdearena

#endif
