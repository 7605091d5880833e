#ifndef PDEARENA_RNG_HPP
#define PDEARENA_RNG_HPP

#include <cstdint>

namespace pdearena {

/// Counter-based pseudo-random generator built on the splitmix64 mixer.
/// Output i is a pure function of (seed, i), so streams are reproducible
/// across platforms and can be split freely by deriving child seeds.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(mix(seed ^ kSalt)) {}

  /// Derive an independent stream, e.g. one per epoch or per dimension.
  CounterRng child(std::uint64_t stream) const {
    CounterRng r(0);
    r.seed_ = mix(seed_ + 0x9e3779b97f4a7c15ull * (stream + 1));
    r.counter_ = 0;
    return r;
  }

  std::uint64_t next_u64() { return mix(seed_ + 0x9e3779b97f4a7c15ull * ++counter_); }

  /// Uniform double in [0, 1) with 53 random mantissa bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double next_double(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  /// Uniform integer in [0, n), n > 0. Modulo bias is below 2^-40 for the
  /// range sizes used here (n < 2^24).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }

  static constexpr std::uint64_t kSalt = 0x5DEECE66Dull;

  std::uint64_t seed_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace pdearena

#endif
