#ifndef CHAINMIX_RNG_HPP
#define CHAINMIX_RNG_HPP

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace chainmix {

/// Identifies one independent random stream of an ensemble.
/// The derivation (root_seed, stream_index) -> generator state is fixed
/// and documented in the README; equal SeedSpecs give bitwise-equal draws.
struct SeedSpec {
  std::uint64_t root_seed = 0;
  std::uint64_t stream_index = 0;

  SeedSpec stream(std::uint64_t offset) const {
    return SeedSpec{root_seed, stream_index + offset};
  }
};

namespace detail {
// Finalizer from the splitmix64 reference implementation.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-free splitmix64 stream.  We avoid the standard <random>
/// distributions on purpose: their output is implementation-defined, and the
/// artifact promises byte-identical results for equal seeds.
class Rng {
 public:
  explicit Rng(SeedSpec spec)
      : state_(detail::mix64(detail::mix64(spec.root_seed) ^
                             (spec.stream_index + 0x9e3779b97f4a7c15ULL))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return detail::mix64(state_);
  }

  /// Uniform double in [0, 1), 53 random bits.
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Exponential holding time with the given rate (> 0).
  double exponential(double rate) {
    // 1 - uniform() is in (0, 1], so the log is finite.
    return -std::log1p(-uniform()) / rate;
  }

  /// Index sampled proportionally to the (non-negative) weights, whose sum
  /// is passed in by the caller.
  std::size_t categorical(std::span<const double> weights, double total) {
    const double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return weights.empty() ? throw std::invalid_argument("categorical: empty")
                           : weights.size() - 1;
  }

 private:
  std::uint64_t state_;
};

}  // namespace chainmix

#endif
