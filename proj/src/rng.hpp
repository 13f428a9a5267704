#pragma once

#include <cmath>
#include <cstdint>

namespace wickfbm {

/// Stateless counter-based generator: every draw is a pure function of
/// (seed, stream, counter), so parallel consumers can index into disjoint
/// streams without shared state.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t bits(std::uint64_t stream, std::uint64_t counter) const {
    std::uint64_t z = seed_ ^ 0x6A09E667F3BCC909ULL;
    z += stream * 0x9E3779B97F4A7C15ULL;
    z = avalanche(z);
    z += counter * 0xD1B54A32D192ED03ULL;
    return avalanche(z);
  }

  /// Uniform in the open interval (0, 1).
  double uniform01(std::uint64_t stream, std::uint64_t counter) const {
    return (static_cast<double>(bits(stream, counter) >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; draw j consumes uniforms (2j, 2j+1).
  double normal(std::uint64_t stream, std::uint64_t counter) const {
    const double u1 = uniform01(stream, 2 * counter);
    const double u2 = uniform01(stream, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }

  int sign(std::uint64_t stream, std::uint64_t counter) const {
    return (bits(stream, counter) & 1u) ? 1 : -1;
  }

 private:
  static std::uint64_t avalanche(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t seed_;
};

}  // namespace wickfbm
