#pragma once

/**
 * Counter-based random numbers (Philox4x32-10, Salmon et al., SC'11).
 *
 * A draw is a pure function of (seed, sample index, slot, block), so any
 * worker can produce any sample's variates without shared state and results
 * do not depend on how samples are partitioned across threads.
 *
 * Counter layout: {sample lo, sample hi, slot, block}; key = seed.
 */

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace risfbl {

using Philox4x32Counter = std::array<std::uint32_t, 4>;
using Philox4x32Key = std::array<std::uint32_t, 2>;

inline Philox4x32Counter philox4x32_10(Philox4x32Counter ctr, Philox4x32Key key) {
  constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
  constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
#pragma GCC unroll 10
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{m0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{m1} * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
    const auto lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
    const auto lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += w0;
    key[1] += w1;
  }
  return ctr;
}

/// Four uniforms in (0, 1) at 32-bit resolution: (k + 1/2)/2^32.
using UniformQuad = std::array<double, 4>;

/// Polar form of a circularly-symmetric complex Gaussian draw.
struct PolarSample {
  double magnitude;
  double phase; // (-π, π)
};

/// CN(0, variance) from two uniforms (Box-Muller in polar form): |z|^2 is
/// exponential with mean `variance`, arg z is uniform.
inline PolarSample complex_gaussian(double variance, double u_magnitude, double u_phase) {
  return {std::sqrt(-variance * std::log(u_magnitude)),
          std::numbers::pi * (2.0 * u_phase - 1.0)};
}

/// The random stream owned by one Monte Carlo sample.
class RandomStream {
public:
  /// Slot value reserved for the direct-link coefficient.
  static constexpr std::uint32_t direct_slot = 0xFFFFFFFFu;

  RandomStream(std::uint64_t seed, std::uint64_t sample_index)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
        sample_lo_(static_cast<std::uint32_t>(sample_index)),
        sample_hi_(static_cast<std::uint32_t>(sample_index >> 32)) {}

  UniformQuad uniforms(std::uint32_t slot, std::uint32_t block) const {
    const auto out = philox4x32_10({sample_lo_, sample_hi_, slot, block}, key_);
    return {to_unit(out[0]), to_unit(out[1]), to_unit(out[2]), to_unit(out[3])};
  }

private:
  static double to_unit(std::uint32_t bits) {
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-32;
  }

  Philox4x32Key key_;
  std::uint32_t sample_lo_;
  std::uint32_t sample_hi_;
};

} // namespace risfbl
