#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011) plus the
// counter-to-Gaussian map used for Brownian increments. Every draw is a
// pure function of (key, counter), which is what makes the noise paths
// reproducible under any thread count and randomly addressable.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace fracspde {

namespace detail {

inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         const std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * ctr[2];
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace detail

/// One 128-bit Philox4x32-10 block: ten rounds with the Weyl key schedule.
inline std::array<std::uint32_t, 4> philox4x32(
    std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += detail::kPhiloxW0;
      key[1] += detail::kPhiloxW1;
    }
    detail::philox_round(counter, key);
  }
  return counter;
}

namespace detail {

// Map a 64-bit word to the open interval (0,1): 53 high bits plus a half-ulp
// offset, so log() below never sees zero.
inline double uniform_open01(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

/// Standard normal draw addressed by (seed, realization, mode, step).
///
/// Frozen construction: one Philox block keyed by the seed with counter
/// (step_lo, step_hi, mode, realization); words (0,1) and (2,3) form two
/// uniforms u1, u2 on (0,1); the deviate is the Box-Muller cosine branch
/// sqrt(-2 ln u1) cos(2 pi u2).
inline double gaussian_draw(std::uint64_t seed, std::uint32_t realization,
                            std::uint32_t mode, std::uint64_t step) {
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32),
      mode, realization};
  const std::array<std::uint32_t, 2> key = {
      static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)};
  const auto block = philox4x32(counter, key);
  const std::uint64_t w01 =
      (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
  const std::uint64_t w23 =
      (static_cast<std::uint64_t>(block[3]) << 32) | block[2];
  const double u1 = detail::uniform_open01(w01);
  const double u2 = detail::uniform_open01(w23);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace fracspde
