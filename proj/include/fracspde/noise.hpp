#pragma once

// Truncated cylindrical-Wiener increments on a fine uniform time grid,
// with power-of-two coarsening that keeps coarse and fine solves on the
// same Brownian sample.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracspde/philox.hpp"

namespace fracspde {

struct NoisePaths {
  std::uint64_t seed = 0;
  std::uint32_t realization = 0;
  std::size_t modes = 0;       // M
  std::size_t steps = 0;       // number of increments per mode
  double tau = 0.0;            // step of this grid
  std::vector<double> data;    // row-major [mode][step]

  // increment (j, n) = W_j(t_{n+1}) - W_j(t_n), zero-based indices
  double increment(std::size_t mode, std::size_t step) const {
    return data[mode * steps + step];
  }
  std::span<const double> mode_row(std::size_t mode) const {
    return {data.data() + mode * steps, steps};
  }
};

/// Fine-grid increments; entry (j, n) is N(0, tau_fine), a deterministic
/// function of (seed, realization, j, n) alone.
inline NoisePaths generate_paths(std::uint64_t seed, std::uint32_t realization,
                                 std::size_t modes, std::size_t n_fine,
                                 double tau_fine) {
  if (modes < 1 || n_fine < 1) {
    throw std::invalid_argument("generate_paths: need modes >= 1, steps >= 1");
  }
  if (!(tau_fine > 0.0)) {
    throw std::invalid_argument("generate_paths: tau_fine must be > 0");
  }
  NoisePaths paths;
  paths.seed = seed;
  paths.realization = realization;
  paths.modes = modes;
  paths.steps = n_fine;
  paths.tau = tau_fine;
  paths.data.resize(modes * n_fine);
  const double scale = std::sqrt(tau_fine);
  for (std::size_t j = 0; j < modes; ++j) {
    for (std::size_t n = 0; n < n_fine; ++n) {
      paths.data[j * n_fine + n] =
          scale * gaussian_draw(seed, realization,
                                static_cast<std::uint32_t>(j), n);
    }
  }
  return paths;
}

/// Sum groups of `factor` fine increments into coarse ones. Implemented as
/// repeated pairwise halving, so coarsen(coarsen(p,2),2) == coarsen(p,4)
/// bitwise and sums telescope exactly across levels.
inline NoisePaths coarsen(const NoisePaths& paths, std::size_t factor) {
  if (factor == 0 || !std::has_single_bit(factor)) {
    throw std::invalid_argument("coarsen: factor must be a power of two");
  }
  if (paths.steps % factor != 0) {
    throw std::invalid_argument("coarsen: factor must divide the step count");
  }
  NoisePaths out = paths;
  while (factor > 1) {
    const std::size_t half = out.steps / 2;
    std::vector<double> next(out.modes * half);
    for (std::size_t j = 0; j < out.modes; ++j) {
      const double* src = out.data.data() + j * out.steps;
      double* dst = next.data() + j * half;
      for (std::size_t m = 0; m < half; ++m) {
        dst[m] = src[2 * m] + src[2 * m + 1];
      }
    }
    out.data = std::move(next);
    out.steps = half;
    out.tau *= 2.0;
    factor /= 2;
  }
  return out;
}

}  // namespace fracspde
