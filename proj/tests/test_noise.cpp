#include "fracspde/noise.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include <gtest/gtest.h>

#include "fracspde/philox.hpp"

namespace {

using fracspde::coarsen;
using fracspde::gaussian_draw;
using fracspde::generate_paths;
using fracspde::NoisePaths;
using fracspde::philox4x32;

TEST(Philox, Random123KnownAnswers) {
  // Published test vectors for philox4x32-10.
  const auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(zero[0], 0x6627e8d5u);
  EXPECT_EQ(zero[1], 0xe169c58du);
  EXPECT_EQ(zero[2], 0xbc57ac4cu);
  EXPECT_EQ(zero[3], 0x9b00dbd8u);
  const auto ones = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu,
                                0xffffffffu},
                               {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(ones[0], 0x408f276du);
  EXPECT_EQ(ones[1], 0x41c83b0eu);
  EXPECT_EQ(ones[2], 0xa20bc7c6u);
  EXPECT_EQ(ones[3], 0x6d5451fdu);
  const auto pi = philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu,
                              0x03707344u},
                             {0xa4093822u, 0x299f31d0u});
  EXPECT_EQ(pi[0], 0xd16cfe09u);
  EXPECT_EQ(pi[1], 0x94fdccebu);
  EXPECT_EQ(pi[2], 0x5001e420u);
  EXPECT_EQ(pi[3], 0x24126ea1u);
}

TEST(NoisePaths, DeterministicAcrossCalls) {
  const NoisePaths a = generate_paths(1234, 7, 5, 64, 0.015625);
  const NoisePaths b = generate_paths(1234, 7, 5, 64, 0.015625);
  ASSERT_EQ(a.data.size(), b.data.size());
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    EXPECT_EQ(a.data[i], b.data[i]);
  }
  const NoisePaths c = generate_paths(1235, 7, 5, 64, 0.015625);
  EXPECT_NE(a.data, c.data);
}

TEST(NoisePaths, EntriesAreRandomAccessible) {
  // Any single increment regenerates bitwise from its address tuple.
  const double tau = 0.03125;
  const NoisePaths paths = generate_paths(99, 3, 4, 32, tau);
  const double scale = std::sqrt(tau);
  for (const auto [j, n] : {std::pair<std::size_t, std::size_t>{0, 0},
                            {3, 31},
                            {2, 17},
                            {1, 5}}) {
    EXPECT_EQ(paths.increment(j, n),
              scale * gaussian_draw(99, 3, static_cast<std::uint32_t>(j), n));
  }
}

TEST(NoisePaths, IncrementStatistics) {
  // 1e5 draws: mean within 4 sqrt(tau/K), variance within 5% of tau.
  const double tau = 1e-3;
  const std::size_t modes = 10;
  const std::size_t steps = 10000;
  const NoisePaths paths = generate_paths(2718, 0, modes, steps, tau);
  const auto count = static_cast<double>(modes * steps);
  double sum = 0.0;
  double sq = 0.0;
  for (const double v : paths.data) {
    sum += v;
    sq += v * v;
  }
  const double mean = sum / count;
  const double var = sq / count - mean * mean;
  EXPECT_LE(std::abs(mean), 4.0 * std::sqrt(tau / count));
  EXPECT_NEAR(var, tau, 0.05 * tau);
}

TEST(NoisePaths, ModesAreUncorrelated) {
  const std::size_t steps = 10000;
  const NoisePaths paths = generate_paths(31415, 0, 3, steps, 1.0);
  const auto corr = [&](std::size_t a, std::size_t b) {
    double acc = 0.0;
    for (std::size_t n = 0; n < steps; ++n) {
      acc += paths.increment(a, n) * paths.increment(b, n);
    }
    return acc / static_cast<double>(steps);
  };
  const double bound = 4.0 / std::sqrt(static_cast<double>(steps));
  EXPECT_LE(std::abs(corr(0, 1)), bound);
  EXPECT_LE(std::abs(corr(0, 2)), bound);
  EXPECT_LE(std::abs(corr(1, 2)), bound);
}

TEST(Coarsen, FactorOneIsIdentity) {
  const NoisePaths paths = generate_paths(5, 0, 3, 16, 0.0625);
  const NoisePaths same = coarsen(paths, 1);
  EXPECT_EQ(same.data, paths.data);
  EXPECT_EQ(same.tau, paths.tau);
  EXPECT_EQ(same.steps, paths.steps);
}

TEST(Coarsen, FullFactorGivesEndpointDisplacement) {
  const NoisePaths paths = generate_paths(6, 1, 2, 32, 0.03125);
  const NoisePaths total = coarsen(paths, 32);
  ASSERT_EQ(total.steps, 1u);
  EXPECT_DOUBLE_EQ(total.tau, 1.0);
  // The single increment is W(T) - W(0); pairwise summation reproduces it.
  for (std::size_t j = 0; j < paths.modes; ++j) {
    std::vector<double> level(paths.mode_row(j).begin(),
                              paths.mode_row(j).end());
    while (level.size() > 1) {
      std::vector<double> next(level.size() / 2);
      for (std::size_t m = 0; m < next.size(); ++m) {
        next[m] = level[2 * m] + level[2 * m + 1];
      }
      level = next;
    }
    EXPECT_EQ(total.increment(j, 0), level[0]);
  }
}

TEST(Coarsen, ComposesBitwise) {
  const NoisePaths paths = generate_paths(7, 2, 4, 64, 0.015625);
  const NoisePaths two_then_two = coarsen(coarsen(paths, 2), 2);
  const NoisePaths four = coarsen(paths, 4);
  EXPECT_EQ(two_then_two.data, four.data);
  EXPECT_EQ(two_then_two.tau, four.tau);
}

TEST(Coarsen, TelescopesBitwise) {
  // Total displacement agrees bitwise between fine and coarse grids.
  const NoisePaths paths = generate_paths(8, 0, 3, 128, 2.0 / 128.0);
  const NoisePaths coarse = coarsen(paths, 8);
  const NoisePaths total_fine = coarsen(paths, 128);
  const NoisePaths total_coarse = coarsen(coarse, 16);
  EXPECT_EQ(total_fine.data, total_coarse.data);
}

TEST(Coarsen, RejectsBadFactors) {
  const NoisePaths paths = generate_paths(9, 0, 1, 12, 0.25);
  EXPECT_THROW(coarsen(paths, 3), std::invalid_argument);   // not a power of 2
  EXPECT_THROW(coarsen(paths, 8), std::invalid_argument);   // does not divide
  EXPECT_THROW(coarsen(paths, 0), std::invalid_argument);
  EXPECT_NO_THROW(coarsen(paths, 4));  // 12/4 = 3 is fine
}

TEST(GeneratePaths, ValidatesArguments) {
  EXPECT_THROW(generate_paths(1, 0, 0, 4, 0.1), std::invalid_argument);
  EXPECT_THROW(generate_paths(1, 0, 4, 0, 0.1), std::invalid_argument);
  EXPECT_THROW(generate_paths(1, 0, 4, 4, 0.0), std::invalid_argument);
}

}  // namespace
