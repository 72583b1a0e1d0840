#include "fracspde/experiments.hpp"

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

namespace {

using namespace fracspde;

TEST(ExpectedRatio, HalvingRatios) {
  EXPECT_NEAR(expected_ratio(0.5, 1), 1.682, 5e-4);
  EXPECT_NEAR(expected_ratio(1.3, 1), 1.275, 5e-4);
  EXPECT_NEAR(expected_ratio(1.0, 1), 1.414, 5e-4);
  EXPECT_DOUBLE_EQ(expected_ratio(0.5, 1), std::exp2(0.75));
  EXPECT_DOUBLE_EQ(expected_ratio(0.5, 2), std::exp2(0.5));
}

ConvergenceSetup small_setup() {
  ConvergenceSetup setup;
  setup.alpha = 0.6;
  setup.k_min = 2;
  setup.k_max = 4;
  setup.k_ref = 6;
  setup.modes = 8;
  setup.realizations = 8;
  setup.seed = 11;
  setup.epsilon = 1.0;
  setup.workers = 1;
  return setup;
}

TEST(RunConvergence, ReportInvariants) {
  const ConvergenceReport report = run_convergence(small_setup());
  ASSERT_EQ(report.tau.size(), 3u);
  ASSERT_EQ(report.ratio.size(), 2u);
  for (std::size_t l = 0; l < report.tau.size(); ++l) {
    EXPECT_DOUBLE_EQ(report.tau[l],
                     std::exp2(-static_cast<double>(report.k_min) -
                               static_cast<double>(l)));
    EXPECT_GT(report.mean_sq_error[l], 0.0);
    EXPECT_GE(report.std_error[l], 0.0);
  }
  for (std::size_t l = 0; l + 1 < report.tau.size(); ++l) {
    EXPECT_DOUBLE_EQ(report.ratio[l], report.mean_sq_error[l] /
                                          report.mean_sq_error[l + 1]);
    EXPECT_DOUBLE_EQ(report.order[l], std::log2(report.ratio[l]));
  }
}

TEST(RunConvergence, BitwiseReproducible) {
  const ConvergenceReport a = run_convergence(small_setup());
  const ConvergenceReport b = run_convergence(small_setup());
  EXPECT_EQ(a.mean_sq_error, b.mean_sq_error);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_EQ(a.ratio, b.ratio);
}

TEST(RunConvergence, WorkerCountInvariant) {
  ConvergenceSetup setup = small_setup();
  setup.realizations = 13;  // odd count, uneven split
  setup.workers = 1;
  const ConvergenceReport serial = run_convergence(setup);
  setup.workers = 3;
  const ConvergenceReport threaded = run_convergence(setup);
  EXPECT_EQ(serial.mean_sq_error, threaded.mean_sq_error);
  EXPECT_EQ(serial.std_error, threaded.std_error);
}

TEST(RunConvergence, DeterministicErrorsDecreaseStrictly) {
  ConvergenceSetup setup = small_setup();
  setup.alpha = 0.5;
  setup.epsilon = 0.0;  // exact reference, single deterministic run
  setup.k_min = 3;
  setup.k_max = 6;
  setup.modes = 16;
  const ConvergenceReport report = run_convergence(setup);
  EXPECT_EQ(report.realizations, 1u);
  for (std::size_t l = 0; l + 1 < report.tau.size(); ++l) {
    EXPECT_LT(report.mean_sq_error[l + 1], report.mean_sq_error[l]);
    // squared-error ratios of a first-order scheme sit near 4
    EXPECT_GT(report.order[l], 1.8);
  }
}

TEST(RunConvergence, StochasticErrorsDecreaseWithinTwoSigma) {
  ConvergenceSetup setup = small_setup();
  setup.realizations = 32;
  setup.k_min = 2;
  setup.k_max = 5;
  setup.k_ref = 8;
  const ConvergenceReport report = run_convergence(setup);
  for (std::size_t l = 0; l + 1 < report.tau.size(); ++l) {
    const double slack = 2.0 * std::hypot(report.std_error[l],
                                          report.std_error[l + 1]);
    EXPECT_LT(report.mean_sq_error[l + 1],
              report.mean_sq_error[l] + slack);
  }
}

TEST(RunConvergence, ReferenceLevelHasZeroError) {
  ConvergenceSetup setup = small_setup();
  setup.k_min = 4;
  setup.k_max = 6;
  setup.k_ref = 6;  // finest level coincides with the reference
  const ConvergenceReport report = run_convergence(setup);
  EXPECT_EQ(report.mean_sq_error.back(), 0.0);
  EXPECT_EQ(report.std_error.back(), 0.0);
}

TEST(RunConvergence, Validation) {
  ConvergenceSetup setup = small_setup();
  setup.k_ref = 3;  // coarser than k_max
  EXPECT_THROW(run_convergence(setup), std::invalid_argument);
  setup = small_setup();
  setup.k_min = 0;
  EXPECT_THROW(run_convergence(setup), std::invalid_argument);
}

FieldStatsSetup small_field_setup() {
  FieldStatsSetup setup;
  setup.alpha = 0.5;
  setup.cells = 16;
  setup.epsilon = 0.1;
  setup.realizations = 16;
  setup.seed = 21;
  setup.workers = 1;
  return setup;
}

TEST(RunFieldStats, ShapesAndBoundaries) {
  const FieldStats stats = run_field_stats(small_field_setup());
  ASSERT_EQ(stats.x.size(), 17u);
  ASSERT_EQ(stats.samples.size(), 3u);
  EXPECT_EQ(stats.x.front(), 0.0);
  EXPECT_EQ(stats.x.back(), 1.0);
  // Dirichlet rows are exactly zero, so are their statistics.
  EXPECT_EQ(stats.mean.front(), 0.0);
  EXPECT_EQ(stats.mean.back(), 0.0);
  EXPECT_EQ(stats.stddev.front(), 0.0);
  EXPECT_EQ(stats.stddev.back(), 0.0);
  for (const double s : stats.stddev) {
    EXPECT_GE(s, 0.0);
  }
  for (std::size_t p = 0; p < stats.x.size(); ++p) {
    EXPECT_DOUBLE_EQ(stats.exact[p],
                     exact_deterministic(stats.x[p], 1.0));
  }
}

TEST(RunFieldStats, NoiseFreeRunIsDeterministicSolve) {
  FieldStatsSetup setup = small_field_setup();
  setup.epsilon = 0.0;
  setup.realizations = 4;  // power of two keeps the mean division exact
  const FieldStats stats = run_field_stats(setup);
  for (const double s : stats.stddev) {
    EXPECT_EQ(s, 0.0);
  }
  SchemeConfig config;
  config.alpha = setup.alpha;
  config.final_time = 1.0;
  config.steps = setup.cells;
  config.kind = SpatialKind::fem;
  config.modes = setup.cells;
  config.epsilon = 0.0;
  config.source = [&](double x, double t) {
    return source_value(ExampleProblem::frac_stochastic, setup.alpha, x, t);
  };
  const Trajectory det = solve_fem(config, nullptr);
  const auto last = det.row(setup.cells);
  for (std::size_t p = 0; p < stats.x.size(); ++p) {
    EXPECT_EQ(stats.mean[p], last[p]);
  }
}

TEST(RunFieldStats, MeanTracksDeterministicSolveUnderNoise) {
  FieldStatsSetup setup = small_field_setup();
  setup.realizations = 400;
  const FieldStats stats = run_field_stats(setup);
  SchemeConfig config;
  config.alpha = setup.alpha;
  config.final_time = 1.0;
  config.steps = setup.cells;
  config.kind = SpatialKind::fem;
  config.modes = setup.cells;
  config.epsilon = 0.0;
  config.source = [&](double x, double t) {
    return source_value(ExampleProblem::frac_stochastic, setup.alpha, x, t);
  };
  const Trajectory det = solve_fem(config, nullptr);
  const auto last = det.row(setup.cells);
  double max_gap = 0.0;
  double max_std = 0.0;
  for (std::size_t p = 0; p < stats.x.size(); ++p) {
    max_gap = std::max(max_gap, std::abs(stats.mean[p] - last[p]));
    max_std = std::max(max_std, stats.stddev[p]);
  }
  EXPECT_LE(max_gap,
            5.0 * max_std / std::sqrt(static_cast<double>(setup.realizations)));
}

TEST(RunFieldStats, WorkerCountInvariant) {
  FieldStatsSetup setup = small_field_setup();
  setup.workers = 1;
  const FieldStats serial = run_field_stats(setup);
  setup.workers = 4;
  const FieldStats threaded = run_field_stats(setup);
  EXPECT_EQ(serial.mean, threaded.mean);
  EXPECT_EQ(serial.stddev, threaded.stddev);
}

}  // namespace
