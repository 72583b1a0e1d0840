#include "fracspde/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

namespace {

using fracspde::eval_basis;
using fracspde::interval_basis;
using fracspde::li_yau_bound;

constexpr double kPi = std::numbers::pi;

TEST(IntervalBasis, EigenvaluesAreSineSquares) {
  const auto basis = interval_basis(3);
  EXPECT_NEAR(basis.eigenvalue(1), kPi * kPi, 1e-12);
  EXPECT_NEAR(basis.eigenvalue(3), 9.0 * kPi * kPi, 1e-11);
  for (std::size_t j = 2; j <= basis.modes; ++j) {
    EXPECT_LT(basis.eigenvalue(j - 1), basis.eigenvalue(j));
  }
  EXPECT_THROW(interval_basis(0), std::invalid_argument);
}

TEST(IntervalBasis, ClosedFormPointValues) {
  const auto basis = interval_basis(4);
  EXPECT_NEAR(basis.eval(2, 0.25), std::numbers::sqrt2, 1e-14);
  EXPECT_NEAR(basis.eval(2, 0.5), 0.0, 1e-14);
  for (std::size_t j = 1; j <= 4; ++j) {
    EXPECT_EQ(basis.eval(j, 0.0), 0.0);
    EXPECT_NEAR(basis.eval(j, 1.0), 0.0, 1e-13);  // sin(j pi) to roundoff
  }
}

TEST(IntervalBasis, UnitNormsUnderQuadrature) {
  // Composite Simpson of phi_j^2 over (0,1) must give 1 to 1e-8.
  const auto basis = interval_basis(16);
  const std::size_t intervals = 4096;
  const double h = 1.0 / static_cast<double>(intervals);
  for (std::size_t j = 1; j <= basis.modes; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i <= intervals; ++i) {
      const double v = basis.eval(j, h * static_cast<double>(i));
      const double w = (i == 0 || i == intervals) ? 1.0
                       : (i % 2 == 1)             ? 4.0
                                                  : 2.0;
      acc += w * v * v;
    }
    acc *= h / 3.0;
    EXPECT_NEAR(acc, 1.0, 1e-8) << "mode " << j;
  }
}

TEST(IntervalBasis, SimpsonGramMatrixIsIdentity) {
  const std::size_t modes = 128;
  const auto basis = interval_basis(modes);
  const std::size_t intervals = 8 * modes;  // >= 8M points
  const double h = 1.0 / static_cast<double>(intervals);
  std::vector<std::vector<double>> samples(intervals + 1,
                                           std::vector<double>(modes));
  for (std::size_t i = 0; i <= intervals; ++i) {
    for (std::size_t j = 1; j <= modes; ++j) {
      samples[i][j - 1] = basis.eval(j, h * static_cast<double>(i));
    }
  }
  for (std::size_t a = 0; a < modes; ++a) {
    for (std::size_t b = a; b < modes; ++b) {
      double acc = 0.0;
      for (std::size_t i = 0; i <= intervals; ++i) {
        const double w = (i == 0 || i == intervals) ? 1.0
                         : (i % 2 == 1)             ? 4.0
                                                    : 2.0;
        acc += w * samples[i][a] * samples[i][b];
      }
      acc *= h / 3.0;
      EXPECT_NEAR(acc, a == b ? 1.0 : 0.0, 1e-6) << "(" << a << "," << b << ")";
    }
  }
}

TEST(LiYau, ClosedFormsPerDimension) {
  // d=1: C_1 = (2 pi)^2 / 4 = pi^2, bound = pi^2/3 j^2
  EXPECT_NEAR(li_yau_bound(1, 1.0, 1), kPi * kPi / 3.0, 1e-12);
  // d=2: C_2 = (2 pi)^2 / pi = 4 pi, bound = 2 pi j
  EXPECT_NEAR(li_yau_bound(2, 1.0, 1), 2.0 * kPi, 1e-12);
  // d=3: C_3 = (2 pi)^2 (4 pi/3)^{-2/3}, bound = (3/5) C_3 j^{2/3}
  const double c3 = 4.0 * kPi * kPi * std::pow(4.0 * kPi / 3.0, -2.0 / 3.0);
  EXPECT_NEAR(li_yau_bound(3, 1.0, 2), 0.6 * c3 * std::pow(2.0, 2.0 / 3.0),
              1e-12);
  EXPECT_THROW(li_yau_bound(4, 1.0, 1), std::invalid_argument);
  EXPECT_THROW(li_yau_bound(1, 0.0, 1), std::invalid_argument);
  EXPECT_THROW(li_yau_bound(1, 1.0, 0), std::invalid_argument);
}

TEST(LiYau, BoundToEigenvalueRatioIsOneThird) {
  const auto basis = interval_basis(512);
  for (std::size_t j = 1; j <= 512; ++j) {
    const double bound = li_yau_bound(1, 1.0, j);
    EXPECT_NEAR(bound / basis.eigenvalue(j), 1.0 / 3.0, 1e-12);
    EXPECT_GE(basis.eigenvalue(j), bound);
  }
}

TEST(EvalBasis, MatrixEntriesAndRangeCheck) {
  const auto basis = interval_basis(3);
  const std::vector<double> grid = {0.0, 0.25, 0.5, 1.0};
  const auto values = eval_basis(basis, grid);
  ASSERT_EQ(values.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t j = 1; j <= 3; ++j) {
      EXPECT_DOUBLE_EQ(values[i][j - 1], basis.eval(j, grid[i]));
    }
  }
  const std::vector<double> bad = {-0.1};
  EXPECT_THROW(eval_basis(basis, bad), std::invalid_argument);
  const std::vector<double> bad2 = {1.5};
  EXPECT_THROW(eval_basis(basis, bad2), std::invalid_argument);
}

}  // namespace
