#pragma once

// Dirichlet-Laplacian eigenpairs on the unit interval and the Li-Yau
// eigenvalue lower bound.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace fracspde {

struct EigenBasis {
  std::size_t modes = 0;           // number of retained modes M
  std::vector<double> eigenvalues; // lambda_j = (j pi)^2, j = 1..M
  double length = 1.0;             // domain is (0, length), fixed at 1

  double eigenvalue(std::size_t j) const { return eigenvalues[j - 1]; }

  // phi_j(x) = sqrt(2) sin(j pi x), unit L2 norm on (0,1)
  double eval(std::size_t j, double x) const {
    return std::numbers::sqrt2 *
           std::sin(static_cast<double>(j) * std::numbers::pi * x);
  }
};

inline EigenBasis interval_basis(std::size_t modes) {
  if (modes < 1) {
    throw std::invalid_argument("interval_basis: need at least one mode");
  }
  EigenBasis basis;
  basis.modes = modes;
  basis.eigenvalues.resize(modes);
  for (std::size_t j = 1; j <= modes; ++j) {
    const double jpi = static_cast<double>(j) * std::numbers::pi;
    basis.eigenvalues[j - 1] = jpi * jpi;
  }
  return basis;
}

/// Lower bound lambda_j >= C_d d/(d+2) j^{2/d} |O|^{-2/d} with
/// C_d = (2 pi)^2 B_d^{-2/d}, B_d the volume of the unit d-ball.
inline double li_yau_bound(int d, double volume, std::size_t j) {
  if (d < 1 || d > 3) {
    throw std::invalid_argument("li_yau_bound: dimension must be 1, 2, or 3");
  }
  if (!(volume > 0.0)) {
    throw std::invalid_argument("li_yau_bound: volume must be > 0");
  }
  if (j < 1) {
    throw std::invalid_argument("li_yau_bound: index must be >= 1");
  }
  constexpr double pi = std::numbers::pi;
  const double ball_volume = (d == 1) ? 2.0 : (d == 2) ? pi : 4.0 * pi / 3.0;
  const double dd = static_cast<double>(d);
  const double c_d = 4.0 * pi * pi * std::pow(ball_volume, -2.0 / dd);
  return c_d * dd / (dd + 2.0) * std::pow(static_cast<double>(j), 2.0 / dd) *
         std::pow(volume, -2.0 / dd);
}

/// Matrix of basis values, entry (i, j-1) = phi_j(x_i).
inline std::vector<std::vector<double>> eval_basis(
    const EigenBasis& basis, std::span<const double> x_grid) {
  std::vector<std::vector<double>> values(x_grid.size(),
                                          std::vector<double>(basis.modes));
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    if (!(x_grid[i] >= 0.0 && x_grid[i] <= 1.0)) {
      throw std::invalid_argument("eval_basis: grid point outside [0,1]");
    }
    for (std::size_t j = 1; j <= basis.modes; ++j) {
      values[i][j - 1] = basis.eval(j, x_grid[i]);
    }
  }
  return values;
}

}  // namespace fracspde
