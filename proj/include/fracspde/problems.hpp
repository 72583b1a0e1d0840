#pragma once

// Manufactured forcing terms used by the experiments. Both drive the
// deterministic part of the equation toward u_d(x,t) = t^2 x^2 (1-x)^2:
// the fractional family pairs 2t g(x) with the Caputo derivative of t^2,
// the parabolic one (alpha = 1) with the plain t^2 g''(x) term.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "fracspde/quadrature.hpp"
#include "fracspde/spectrum.hpp"

namespace fracspde {

enum class ExampleProblem {
  frac_stochastic,       // f = 2 t g - (2 t^{1+a}/Gamma(2+a)) g''
  parabolic_stochastic,  // f = 2 t g - t^2 g''  (the alpha = 1 case)
};

inline double bump(double x) {  // g(x) = x^2 (1-x)^2
  const double y = x * (1.0 - x);
  return y * y;
}

inline double bump_laplacian(double x) {  // g''(x)
  return 2.0 - 12.0 * x + 12.0 * x * x;
}

inline double exact_deterministic(double x, double t) {
  return t * t * bump(x);
}

inline double source_value(ExampleProblem example, double alpha, double x,
                           double t) {
  if (example == ExampleProblem::parabolic_stochastic) {
    return 2.0 * t * bump(x) - t * t * bump_laplacian(x);
  }
  return 2.0 * t * bump(x) -
         2.0 * std::pow(t, 1.0 + alpha) / std::tgamma(2.0 + alpha) *
             bump_laplacian(x);
}

/// Closed-form sine coefficient A_j = (g, phi_j). Two integrations by parts
/// give (g'', phi_j) = -lambda_j A_j, so the g'' term never needs its own
/// quadrature.
inline double bump_mode_coefficient(std::size_t j) {
  if (j % 2 == 0) {
    return 0.0;
  }
  const double k = static_cast<double>(j) * std::numbers::pi;
  const double k3 = k * k * k;
  return std::numbers::sqrt2 * 2.0 * (24.0 / (k3 * k * k) - 2.0 / k3);
}

/// Modal forcing f_j(t) of the example sources against the interval basis.
inline double source_mode_value(ExampleProblem example, double alpha,
                                const EigenBasis& basis, std::size_t j,
                                double t) {
  const double a_j = bump_mode_coefficient(j);
  const double caputo_t2 =
      (example == ExampleProblem::parabolic_stochastic)
          ? t * t
          : 2.0 * std::pow(t, 1.0 + alpha) / std::tgamma(2.0 + alpha);
  return 2.0 * t * a_j + caputo_t2 * basis.eigenvalue(j) * a_j;
}

/// Table entry (n, j-1) = f_j(t_n), n = 0..steps. Row 0 is never used by the
/// stepper (zero initial data) but keeps indexing aligned with time levels.
inline std::vector<std::vector<double>> modal_source_table(
    ExampleProblem example, double alpha, const EigenBasis& basis,
    std::size_t steps, double tau) {
  std::vector<std::vector<double>> table(steps + 1,
                                         std::vector<double>(basis.modes));
  for (std::size_t n = 0; n <= steps; ++n) {
    const double t = tau * static_cast<double>(n);
    for (std::size_t j = 1; j <= basis.modes; ++j) {
      table[n][j - 1] = source_mode_value(example, alpha, basis, j, t);
    }
  }
  return table;
}

/// L2 projection of an arbitrary source onto phi_j by composite Gauss
/// quadrature, at least ten nodes per half-oscillation of the mode.
template <class F>
std::vector<double> project_modal_source(F&& f, const EigenBasis& basis,
                                         double t) {
  std::vector<double> coeffs(basis.modes);
  for (std::size_t j = 1; j <= basis.modes; ++j) {
    const auto integrand = [&](double x) { return f(x, t) * basis.eval(j, x); };
    coeffs[j - 1] = gauss10_composite(integrand, 0.0, 1.0, std::max<std::size_t>(j, 4));
  }
  return coeffs;
}

}  // namespace fracspde
