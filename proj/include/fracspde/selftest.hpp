#pragma once

// Built-in property suite behind the `selftest` subcommand: structural
// identities whose failure would invalidate every experiment. Each group
// checks the library against an independent route (direct binomial sums,
// generating functions, dense linear algebra, a separately written heat
// stepper, analytic variance).

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "fracspde/cq.hpp"
#include "fracspde/mild.hpp"
#include "fracspde/noise.hpp"
#include "fracspde/problems.hpp"
#include "fracspde/spectrum.hpp"
#include "fracspde/stepper.hpp"

namespace fracspde {

struct SelftestResult {
  std::string group;
  bool passed = false;
  std::string detail;
};

namespace selftest_detail {

// Binomial route to the weights: b_j = (-1)^j C(1-alpha, j), evaluated in
// extended precision straight from log-Gamma.
inline double binomial_weight(double alpha, std::size_t j) {
  if (j == 0) {
    return 1.0;
  }
  const long double g = 1.0L - static_cast<long double>(alpha);
  // (-1)^j C(g, j) = prod_{m=1..j} (m - 1 - g)/m
  long double value = 1.0L;
  for (std::size_t m = 1; m <= j; ++m) {
    value *= (static_cast<long double>(m) - 1.0L - g) /
             static_cast<long double>(m);
  }
  return static_cast<double>(value);
}

// Partial sum of the alpha-weights via log-Gamma: sum_{j<=n} b_j is the
// n-th coefficient of (1-z)^{-alpha}... shifted family (1-z)^{(1-alpha)-1}.
inline double partial_sum_reference(double alpha, std::size_t n) {
  // coefficient of z^n in (1-z)^{g-1}, g = 1-alpha: Gamma(n+1-g)/(Gamma(1-g) n!)
  const long double g = 1.0L - static_cast<long double>(alpha);
  const long double lg = std::lgamma(static_cast<long double>(n) + 1.0L - g) -
                         std::lgamma(1.0L - g) -
                         std::lgamma(static_cast<long double>(n) + 1.0L);
  return static_cast<double>(std::exp(lg));
}

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

// Dense Gaussian elimination with partial pivoting; the independent route
// for the coupled space-time system.
inline std::vector<double> dense_solve(std::vector<std::vector<double>> a,
                                       std::vector<double> rhs) {
  const std::size_t n = rhs.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) {
        piv = r;
      }
    }
    std::swap(a[col], a[piv]);
    std::swap(rhs[col], rhs[piv]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double m = a[r][col] / a[col][col];
      if (m == 0.0) {
        continue;
      }
      for (std::size_t c = col; c < n; ++c) {
        a[r][c] -= m * a[col][c];
      }
      rhs[r] -= m * rhs[col];
    }
  }
  std::vector<double> x(n);
  for (std::size_t r = n; r-- > 0;) {
    double acc = rhs[r];
    for (std::size_t c = r + 1; c < n; ++c) {
      acc -= a[r][c] * x[c];
    }
    x[r] = acc / a[r][r];
  }
  return x;
}

// Classic backward-Euler stepper for u_t - u_xx = f + noise, written from
// the textbook formula with its own assembly and elimination; the alpha = 1
// scheme must reproduce it step for step.
inline std::vector<std::vector<double>> backward_euler_heat(
    std::size_t cells, std::size_t steps, double final_time,
    const std::function<double(double, double)>& f, double epsilon,
    const NoisePaths* paths) {
  const double h = 1.0 / static_cast<double>(cells);
  const double tau = final_time / static_cast<double>(steps);
  const std::size_t m = cells - 1;
  std::vector<std::vector<double>> u(steps + 1, std::vector<double>(m, 0.0));

  const double diag = 4.0 * h / 6.0 + tau * 2.0 / h;
  const double off = h / 6.0 - tau / h;
  std::vector<double> noise_proj;
  if (paths != nullptr) {
    noise_proj.resize(m * paths->modes);
    for (std::size_t i = 1; i <= m; ++i) {
      for (std::size_t j = 1; j <= paths->modes; ++j) {
        const double k = static_cast<double>(j) * std::numbers::pi;
        const double s = std::sin(0.5 * k * h);
        noise_proj[(i - 1) * paths->modes + (j - 1)] =
            std::numbers::sqrt2 * 4.0 * s * s / (k * k * h) *
            std::sin(k * h * static_cast<double>(i));
      }
    }
  }
  for (std::size_t n = 1; n <= steps; ++n) {
    const double t_n = tau * static_cast<double>(n);
    std::vector<double> rhs(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double left = (i > 0) ? u[n - 1][i - 1] : 0.0;
      const double right = (i + 1 < m) ? u[n - 1][i + 1] : 0.0;
      rhs[i] = h / 6.0 * (left + 4.0 * u[n - 1][i] + right);
    }
    for (std::size_t i = 0; i < m; ++i) {
      const double x_i = h * static_cast<double>(i + 1);
      // Simpson on each adjacent element, exact enough only for smooth f;
      // the comparison run uses the same Gauss rule as the solver instead.
      double load = 0.0;
      for (int half = 0; half < 2; ++half) {
        const double x_left = x_i + (half == 0 ? -h : 0.0);
        for (std::size_t q = 0; q < kGauss3Nodes.size(); ++q) {
          const double xi = 0.5 * (kGauss3Nodes[q] + 1.0);
          const double x = x_left + h * xi;
          const double w = 0.5 * h * kGauss3Weights[q];
          const double shape = (half == 0) ? xi : 1.0 - xi;
          load += f(x, t_n) * shape * w;
        }
      }
      rhs[i] += tau * load;
      if (paths != nullptr) {
        double g = 0.0;
        for (std::size_t j = 0; j < paths->modes; ++j) {
          g += paths->increment(j, n - 1) * noise_proj[i * paths->modes + j];
        }
        rhs[i] += epsilon * g;
      }
    }
    // Thomas elimination, written out again on purpose.
    std::vector<double> c(m), d(m);
    c[0] = off / diag;
    d[0] = rhs[0] / diag;
    for (std::size_t i = 1; i < m; ++i) {
      const double denom = diag - off * c[i - 1];
      c[i] = off / denom;
      d[i] = (rhs[i] - off * d[i - 1]) / denom;
    }
    u[n][m - 1] = d[m - 1];
    for (std::size_t i = m - 1; i-- > 0;) {
      u[n][i] = d[i] - c[i] * u[n][i + 1];
    }
  }
  return u;
}

}  // namespace selftest_detail

/// Weight identities: recurrence vs direct binomial, alpha = 1 collapse,
/// partial-sum limit, and the generating-function identity
/// sum d_n z^n = ((1-z)/tau)^{1-alpha} v~(z).
inline SelftestResult selftest_weights() {
  using namespace selftest_detail;
  SelftestResult r{"weights", true, ""};
  std::ostringstream msg;

  for (double alpha = 0.1; alpha < 1.95; alpha += 0.1) {
    const CqWeights w = cq_weights(alpha, 50);
    for (std::size_t j = 0; j <= 50; ++j) {
      if (!close_rel(w.b[j], binomial_weight(alpha, j), 1e-12)) {
        r.passed = false;
        msg << "recurrence/binomial mismatch at alpha=" << alpha << " j=" << j
            << "; ";
      }
    }
  }

  const CqWeights w1 = cq_weights(1.0, 64);
  for (std::size_t j = 1; j <= 64; ++j) {
    if (w1.b[j] != 0.0) {
      r.passed = false;
      msg << "alpha=1 weight b_" << j << " not exactly zero; ";
    }
  }

  const CqWeights wh = cq_weights(0.5, 10000);
  double partial = 0.0;
  for (const double b : wh.b) {
    partial += b;
  }
  if (!(partial > 0.0) || partial > 1e-2 ||
      !close_rel(partial, partial_sum_reference(0.5, 10000), 1e-9)) {
    r.passed = false;
    msg << "partial sum of alpha=0.5 weights off (" << partial << "); ";
  }

  const double tau = 0.25;
  const std::vector<double> v = {0.3, -1.2, 2.0, 0.7, -0.5};
  for (const double alpha : {0.5, 1.3}) {
    const CqWeights w = cq_weights(alpha, 800);
    std::vector<double> vv(801, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) {
      vv[i] = v[i];
    }
    const std::vector<double> d = discrete_frac_derivative(vv, w, tau);
    for (const std::complex<double> zeta :
         {std::complex<double>(0.9, 0.0), std::complex<double>(-0.9, 0.0),
          std::complex<double>(0.45, 0.6)}) {
      std::complex<double> dsum = 0.0, vsum = 0.0, zp = 1.0;
      for (std::size_t n = 0; n < d.size(); ++n) {
        dsum += d[n] * zp;
        if (n < v.size()) {
          vsum += v[n] * zp;
        }
        zp *= zeta;
      }
      const std::complex<double> rhs =
          std::pow((1.0 - zeta) / tau, 1.0 - alpha) * vsum;
      if (std::abs(dsum - rhs) > 1e-10 * std::abs(rhs)) {
        r.passed = false;
        msg << "generating-function identity off at alpha=" << alpha << "; ";
      }
    }
  }

  r.detail = r.passed ? "recurrence, collapse, partial sums, generating function"
                      : msg.str();
  return r;
}

/// Kernel mutual oracle: contour inversion against the Mittag-Leffler
/// composition over the full (alpha, lambda, t) grid, absolute 1e-8.
inline SelftestResult selftest_mutual_oracle() {
  SelftestResult r{"mutual-oracle", true, ""};
  double worst = 0.0;
  for (const double alpha : {0.3, 0.5, 1.0, 1.3, 1.7}) {
    for (const double lambda :
         {std::numbers::pi * std::numbers::pi,
          16.0 * std::numbers::pi * std::numbers::pi,
          1024.0 * std::numbers::pi * std::numbers::pi}) {
      for (const double t : {0.01, 0.1, 1.0}) {
        ContourConfig cfg = contour_defaults(alpha, t);
        const double via_contour = kernel_contour(alpha, lambda, t, cfg);
        const double via_ml =
            mittag_leffler(alpha, -lambda * std::pow(t, alpha));
        worst = std::max(worst, std::abs(via_contour - via_ml));
      }
    }
  }
  r.passed = worst <= 1e-8;
  std::ostringstream msg;
  msg << "max |contour - ML| = " << worst;
  r.detail = msg.str();
  return r;
}

/// Per-mode recurrence against a dense solve of the coupled space-time
/// system (M <= 8, N <= 16), relative 1e-12.
inline SelftestResult selftest_modal_vs_dense() {
  using namespace selftest_detail;
  SelftestResult r{"modal-vs-dense", true, ""};
  double worst = 0.0;
  for (const double alpha : {0.5, 1.3}) {
    const std::size_t modes = 4;
    const std::size_t steps = 8;
    const double tau = 0.125;
    const EigenBasis basis = interval_basis(modes);
    const CqWeights w = cq_weights(alpha, steps);
    const double tau_a = std::pow(tau, alpha);

    // deterministic synthetic forcing and increments
    const auto forcing = [](std::size_t n, std::size_t j) {
      return std::sin(1.7 * static_cast<double>(n) +
                      0.9 * static_cast<double>(j));
    };
    const auto incr = [](std::size_t n, std::size_t j) {
      return 0.05 * std::cos(2.3 * static_cast<double>(n) -
                             1.1 * static_cast<double>(j));
    };

    // route 1: per-mode recurrence
    std::vector<std::vector<double>> um(modes,
                                        std::vector<double>(steps + 1, 0.0));
    for (std::size_t j = 1; j <= modes; ++j) {
      for (std::size_t n = 1; n <= steps; ++n) {
        um[j - 1][n] =
            step_modal({um[j - 1].data(), n}, basis.eigenvalue(j), w, tau,
                       forcing(n, j), incr(n, j));
      }
    }

    // route 2: one dense linear system for all unknowns u_{n,j}
    const std::size_t dim = modes * steps;
    std::vector<std::vector<double>> a(dim, std::vector<double>(dim, 0.0));
    std::vector<double> rhs(dim, 0.0);
    const auto id = [&](std::size_t n, std::size_t j) {
      return (n - 1) * modes + (j - 1);
    };
    for (std::size_t n = 1; n <= steps; ++n) {
      for (std::size_t j = 1; j <= modes; ++j) {
        const std::size_t row = id(n, j);
        const double lambda = basis.eigenvalue(j);
        a[row][id(n, j)] = 1.0 + tau_a * w.b[0] * lambda;
        if (n > 1) {
          a[row][id(n - 1, j)] -= 1.0;
        }
        for (std::size_t k = 1; k < n; ++k) {
          a[row][id(k, j)] += tau_a * lambda * w.b[n - k];
        }
        rhs[row] = tau * forcing(n, j) + incr(n, j);
      }
    }
    const std::vector<double> x = dense_solve(a, rhs);
    for (std::size_t n = 1; n <= steps; ++n) {
      for (std::size_t j = 1; j <= modes; ++j) {
        const double agreed = um[j - 1][n];
        const double dense = x[id(n, j)];
        worst = std::max(worst, std::abs(agreed - dense) /
                                    std::max({std::abs(agreed),
                                              std::abs(dense), 1e-30}));
      }
    }
  }
  r.passed = worst <= 1e-12;
  std::ostringstream msg;
  msg << "max relative gap recurrence vs dense = " << worst;
  r.detail = msg.str();
  return r;
}

/// The alpha = 1 scheme against the separately written classic
/// backward-Euler heat stepper, step for step, relative 1e-14.
inline SelftestResult selftest_alpha1_reduction() {
  using namespace selftest_detail;
  SelftestResult r{"alpha1-reduction", true, ""};
  const std::size_t cells = 16;
  const std::size_t steps = 16;

  SchemeConfig config;
  config.alpha = 1.0;
  config.final_time = 1.0;
  config.steps = steps;
  config.kind = SpatialKind::fem;
  config.modes = cells;
  config.epsilon = 0.1;
  config.source = [](double x, double t) {
    return source_value(ExampleProblem::parabolic_stochastic, 1.0, x, t);
  };
  const NoisePaths paths =
      generate_paths(2024, 0, cells, steps, config.tau());
  const Trajectory traj = solve_fem(config, &paths);
  const auto be = backward_euler_heat(cells, steps, 1.0, config.source,
                                      config.epsilon, &paths);

  double worst = 0.0;
  for (std::size_t n = 1; n <= steps; ++n) {
    const auto row = traj.row(n);
    double gap = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i + 1 < cells; ++i) {
      gap = std::max(gap, std::abs(row[i + 1] - be[n][i]));
      scale = std::max({scale, std::abs(row[i + 1]), std::abs(be[n][i])});
    }
    worst = std::max(worst, gap / std::max(scale, 1e-30));
  }
  r.passed = worst <= 1e-14;
  std::ostringstream msg;
  msg << "max per-step relative gap CQ(alpha=1) vs BE = " << worst;
  r.detail = msg.str();
  return r;
}

/// One-step noise variance: Monte Carlo mean of ||u_1||^2 against the
/// analytic sum tau (1 + tau^a b0 lambda_j)^-2, within five standard errors.
inline SelftestResult selftest_noise_variance() {
  using namespace selftest_detail;
  SelftestResult r{"noise-variance", true, ""};
  std::ostringstream msg;
  const std::size_t modes = 64;
  const std::size_t trials = 10000;
  const EigenBasis basis = interval_basis(modes);
  for (const double alpha : {0.5, 1.3}) {
    for (const double tau : {std::exp2(-4), std::exp2(-6)}) {
      const double tau_a = std::pow(tau, alpha);
      double analytic = 0.0;
      for (std::size_t j = 1; j <= modes; ++j) {
        const double c = 1.0 + tau_a * basis.eigenvalue(j);
        analytic += tau / (c * c);
      }
      SchemeConfig config;
      config.alpha = alpha;
      config.final_time = tau;
      config.steps = 1;
      config.kind = SpatialKind::modal;
      config.modes = modes;
      config.epsilon = 1.0;
      double mean = 0.0, sq_sum = 0.0;
      for (std::size_t i = 0; i < trials; ++i) {
        const NoisePaths paths = generate_paths(
            7010, static_cast<std::uint32_t>(i), modes, 1, tau);
        const Trajectory traj = solve_modal(config, basis, &paths, nullptr);
        const double norm = l2_norm(traj, 1);
        mean += norm * norm;
        sq_sum += norm * norm * norm * norm;
      }
      mean /= static_cast<double>(trials);
      const double var =
          (sq_sum / static_cast<double>(trials) - mean * mean) *
          static_cast<double>(trials) / static_cast<double>(trials - 1);
      const double se = std::sqrt(var / static_cast<double>(trials));
      const double gap = std::abs(mean - analytic);
      if (gap > 5.0 * se) {
        r.passed = false;
      }
      msg << "(a=" << alpha << ",tau=" << tau << "): |mc-analytic|/se="
          << gap / se << " ";
    }
  }
  r.detail = msg.str();
  return r;
}

inline std::vector<SelftestResult> run_selftest() {
  return {selftest_weights(), selftest_mutual_oracle(),
          selftest_modal_vs_dense(), selftest_alpha1_reduction(),
          selftest_noise_variance()};
}

}  // namespace fracspde
