#pragma once

// Backward-Euler convolution-quadrature time stepping for
//   du/dt - Laplacian d^{1-alpha}/dt^{1-alpha} u = f + eps dW/dt
// on (0,1) with zero Dirichlet data and zero initial condition, in either
// the spectral (per-mode scalar recurrence) or P1 finite-element form.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "fracspde/cq.hpp"
#include "fracspde/noise.hpp"
#include "fracspde/quadrature.hpp"
#include "fracspde/spectrum.hpp"

namespace fracspde {

enum class SpatialKind { modal, fem };

struct SchemeConfig {
  double alpha = 0.5;
  double final_time = 1.0;
  std::size_t steps = 0;  // N, tau = final_time / N
  SpatialKind kind = SpatialKind::modal;
  std::size_t modes = 0;  // mode count (modal) or cell count (fem, h = 1/M)
  double epsilon = 0.0;   // noise amplitude
  std::function<double(double, double)> source;  // f(x,t); empty means zero

  double tau() const { return final_time / static_cast<double>(steps); }

  void validate() const {
    if (!(alpha > 0.0 && alpha < 2.0)) {
      throw std::invalid_argument("SchemeConfig: alpha must lie in (0,2)");
    }
    if (!(final_time > 0.0) || steps < 1 || modes < 1) {
      throw std::invalid_argument("SchemeConfig: bad discretization sizes");
    }
    if (!(epsilon >= 0.0)) {
      throw std::invalid_argument("SchemeConfig: epsilon must be >= 0");
    }
  }
};

struct Trajectory {
  SpatialKind kind = SpatialKind::modal;
  std::size_t steps = 0;  // N; rows 0..N
  std::size_t width = 0;  // modal: M coefficients; fem: M+1 nodal values
  double tau = 0.0;
  std::vector<double> values;  // row-major (steps+1) x width, row 0 zero

  std::span<const double> row(std::size_t n) const {
    if (n > steps) {
      throw std::out_of_range("Trajectory: step index out of range");
    }
    return {values.data() + n * width, width};
  }
  std::span<double> row_mut(std::size_t n) {
    return {values.data() + n * width, width};
  }
};

/// One update of the per-mode recurrence: given u_0..u_{n-1},
///   u_n = (1 + tau^a b_0 l)^{-1} [ u_{n-1} - tau^a l sum_{k<n} b_{n-k} u_k
///                                  + tau f_n + dW_n ].
inline double step_modal(std::span<const double> history, double lambda,
                         const CqWeights& weights, double tau,
                         double forcing_n, double dw_n) {
  const std::size_t n = history.size();
  if (n < 1) {
    throw std::invalid_argument("step_modal: history must contain u_0");
  }
  if (n >= weights.b.size()) {
    throw std::invalid_argument("step_modal: not enough weights for step");
  }
  const double tau_a = std::pow(tau, weights.alpha);
  double hist = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    hist += weights.b[n - k] * history[k];
  }
  return (history[n - 1] - tau_a * lambda * hist + tau * forcing_n + dw_n) /
         (1.0 + tau_a * weights.b[0] * lambda);
}

namespace detail {

inline void check_paths(const SchemeConfig& config, const NoisePaths& paths) {
  if (paths.steps != config.steps) {
    throw std::invalid_argument("solver: path step count does not match");
  }
  if (paths.modes < config.modes) {
    throw std::invalid_argument("solver: fewer noise modes than solver modes");
  }
  if (std::abs(paths.tau - config.tau()) >
      1e-12 * config.tau()) {
    throw std::invalid_argument("solver: path tau does not match scheme tau");
  }
}

inline void check_weights(const SchemeConfig& config, const CqWeights& w) {
  if (w.alpha != config.alpha || w.b.size() < config.steps + 1) {
    throw std::invalid_argument("solver: weight table does not fit scheme");
  }
}

}  // namespace detail

/// Spectral solve; each mode advances independently. `source_modes` holds
/// f_j(t_n) per time level (may be null for a source-free run), `paths`
/// supplies Brownian increments already coarsened to the scheme step.
/// `shared_weights`, when given, must hold at least `steps`+1 coefficients
/// for the scheme alpha; Monte Carlo drivers precompute one table and pass
/// it to every realization.
inline Trajectory solve_modal(
    const SchemeConfig& config, const EigenBasis& basis,
    const NoisePaths* paths,
    const std::vector<std::vector<double>>* source_modes,
    const CqWeights* shared_weights = nullptr) {
  config.validate();
  if (basis.modes != config.modes) {
    throw std::invalid_argument("solve_modal: basis size mismatch");
  }
  if (paths != nullptr) {
    detail::check_paths(config, *paths);
  }
  if (source_modes != nullptr && source_modes->size() != config.steps + 1) {
    throw std::invalid_argument("solve_modal: source table size mismatch");
  }
  const std::size_t n_steps = config.steps;
  const double tau = config.tau();
  const CqWeights local_weights =
      shared_weights ? CqWeights{} : cq_weights(config.alpha, n_steps);
  const CqWeights& weights = shared_weights ? *shared_weights : local_weights;
  if (shared_weights != nullptr) {
    detail::check_weights(config, weights);
  }

  Trajectory traj;
  traj.kind = SpatialKind::modal;
  traj.steps = n_steps;
  traj.width = config.modes;
  traj.tau = tau;
  traj.values.assign((n_steps + 1) * config.modes, 0.0);

  // Time-major blocked form of the per-mode recurrence: the history sums
  // accumulate over k in the same order as step_modal, so each mode's
  // column is bitwise identical to stepping that mode alone, but the inner
  // loop runs contiguously across modes.
  const std::size_t m = config.modes;
  const double tau_a = std::pow(tau, config.alpha);
  std::vector<double> denom(m);
  for (std::size_t j = 0; j < m; ++j) {
    denom[j] = 1.0 + tau_a * weights.b[0] * basis.eigenvalues[j];
  }
  std::vector<double> hist(m);
  for (std::size_t n = 1; n <= n_steps; ++n) {
    std::fill(hist.begin(), hist.end(), 0.0);
    for (std::size_t k = 1; k < n; ++k) {
      const double b = weights.b[n - k];
      const double* uk = traj.values.data() + k * m;
      for (std::size_t j = 0; j < m; ++j) {
        hist[j] += b * uk[j];
      }
    }
    const double* prev = traj.values.data() + (n - 1) * m;
    double* next = traj.values.data() + n * m;
    const double* f_n = source_modes ? (*source_modes)[n].data() : nullptr;
    for (std::size_t j = 0; j < m; ++j) {
      const double forcing = f_n ? f_n[j] : 0.0;
      const double dw =
          paths ? config.epsilon * paths->increment(j, n - 1) : 0.0;
      next[j] = (prev[j] - tau_a * basis.eigenvalues[j] * hist[j] +
                 tau * forcing + dw) /
                denom[j];
    }
  }
  return traj;
}

namespace detail {

// Prefactored Thomas solve for the constant tridiagonal system
// (M + tau^a b0 A) with P1 mass/stiffness entries on a uniform mesh.
struct TridiagFactor {
  double off = 0.0;             // constant off-diagonal of the system
  std::vector<double> pivot;    // eliminated diagonal
  std::vector<double> lower;    // elimination multipliers

  TridiagFactor(double diag, double off_diag, std::size_t n)
      : off(off_diag), pivot(n), lower(n) {
    pivot[0] = diag;
    if (!(pivot[0] > 0.0)) {
      throw std::runtime_error("fem solve: nonpositive pivot");
    }
    for (std::size_t i = 1; i < n; ++i) {
      lower[i] = off / pivot[i - 1];
      pivot[i] = diag - lower[i] * off;
      if (!(pivot[i] > 0.0)) {
        throw std::runtime_error("fem solve: nonpositive pivot");
      }
    }
  }

  void solve(std::span<double> rhs) const {
    const std::size_t n = rhs.size();
    for (std::size_t i = 1; i < n; ++i) {
      rhs[i] -= lower[i] * rhs[i - 1];
    }
    rhs[n - 1] /= pivot[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) {
      rhs[i] = (rhs[i] - off * rhs[i + 1]) / pivot[i];
    }
  }
};

// y = (h/6) tridiag(1,4,1) x on interior nodes.
inline void mass_apply(double h, std::span<const double> x,
                       std::span<double> y) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double left = (i > 0) ? x[i - 1] : 0.0;
    const double right = (i + 1 < n) ? x[i + 1] : 0.0;
    y[i] = h / 6.0 * (left + 4.0 * x[i] + right);
  }
}

// y = (1/h) tridiag(-1,2,-1) x on interior nodes.
inline void stiffness_apply(double h, std::span<const double> x,
                            std::span<double> y) {
  const std::size_t n = x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double left = (i > 0) ? x[i - 1] : 0.0;
    const double right = (i + 1 < n) ? x[i + 1] : 0.0;
    y[i] = (-left + 2.0 * x[i] - right) / h;
  }
}

// P1 load vector of f(., t): entries (f, hat_i) by 3-point Gauss per
// element, exact through degree-5 integrands so the polynomial sources
// carry no quadrature error.
inline std::vector<double> p1_load(
    const std::function<double(double, double)>& f, double t, double h,
    std::size_t interior) {
  std::vector<double> load(interior, 0.0);
  const std::size_t cells = interior + 1;
  for (std::size_t e = 0; e < cells; ++e) {
    const double x_left = h * static_cast<double>(e);
    for (std::size_t q = 0; q < kGauss3Nodes.size(); ++q) {
      const double xi = 0.5 * (kGauss3Nodes[q] + 1.0);  // in (0,1)
      const double x = x_left + h * xi;
      const double w = 0.5 * h * kGauss3Weights[q];
      const double fx = f(x, t) * w;
      if (e > 0) {
        load[e - 1] += fx * (1.0 - xi);  // hat at left node
      }
      if (e < interior) {
        load[e] += fx * xi;  // hat at right node
      }
    }
  }
  return load;
}

// (phi_j, hat_i) in closed form for the sine basis on a uniform mesh.
inline std::vector<double> sine_hat_products(std::size_t cells,
                                             std::size_t modes) {
  const double h = 1.0 / static_cast<double>(cells);
  const std::size_t interior = cells - 1;
  std::vector<double> table(interior * modes);
  for (std::size_t j = 1; j <= modes; ++j) {
    const double k = static_cast<double>(j) * std::numbers::pi;
    const double s = std::sin(0.5 * k * h);
    const double scale = std::numbers::sqrt2 * 4.0 * s * s / (k * k * h);
    for (std::size_t i = 1; i <= interior; ++i) {
      table[(i - 1) * modes + (j - 1)] =
          scale * std::sin(k * h * static_cast<double>(i));
    }
  }
  return table;
}

}  // namespace detail

/// P1 finite-element solve on the uniform mesh h = 1/M. The white-noise
/// load keeps the spectral truncation of `paths` (same M modes as a modal
/// run), so both spatial discretizations can share one Brownian sample.
inline Trajectory solve_fem(const SchemeConfig& config,
                            const NoisePaths* paths,
                            const CqWeights* shared_weights = nullptr) {
  config.validate();
  if (config.modes < 2) {
    throw std::invalid_argument("solve_fem: need at least two cells");
  }
  if (paths != nullptr) {
    detail::check_paths(config, *paths);
  }
  const std::size_t cells = config.modes;
  const std::size_t interior = cells - 1;
  const double h = 1.0 / static_cast<double>(cells);
  const std::size_t n_steps = config.steps;
  const double tau = config.tau();
  const double tau_a = std::pow(tau, config.alpha);
  const CqWeights local_weights =
      shared_weights ? CqWeights{} : cq_weights(config.alpha, n_steps);
  const CqWeights& weights = shared_weights ? *shared_weights : local_weights;
  if (shared_weights != nullptr) {
    detail::check_weights(config, weights);
  }

  const detail::TridiagFactor factor(4.0 * h / 6.0 + tau_a * weights.b[0] * 2.0 / h,
                                     h / 6.0 - tau_a * weights.b[0] / h,
                                     interior);
  const std::size_t noise_modes = paths ? paths->modes : 0;
  const std::vector<double> projections =
      paths ? detail::sine_hat_products(cells, noise_modes)
            : std::vector<double>{};

  Trajectory traj;
  traj.kind = SpatialKind::fem;
  traj.steps = n_steps;
  traj.width = cells + 1;
  traj.tau = tau;
  traj.values.assign((n_steps + 1) * (cells + 1), 0.0);

  std::vector<std::vector<double>> u(n_steps + 1,
                                     std::vector<double>(interior, 0.0));
  std::vector<double> history(interior);
  std::vector<double> rhs(interior);
  std::vector<double> scratch(interior);

  for (std::size_t n = 1; n <= n_steps; ++n) {
    // rhs = M u_{n-1} - tau^a A sum_{k<n} b_{n-k} u_k + tau F_n + eps G_n
    detail::mass_apply(h, u[n - 1], rhs);
    std::fill(history.begin(), history.end(), 0.0);
    for (std::size_t k = 1; k < n; ++k) {
      const double b = weights.b[n - k];
      const double* uk = u[k].data();
      for (std::size_t i = 0; i < interior; ++i) {
        history[i] += b * uk[i];
      }
    }
    detail::stiffness_apply(h, history, scratch);
    for (std::size_t i = 0; i < interior; ++i) {
      rhs[i] -= tau_a * scratch[i];
    }
    if (config.source) {
      const double t_n = tau * static_cast<double>(n);
      const std::vector<double> load =
          detail::p1_load(config.source, t_n, h, interior);
      for (std::size_t i = 0; i < interior; ++i) {
        rhs[i] += tau * load[i];
      }
    }
    if (paths != nullptr && config.epsilon > 0.0) {
      for (std::size_t i = 0; i < interior; ++i) {
        double g = 0.0;
        const double* proj = projections.data() + i * noise_modes;
        for (std::size_t j = 0; j < noise_modes; ++j) {
          g += paths->increment(j, n - 1) * proj[j];
        }
        rhs[i] += config.epsilon * g;
      }
    }
    factor.solve(rhs);
    u[n] = rhs;
    for (std::size_t i = 0; i < interior; ++i) {
      traj.values[n * (cells + 1) + (i + 1)] = rhs[i];
    }
  }
  return traj;
}

/// L2(0,1) norm of the field at time level n: Parseval in the modal basis,
/// mass-matrix quadratic form for nodal data.
inline double l2_norm(const Trajectory& traj, std::size_t n) {
  const auto field = traj.row(n);
  if (traj.kind == SpatialKind::modal) {
    double acc = 0.0;
    for (const double c : field) {
      acc += c * c;
    }
    return std::sqrt(acc);
  }
  const std::size_t cells = traj.width - 1;
  const double h = 1.0 / static_cast<double>(cells);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 <= cells; ++i) {
    // element [x_i, x_{i+1}]: int (a + (b-a) xi)^2 h dxi
    const double a = field[i];
    const double b = field[i + 1];
    acc += h / 3.0 * (a * a + a * b + b * b);
  }
  return std::sqrt(acc);
}

}  // namespace fracspde
