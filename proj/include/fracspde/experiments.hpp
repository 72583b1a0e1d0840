#pragma once

// Monte Carlo convergence studies and field statistics. Realizations are
// independent work items; every random draw is addressed by
// (seed, realization, mode, step), so reports are bitwise identical for any
// worker count.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "fracspde/cq.hpp"
#include "fracspde/noise.hpp"
#include "fracspde/problems.hpp"
#include "fracspde/spectrum.hpp"
#include "fracspde/stepper.hpp"

namespace fracspde {

struct ConvergenceReport {
  double alpha = 0.0;
  int k_min = 0;
  int k_max = 0;
  std::size_t realizations = 0;
  std::uint64_t seed = 0;
  double tau_ref = 0.0;
  double epsilon = 0.0;
  std::vector<double> tau;            // per level, 2^-k
  std::vector<double> mean_sq_error;  // E(tau_k), mean squared L2 error
  std::vector<double> std_error;      // standard error of each E(tau_k)
  std::vector<double> ratio;          // E(tau_k)/E(tau_{k+1})
  std::vector<double> order;          // log2 of each ratio
};

struct FieldStats {
  double alpha = 0.0;
  double tau = 0.0;
  std::size_t cells = 0;
  double epsilon = 0.0;
  std::size_t realizations = 0;
  std::uint64_t seed = 0;
  std::vector<double> x;                  // mesh nodes
  std::vector<double> mean;               // pointwise mean at t = 1
  std::vector<double> stddev;             // pointwise sample std at t = 1
  std::vector<std::vector<double>> samples;  // >= 3 individual fields
  std::vector<double> exact;              // u_d(x, 1)
};

/// Error-decay ratio 2^{1 - alpha d / 2} predicted for halving the step.
inline double expected_ratio(double alpha, int d) {
  return std::exp2(1.0 - alpha * static_cast<double>(d) / 2.0);
}

namespace detail {

// Run fn(i) for i in [0, count) on `workers` threads. Work items write to
// disjoint slots, so the partition has no effect on results.
template <class F>
void parallel_for_index(std::size_t count, std::size_t workers, F&& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      fn(i);
    }
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < count; i += workers) {
        fn(i);
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
}

inline double sq(double v) { return v * v; }

}  // namespace detail

struct ConvergenceSetup {
  double alpha = 0.5;
  int k_min = 2;
  int k_max = 6;
  std::size_t realizations = 200;
  std::uint64_t seed = 42;
  ExampleProblem example = ExampleProblem::frac_stochastic;
  std::size_t modes = 64;
  int k_ref = 10;        // tau_ref = 2^-k_ref
  double epsilon = 1.0;  // 0 switches to the exact deterministic reference
  std::size_t workers = 1;
};

/// Temporal convergence study at t = 1. With noise, a fine-step surrogate
/// sharing each realization's Brownian path stands in for the exact
/// solution; without noise the exact modal projection of u_d is used.
/// Errors are squared L2 norms via Parseval in the shared basis.
inline ConvergenceReport run_convergence(const ConvergenceSetup& setup) {
  if (setup.k_min < 1 || setup.k_max < setup.k_min || setup.k_ref < setup.k_max) {
    throw std::invalid_argument("run_convergence: bad level range");
  }
  if (setup.realizations < 1 || setup.modes < 1) {
    throw std::invalid_argument("run_convergence: bad sizes");
  }
  const bool stochastic = setup.epsilon > 0.0;
  const std::size_t levels =
      static_cast<std::size_t>(setup.k_max - setup.k_min + 1);
  const std::size_t n_ref = std::size_t{1} << setup.k_ref;
  const double tau_ref = 1.0 / static_cast<double>(n_ref);
  const EigenBasis basis = interval_basis(setup.modes);

  // Shared read-only tables: one weight sequence covers every level.
  std::vector<std::vector<std::vector<double>>> sources;  // per level
  for (std::size_t l = 0; l < levels; ++l) {
    const std::size_t n = std::size_t{1}
                          << (setup.k_min + static_cast<int>(l));
    sources.push_back(modal_source_table(setup.example, setup.alpha, basis, n,
                                         1.0 / static_cast<double>(n)));
  }
  const auto source_ref = modal_source_table(setup.example, setup.alpha, basis,
                                             n_ref, tau_ref);
  // One weight table serves every level: b_j depends on alpha only, and the
  // coarser runs read a prefix.
  const CqWeights weights = cq_weights(setup.alpha, n_ref);

  // Exact deterministic reference: u_d(., 1) has modal coefficients A_j.
  std::vector<double> exact_ref(setup.modes);
  for (std::size_t j = 1; j <= setup.modes; ++j) {
    exact_ref[j - 1] = bump_mode_coefficient(j);
  }

  const std::size_t n_real = stochastic ? setup.realizations : 1;
  std::vector<double> errors(n_real * levels, 0.0);

  detail::parallel_for_index(n_real, setup.workers, [&](std::size_t i) {
    SchemeConfig config;
    config.alpha = setup.alpha;
    config.final_time = 1.0;
    config.kind = SpatialKind::modal;
    config.modes = setup.modes;
    config.epsilon = setup.epsilon;

    NoisePaths fine;
    std::vector<double> reference;
    if (stochastic) {
      fine = generate_paths(setup.seed, static_cast<std::uint32_t>(i),
                            setup.modes, n_ref, tau_ref);
      config.steps = n_ref;
      const Trajectory ref =
          solve_modal(config, basis, &fine, &source_ref, &weights);
      const auto last = ref.row(n_ref);
      reference.assign(last.begin(), last.end());
    } else {
      reference = exact_ref;
    }

    for (std::size_t l = 0; l < levels; ++l) {
      const int k = setup.k_min + static_cast<int>(l);
      const std::size_t n = std::size_t{1} << k;
      config.steps = n;
      Trajectory traj;
      if (stochastic) {
        const NoisePaths coarse = coarsen(fine, n_ref / n);
        traj = solve_modal(config, basis, &coarse, &sources[l], &weights);
      } else {
        traj = solve_modal(config, basis, nullptr, &sources[l], &weights);
      }
      const auto last = traj.row(n);
      double err = 0.0;
      for (std::size_t j = 0; j < setup.modes; ++j) {
        err += detail::sq(last[j] - reference[j]);
      }
      errors[i * levels + l] = err;
    }
  });

  ConvergenceReport report;
  report.alpha = setup.alpha;
  report.k_min = setup.k_min;
  report.k_max = setup.k_max;
  report.realizations = n_real;
  report.seed = setup.seed;
  report.tau_ref = tau_ref;
  report.epsilon = setup.epsilon;
  report.tau.resize(levels);
  report.mean_sq_error.assign(levels, 0.0);
  report.std_error.assign(levels, 0.0);
  for (std::size_t l = 0; l < levels; ++l) {
    report.tau[l] =
        std::exp2(-static_cast<double>(setup.k_min + static_cast<int>(l)));
    for (std::size_t i = 0; i < n_real; ++i) {
      report.mean_sq_error[l] += errors[i * levels + l];
    }
    report.mean_sq_error[l] /= static_cast<double>(n_real);
    if (n_real > 1) {
      double var = 0.0;
      for (std::size_t i = 0; i < n_real; ++i) {
        var += detail::sq(errors[i * levels + l] - report.mean_sq_error[l]);
      }
      var /= static_cast<double>(n_real - 1);
      report.std_error[l] = std::sqrt(var / static_cast<double>(n_real));
    }
  }
  for (std::size_t l = 0; l + 1 < levels; ++l) {
    report.ratio.push_back(report.mean_sq_error[l] /
                           report.mean_sq_error[l + 1]);
    report.order.push_back(std::log2(report.ratio.back()));
  }
  return report;
}

struct FieldStatsSetup {
  double alpha = 0.5;
  std::size_t cells = 32;  // tau = h = 1/cells
  double epsilon = 0.1;
  std::size_t realizations = 1000;
  std::uint64_t seed = 42;
  std::size_t workers = 1;
};

/// Pointwise mean/std of the FEM solution at t = 1 over independent
/// realizations, against the deterministic exact field, tau = h.
inline FieldStats run_field_stats(const FieldStatsSetup& setup) {
  if (setup.cells < 2 || setup.realizations < 1) {
    throw std::invalid_argument("run_field_stats: bad sizes");
  }
  const std::size_t nodes = setup.cells + 1;
  const std::size_t n_steps = setup.cells;  // tau = h, T = 1
  const double tau = 1.0 / static_cast<double>(n_steps);
  const double alpha = setup.alpha;
  const CqWeights weights = cq_weights(alpha, n_steps);

  std::vector<std::vector<double>> fields(setup.realizations);
  detail::parallel_for_index(
      setup.realizations, setup.workers, [&](std::size_t i) {
        SchemeConfig config;
        config.alpha = alpha;
        config.final_time = 1.0;
        config.steps = n_steps;
        config.kind = SpatialKind::fem;
        config.modes = setup.cells;
        config.epsilon = setup.epsilon;
        config.source = [alpha](double x, double t) {
          return source_value(ExampleProblem::frac_stochastic, alpha, x, t);
        };
        const NoisePaths paths =
            generate_paths(setup.seed, static_cast<std::uint32_t>(i),
                           setup.cells, n_steps, tau);
        const Trajectory traj = solve_fem(config, &paths, &weights);
        const auto last = traj.row(n_steps);
        fields[i].assign(last.begin(), last.end());
      });

  FieldStats stats;
  stats.alpha = setup.alpha;
  stats.tau = tau;
  stats.cells = setup.cells;
  stats.epsilon = setup.epsilon;
  stats.realizations = setup.realizations;
  stats.seed = setup.seed;
  stats.x.resize(nodes);
  stats.mean.assign(nodes, 0.0);
  stats.stddev.assign(nodes, 0.0);
  stats.exact.resize(nodes);
  for (std::size_t p = 0; p < nodes; ++p) {
    stats.x[p] = static_cast<double>(p) / static_cast<double>(setup.cells);
    stats.exact[p] = exact_deterministic(stats.x[p], 1.0);
    for (const auto& field : fields) {
      stats.mean[p] += field[p];
    }
    stats.mean[p] /= static_cast<double>(setup.realizations);
    if (setup.realizations > 1) {
      double var = 0.0;
      for (const auto& field : fields) {
        var += detail::sq(field[p] - stats.mean[p]);
      }
      stats.stddev[p] =
          std::sqrt(var / static_cast<double>(setup.realizations - 1));
    }
  }
  for (std::size_t i = 0; i < std::min<std::size_t>(3, fields.size()); ++i) {
    stats.samples.push_back(fields[i]);
  }
  return stats;
}

}  // namespace fracspde
