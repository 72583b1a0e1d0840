// Experiment driver: every subcommand resolves its configuration, runs the
// corresponding library routine, and emits CSVs plus a manifest that is
// sufficient to regenerate the run.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include "fracspde/cli.hpp"
#include "fracspde/experiments.hpp"
#include "fracspde/io.hpp"
#include "fracspde/mild.hpp"
#include "fracspde/selftest.hpp"

namespace {

namespace fs = std::filesystem;
using namespace fracspde;

using Manifest = std::vector<std::pair<std::string, std::string>>;

Manifest base_manifest(const RunConfig& cfg) {
  return {{"subcommand", cfg.subcommand},
          {"seed", std::to_string(cfg.seed)},
          {"workers", std::to_string(cfg.effective_workers())}};
}

int run_weights(const RunConfig& cfg, const fs::path& outdir) {
  const CqWeights weights = cq_weights(cfg.alpha, cfg.weight_count);
  write_weights_csv(outdir / "weights.csv", weights);
  Manifest manifest = base_manifest(cfg);
  manifest.emplace_back("alpha", format_double(cfg.alpha));
  manifest.emplace_back("n", std::to_string(cfg.weight_count));
  write_manifest(outdir / "manifest.txt", manifest);
  std::cout << "wrote " << (outdir / "weights.csv").string() << "\n";
  return 0;
}

int run_solve(const RunConfig& cfg, const fs::path& outdir) {
  SchemeConfig config;
  config.alpha = cfg.alpha;
  config.final_time = 1.0;
  config.steps = std::size_t{1} << cfg.solve_level;
  config.modes = cfg.modes;
  config.epsilon = cfg.epsilon;
  config.kind = cfg.spatial == "fem" ? SpatialKind::fem : SpatialKind::modal;

  NoisePaths paths;
  const bool with_noise = cfg.epsilon > 0.0;
  if (with_noise) {
    paths = generate_paths(cfg.seed, cfg.realization_index, cfg.modes,
                           config.steps, config.tau());
  }

  std::vector<double> x;
  std::vector<double> u;
  if (config.kind == SpatialKind::modal) {
    const EigenBasis basis = interval_basis(cfg.modes);
    const auto table = modal_source_table(cfg.example_problem(), cfg.alpha,
                                          basis, config.steps, config.tau());
    const Trajectory traj =
        solve_modal(config, basis, with_noise ? &paths : nullptr, &table);
    const auto coeffs = traj.row(config.steps);
    const std::size_t points = 129;
    for (std::size_t i = 0; i < points; ++i) {
      const double xi =
          static_cast<double>(i) / static_cast<double>(points - 1);
      double value = 0.0;
      for (std::size_t j = 1; j <= cfg.modes; ++j) {
        value += coeffs[j - 1] * basis.eval(j, xi);
      }
      x.push_back(xi);
      u.push_back(value);
    }
  } else {
    const double alpha = cfg.alpha;
    const ExampleProblem example = cfg.example_problem();
    config.source = [alpha, example](double xx, double tt) {
      return source_value(example, alpha, xx, tt);
    };
    const Trajectory traj = solve_fem(config, with_noise ? &paths : nullptr);
    const auto nodal = traj.row(config.steps);
    for (std::size_t i = 0; i < traj.width; ++i) {
      x.push_back(static_cast<double>(i) / static_cast<double>(cfg.modes));
      u.push_back(nodal[i]);
    }
  }
  write_field_csv(outdir / "solve.csv", x, u);
  if (cfg.dump_paths && with_noise) {
    write_paths_csv(outdir / "paths.csv", paths);
  }
  Manifest manifest = base_manifest(cfg);
  manifest.emplace_back("alpha", format_double(cfg.alpha));
  manifest.emplace_back("level", std::to_string(cfg.solve_level));
  manifest.emplace_back("modes", std::to_string(cfg.modes));
  manifest.emplace_back("spatial", cfg.spatial);
  manifest.emplace_back("epsilon", format_double(cfg.epsilon));
  manifest.emplace_back("example", cfg.example);
  manifest.emplace_back("realization", std::to_string(cfg.realization_index));
  write_manifest(outdir / "manifest.txt", manifest);
  std::cout << "wrote " << (outdir / "solve.csv").string() << "\n";
  return 0;
}

int run_kernel(const RunConfig& cfg, const fs::path& outdir) {
  std::vector<KernelRow> rows;
  double worst = 0.0;
  const int points = 32;
  for (int i = 1; i <= points; ++i) {
    KernelRow row;
    row.t = cfg.tmax * static_cast<double>(i) / points;
    const ContourConfig contour = contour_defaults(cfg.alpha, row.t);
    row.via_ml =
        mittag_leffler(cfg.alpha, -cfg.lambda * std::pow(row.t, cfg.alpha));
    row.via_contour = kernel_contour(cfg.alpha, cfg.lambda, row.t, contour);
    worst = std::max(worst, std::abs(row.via_ml - row.via_contour));
    rows.push_back(row);
  }
  write_kernel_csv(outdir / "kernel.csv", rows);
  Manifest manifest = base_manifest(cfg);
  manifest.emplace_back("alpha", format_double(cfg.alpha));
  manifest.emplace_back("lambda", format_double(cfg.lambda));
  manifest.emplace_back("tmax", format_double(cfg.tmax));
  manifest.emplace_back("max_route_gap", format_double(worst));
  write_manifest(outdir / "manifest.txt", manifest);
  std::cout << "wrote " << (outdir / "kernel.csv").string()
            << " (max route gap " << worst << ")\n";
  if (!(worst <= 1e-8)) {
    std::cerr << "kernel: Mittag-Leffler and contour routes disagree beyond "
                 "1e-8\n";
    return 1;
  }
  return 0;
}

int run_field_stats_cmd(const RunConfig& cfg, const fs::path& outdir) {
  FieldStatsSetup setup;
  setup.alpha = cfg.alpha;
  setup.cells = cfg.modes;
  setup.epsilon = cfg.epsilon;
  setup.realizations = cfg.realizations;
  setup.seed = cfg.seed;
  setup.workers = cfg.effective_workers();
  const FieldStats stats = run_field_stats(setup);
  write_field_stats_csv(outdir / "field.csv", stats);
  write_field_plot(outdir / "plot.gp", "field.csv");
  Manifest manifest = base_manifest(cfg);
  manifest.emplace_back("alpha", format_double(cfg.alpha));
  manifest.emplace_back("cells", std::to_string(cfg.modes));
  manifest.emplace_back("epsilon", format_double(cfg.epsilon));
  manifest.emplace_back("realizations", std::to_string(cfg.realizations));
  write_manifest(outdir / "manifest.txt", manifest);
  std::cout << "wrote " << (outdir / "field.csv").string() << "\n";
  return 0;
}

int run_convergence_cmd(const RunConfig& cfg, const fs::path& outdir) {
  ConvergenceSetup setup;
  setup.alpha = cfg.alpha;
  setup.k_min = cfg.k_min;
  setup.k_max = cfg.k_max;
  setup.realizations = cfg.realizations;
  setup.seed = cfg.seed;
  setup.example = cfg.example_problem();
  setup.modes = cfg.modes;
  setup.k_ref = cfg.k_ref;
  setup.epsilon = cfg.epsilon;
  setup.workers = cfg.effective_workers();
  const ConvergenceReport report = run_convergence(setup);

  write_convergence_csv(outdir / "convergence.csv", report);
  const double slope =
      cfg.epsilon > 0.0 ? 1.0 - cfg.alpha / 2.0 : 2.0;  // squared-error decay
  write_convergence_plot(outdir / "plot.gp", "convergence.csv", report, slope);
  Manifest manifest = base_manifest(cfg);
  manifest.emplace_back("alpha", format_double(cfg.alpha));
  manifest.emplace_back("levels", std::to_string(cfg.k_min) + ":" +
                                      std::to_string(cfg.k_max));
  manifest.emplace_back("kref", std::to_string(cfg.k_ref));
  manifest.emplace_back("modes", std::to_string(cfg.modes));
  manifest.emplace_back("realizations", std::to_string(cfg.realizations));
  manifest.emplace_back("epsilon", format_double(cfg.epsilon));
  manifest.emplace_back("example", cfg.example);
  write_manifest(outdir / "manifest.txt", manifest);

  std::cout << "k,tau,E,stderr,ratio,order\n";
  for (std::size_t l = 0; l < report.tau.size(); ++l) {
    std::cout << (report.k_min + static_cast<int>(l)) << "," << report.tau[l]
              << "," << report.mean_sq_error[l] << "," << report.std_error[l];
    if (l > 0) {
      std::cout << "," << report.ratio[l - 1] << "," << report.order[l - 1];
    }
    std::cout << "\n";
  }
  std::cout << "wrote " << (outdir / "convergence.csv").string() << "\n";
  return 0;
}

int run_selftest_cmd() {
  bool all = true;
  for (const SelftestResult& result : run_selftest()) {
    all = all && result.passed;
    std::cout << (result.passed ? "PASS" : "FAIL") << "  " << result.group
              << ": " << result.detail << "\n";
  }
  std::cout << (all ? "selftest passed" : "selftest FAILED") << "\n";
  return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracspde"};
  fracspde::RunConfig cfg;
  try {
    cfg = fracspde::parse_config(app, argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (cfg.subcommand == "selftest") {
      return run_selftest_cmd();
    }
    const fs::path outdir(cfg.outdir);
    fs::create_directories(outdir);
    if (cfg.subcommand == "weights") {
      return run_weights(cfg, outdir);
    }
    if (cfg.subcommand == "solve") {
      return run_solve(cfg, outdir);
    }
    if (cfg.subcommand == "kernel") {
      return run_kernel(cfg, outdir);
    }
    if (cfg.subcommand == "field-stats") {
      return run_field_stats_cmd(cfg, outdir);
    }
    if (cfg.subcommand == "convergence") {
      return run_convergence_cmd(cfg, outdir);
    }
    std::cerr << "unknown subcommand: " << cfg.subcommand << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
