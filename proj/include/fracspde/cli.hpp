#pragma once

// Command-line surface: subcommand dispatch table, option/range validation,
// and config-file layering (defaults < file < flags).

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "fracspde/problems.hpp"

namespace fracspde {

struct RunConfig {
  std::string subcommand;

  double alpha = 0.5;
  std::uint64_t seed = 42;
  std::size_t modes = 64;
  double epsilon = 1.0;
  std::size_t realizations = 200;
  int k_min = 2;
  int k_max = 6;
  int k_ref = 10;
  std::string example = "frac";  // frac | parabolic
  std::string outdir = "out";
  std::size_t workers = 0;  // 0: hardware concurrency

  // weights
  std::size_t weight_count = 32;
  // solve
  int solve_level = 5;  // tau = 2^-level, T = 1
  std::string spatial = "modal";  // modal | fem
  std::uint32_t realization_index = 0;
  bool dump_paths = false;
  // kernel
  double lambda = 9.869604401089358;  // pi^2
  double tmax = 1.0;

  ExampleProblem example_problem() const {
    return example == "parabolic" ? ExampleProblem::parabolic_stochastic
                                  : ExampleProblem::frac_stochastic;
  }

  std::size_t effective_workers() const {
    if (workers > 0) {
      return workers;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
  }
};

namespace cli_detail {

inline CLI::Validator open_interval(double lo, double hi) {
  std::ostringstream rng;
  rng << "(" << lo << ", " << hi << ")";
  const std::string range_text = rng.str();
  return CLI::Validator(
      [lo, hi, range_text](std::string& input) -> std::string {
        double value = 0.0;
        try {
          value = std::stod(input);
        } catch (const std::exception&) {
          return "value '" + input + "' is not a number";
        }
        if (!(value > lo && value < hi)) {
          return "value " + input + " not in open range " + range_text;
        }
        return {};
      },
      "FLOAT in " + range_text);
}

inline CLI::Validator levels_format() {
  return CLI::Validator(
      [](std::string& input) -> std::string {
        int lo = 0, hi = 0;
        char colon = 0;
        std::istringstream ss(input);
        if (!(ss >> lo >> colon >> hi) || colon != ':' || !ss.eof() ||
            lo < 1 || hi < lo) {
          return "levels must be 'kmin:kmax' with 1 <= kmin <= kmax, got '" +
                 input + "'";
        }
        return {};
      },
      "KMIN:KMAX");
}

inline void add_common(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--outdir", cfg.outdir, "output directory")
      ->capture_default_str();
  cmd->add_option("--workers", cfg.workers,
                  "worker threads (0 = hardware concurrency)")
      ->envname("FRACSPDE_WORKERS")
      ->capture_default_str();
  cmd->add_option("--seed", cfg.seed, "base seed for all noise draws")
      ->capture_default_str();
}

inline void add_alpha(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--alpha", cfg.alpha, "fractional order, open range (0,2)")
      ->check(open_interval(0.0, 2.0))
      ->capture_default_str();
}

}  // namespace cli_detail

/// Parse argv into a RunConfig. Throws CLI::ParseError on any unknown key,
/// malformed value, or out-of-range parameter; the caller converts that to
/// a nonzero exit status via app.exit().
///
/// Config files hold `key = value` lines with `#` comments; keys address a
/// subcommand option either as `convergence.seed = 1` or inside a
/// `[convergence]` section. Command-line flags override file values, which
/// override the built-in defaults. `--config` may appear before or after
/// the subcommand name.
inline RunConfig parse_config(CLI::App& app, int argc, const char* const* argv) {
  RunConfig cfg;

  app.description("solver and experiment runner for the stochastic "
                  "time-fractional diffusion equation on (0,1)");
  app.require_subcommand(1);
  app.set_config("--config", "",
                 "config file ('key = value', '#' comments; subcommand "
                 "options as 'sub.key' or under a [sub] section)");
  app.allow_config_extras(false);

  auto* weights = app.add_subcommand(
      "weights", "emit convolution-quadrature weights as CSV");
  cli_detail::add_alpha(weights, cfg);
  weights->add_option("--n", cfg.weight_count, "highest weight index")
      ->capture_default_str();
  cli_detail::add_common(weights, cfg);

  auto* solve = app.add_subcommand(
      "solve", "single realization, final-time field as CSV");
  cli_detail::add_alpha(solve, cfg);
  solve->add_option("--level", cfg.solve_level, "time step tau = 2^-level")
      ->check(CLI::Range(1, 20))
      ->capture_default_str();
  solve->add_option("--modes", cfg.modes, "spatial modes / cells")
      ->check(CLI::Range(std::size_t{1}, std::size_t{4096}))
      ->capture_default_str();
  solve->add_option("--spatial", cfg.spatial, "discretization")
      ->check(CLI::IsMember({"modal", "fem"}))
      ->capture_default_str();
  solve->add_option("--epsilon", cfg.epsilon, "noise amplitude, >= 0")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  solve->add_option("--example", cfg.example, "forcing family")
      ->check(CLI::IsMember({"frac", "parabolic"}))
      ->capture_default_str();
  solve->add_option("--realization", cfg.realization_index,
                    "realization index within the seed")
      ->capture_default_str();
  solve->add_flag("--dump-paths", cfg.dump_paths,
                  "also emit the Brownian increments as CSV");
  cli_detail::add_common(solve, cfg);

  auto* kernel = app.add_subcommand(
      "kernel", "relaxation kernel by Mittag-Leffler and contour routes");
  cli_detail::add_alpha(kernel, cfg);
  kernel->add_option("--lambda", cfg.lambda, "eigenvalue, > 0")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  kernel->add_option("--tmax", cfg.tmax, "largest evaluation time, > 0")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cli_detail::add_common(kernel, cfg);

  auto* field = app.add_subcommand(
      "field-stats", "Monte Carlo mean/std of the FEM field at t = 1");
  cli_detail::add_alpha(field, cfg);
  field->add_option("--cells", cfg.modes, "mesh cells M (tau = h = 1/M)")
      ->check(CLI::Range(std::size_t{2}, std::size_t{4096}))
      ->default_val(std::size_t{32});
  field->add_option("--epsilon", cfg.epsilon, "noise amplitude, >= 0")
      ->check(CLI::NonNegativeNumber)
      ->default_val(0.1);
  field
      ->add_option("--realizations", cfg.realizations,
                   "independent realizations")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}))
      ->default_val(std::size_t{1000});
  cli_detail::add_common(field, cfg);

  auto* conv = app.add_subcommand(
      "convergence", "Monte Carlo temporal convergence study at t = 1");
  cli_detail::add_alpha(conv, cfg);
  std::string levels_text = "2:6";
  conv->add_option("--levels", levels_text, "level range kmin:kmax, tau_k = 2^-k")
      ->check(cli_detail::levels_format())
      ->capture_default_str();
  conv->add_option("--kref", cfg.k_ref,
                   "reference level, tau_ref = 2^-kref (>= kmax)")
      ->check(CLI::Range(1, 20))
      ->capture_default_str();
  conv->add_option("--modes", cfg.modes, "spectral modes")
      ->check(CLI::Range(std::size_t{1}, std::size_t{4096}))
      ->capture_default_str();
  conv
      ->add_option("--realizations", cfg.realizations,
                   "independent realizations")
      ->check(CLI::Range(std::size_t{1}, std::size_t{1000000}))
      ->capture_default_str();
  conv->add_option("--epsilon", cfg.epsilon,
                   "noise amplitude (0 = deterministic study)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  conv->add_option("--example", cfg.example, "forcing family")
      ->check(CLI::IsMember({"frac", "parabolic"}))
      ->capture_default_str();
  cli_detail::add_common(conv, cfg);

  auto* selftest = app.add_subcommand(
      "selftest", "run the built-in property suite and report per group");
  cli_detail::add_common(selftest, cfg);

  // Hoist --config in front of the subcommand token, then hand CLI11 the
  // reversed token list its vector overload expects.
  std::vector<std::string> tokens;
  std::vector<std::string> config_tokens;
  for (int i = 1; i < argc; ++i) {
    const std::string tok = argv[i];
    if (tok == "--config" && i + 1 < argc) {
      config_tokens.push_back(tok);
      config_tokens.push_back(argv[++i]);
    } else if (tok.rfind("--config=", 0) == 0) {
      config_tokens.push_back(tok);
    } else {
      tokens.push_back(tok);
    }
  }
  std::vector<std::string> ordered = config_tokens;
  ordered.insert(ordered.end(), tokens.begin(), tokens.end());
  std::reverse(ordered.begin(), ordered.end());
  app.parse(ordered);

  for (CLI::App* sub : app.get_subcommands()) {
    cfg.subcommand = sub->get_name();
  }
  if (cfg.subcommand == "convergence") {
    const auto colon = levels_text.find(':');
    cfg.k_min = std::stoi(levels_text.substr(0, colon));
    cfg.k_max = std::stoi(levels_text.substr(colon + 1));
    if (cfg.k_ref < cfg.k_max) {
      throw CLI::ValidationError(
          "--kref", "reference level must be at least kmax (tau_ref finer "
                    "than every level)");
    }
  }
  return cfg;
}

}  // namespace fracspde
