#pragma once

// Deterministic output emission: CSVs with round-trippable floats, a
// manifest recording the resolved configuration, and gnuplot scripts so the
// core artifact carries no graphics dependency.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fracspde/experiments.hpp"

#ifndef FRACSPDE_VERSION
#define FRACSPDE_VERSION "0.1.0+unknown"
#endif

namespace fracspde {

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps \n endings
  if (!out) {
    throw std::runtime_error("cannot open output file: " + path.string());
  }
  return out;
}

}  // namespace detail

inline void write_weights_csv(const std::filesystem::path& path,
                              const CqWeights& weights) {
  auto out = detail::open_output(path);
  out << "j,b_j\n";
  for (std::size_t j = 0; j < weights.b.size(); ++j) {
    out << j << "," << format_double(weights.b[j]) << "\n";
  }
}

inline void write_field_csv(const std::filesystem::path& path,
                            const std::vector<double>& x,
                            const std::vector<double>& u) {
  auto out = detail::open_output(path);
  out << "x,u\n";
  for (std::size_t i = 0; i < x.size(); ++i) {
    out << format_double(x[i]) << "," << format_double(u[i]) << "\n";
  }
}

inline void write_paths_csv(const std::filesystem::path& path,
                            const NoisePaths& paths) {
  auto out = detail::open_output(path);
  out << "mode,step,increment\n";
  for (std::size_t j = 0; j < paths.modes; ++j) {
    for (std::size_t n = 0; n < paths.steps; ++n) {
      out << (j + 1) << "," << (n + 1) << ","
          << format_double(paths.increment(j, n)) << "\n";
    }
  }
}

struct KernelRow {
  double t = 0.0;
  double via_ml = 0.0;
  double via_contour = 0.0;
};

inline void write_kernel_csv(const std::filesystem::path& path,
                             const std::vector<KernelRow>& rows) {
  auto out = detail::open_output(path);
  out << "t,F_ml,F_contour,abs_diff\n";
  for (const auto& row : rows) {
    out << format_double(row.t) << "," << format_double(row.via_ml) << ","
        << format_double(row.via_contour) << ","
        << format_double(std::abs(row.via_ml - row.via_contour)) << "\n";
  }
}

inline void write_convergence_csv(const std::filesystem::path& path,
                                  const ConvergenceReport& report) {
  auto out = detail::open_output(path);
  out << "k,tau,E_tau,stderr,ratio,order\n";
  for (std::size_t l = 0; l < report.tau.size(); ++l) {
    out << (report.k_min + static_cast<int>(l)) << ","
        << format_double(report.tau[l]) << ","
        << format_double(report.mean_sq_error[l]) << ","
        << format_double(report.std_error[l]) << ",";
    if (l == 0) {
      out << ",";  // no coarser level to compare against
    } else {
      out << format_double(report.ratio[l - 1]) << ","
          << format_double(report.order[l - 1]);
    }
    out << "\n";
  }
}

inline void write_field_stats_csv(const std::filesystem::path& path,
                                  const FieldStats& stats) {
  auto out = detail::open_output(path);
  out << "x,mean,std,sample1,sample2,sample3,exact\n";
  for (std::size_t i = 0; i < stats.x.size(); ++i) {
    out << format_double(stats.x[i]) << "," << format_double(stats.mean[i])
        << "," << format_double(stats.stddev[i]);
    for (std::size_t s = 0; s < 3; ++s) {
      out << ","
          << format_double(s < stats.samples.size() ? stats.samples[s][i]
                                                    : 0.0);
    }
    out << "," << format_double(stats.exact[i]) << "\n";
  }
}

inline void write_manifest(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::string>>& entries) {
  auto out = detail::open_output(path);
  out << "version = " << FRACSPDE_VERSION << "\n";
  for (const auto& [key, value] : entries) {
    out << key << " = " << value << "\n";
  }
}

inline void write_convergence_plot(const std::filesystem::path& path,
                                   const std::string& csv_name,
                                   const ConvergenceReport& report,
                                   double expected_order) {
  // Guide line anchored at the finest level with the theoretical slope.
  const double anchor = report.mean_sq_error.back() /
                        std::pow(report.tau.back(), expected_order);
  auto out = detail::open_output(path);
  out << "set datafile separator ','\n"
         "set logscale xy\n"
         "set xlabel 'tau'\n"
         "set ylabel 'mean squared L2 error'\n"
         "set key left top\n"
         "set grid\n"
         "plot '"
      << csv_name
      << "' every ::1 using 2:3 with linespoints pt 7 title 'E(tau)', \\\n"
         "     "
      << format_double(anchor) << " * x**" << format_double(expected_order)
      << " with lines dashtype 2 title 'slope " << format_double(expected_order)
      << "'\n";
}

inline void write_field_plot(const std::filesystem::path& path,
                             const std::string& csv_name) {
  auto out = detail::open_output(path);
  out << "set datafile separator ','\n"
         "set multiplot layout 1,2\n"
         "set xlabel 'x'\n"
         "set key top right\n"
         "set grid\n"
         "plot '"
      << csv_name
      << "' every ::1 using 1:2 with lines lw 2 title 'mean', \\\n"
         "     '' every ::1 using 1:3 with lines title 'std', \\\n"
         "     '' every ::1 using 1:7 with lines dashtype 2 title 'exact u_d'\n"
         "plot '"
      << csv_name
      << "' every ::1 using 1:4 with lines title 'sample 1', \\\n"
         "     '' every ::1 using 1:5 with lines title 'sample 2', \\\n"
         "     '' every ::1 using 1:6 with lines title 'sample 3'\n"
         "unset multiplot\n";
}

}  // namespace fracspde
