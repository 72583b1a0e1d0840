#pragma once

// Backward-Euler convolution quadrature for the fractional derivative of
// order 1-alpha: weights are the Taylor coefficients of (1-z)^{1-alpha}.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace fracspde {

struct CqWeights {
  double alpha = 0.0;     // fractional order parameter, in (0,2)
  std::vector<double> b;  // b[0..n], coefficients of (1-z)^{1-alpha}
};

/// Weights b_0..b_n of (1-z)^{1-alpha} via the multiplicative recurrence
/// b_0 = 1, b_j = b_{j-1} (j-2+alpha)/j. Stable for n up to 1e6.
inline CqWeights cq_weights(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw std::invalid_argument("cq_weights: alpha must lie in (0,2)");
  }
  CqWeights w;
  w.alpha = alpha;
  w.b.resize(n + 1);
  w.b[0] = 1.0;
  for (std::size_t j = 1; j <= n; ++j) {
    // At alpha=1 the j=1 factor is zero, so every later weight is an
    // exact floating-point zero and the quadrature degenerates to the
    // identity map.
    w.b[j] = w.b[j - 1] * ((static_cast<double>(j) - 2.0 + alpha) /
                           static_cast<double>(j));
  }
  return w;
}

/// d_n = tau^{alpha-1} sum_{j=0}^{n} b_{n-j} v_j for n < values.size().
inline std::vector<double> discrete_frac_derivative(
    std::span<const double> values, const CqWeights& weights, double tau) {
  if (!(tau > 0.0)) {
    throw std::invalid_argument("discrete_frac_derivative: tau must be > 0");
  }
  if (values.size() > weights.b.size()) {
    throw std::invalid_argument(
        "discrete_frac_derivative: more values than weights");
  }
  const double scale = std::pow(tau, weights.alpha - 1.0);
  std::vector<double> d(values.size());
  for (std::size_t n = 0; n < values.size(); ++n) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= n; ++j) {
      acc += weights.b[n - j] * values[j];
    }
    d[n] = scale * acc;
  }
  return d;
}

}  // namespace fracspde
