#pragma once

#include <array>
#include <cstddef>

namespace fracspde {

// Gauss-Legendre nodes/weights on [-1,1].

inline constexpr std::array<double, 3> kGauss3Nodes = {
    -0.7745966692414834, 0.0, 0.7745966692414834};
inline constexpr std::array<double, 3> kGauss3Weights = {
    5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

inline constexpr std::array<double, 10> kGauss10Nodes = {
    -0.9739065285171717, -0.8650633666889845, -0.6794095682990244,
    -0.4333953941292472, -0.1488743389816312, 0.1488743389816312,
    0.4333953941292472,  0.6794095682990244,  0.8650633666889845,
    0.9739065285171717};
inline constexpr std::array<double, 10> kGauss10Weights = {
    0.0666713443086881, 0.1494513491505806, 0.2190863625159820,
    0.2692667193099963, 0.2955242247147529, 0.2955242247147529,
    0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
    0.0666713443086881};

/// 10-point Gauss-Legendre on [a,b].
template <class F>
auto gauss10(F&& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  using R = decltype(f(mid));
  R acc{};
  for (std::size_t i = 0; i < kGauss10Nodes.size(); ++i) {
    acc += kGauss10Weights[i] * f(mid + half * kGauss10Nodes[i]);
  }
  return half * acc;
}

/// Composite 10-point Gauss-Legendre over `panels` equal panels of [a,b].
template <class F>
auto gauss10_composite(F&& f, double a, double b, std::size_t panels) {
  using R = decltype(f(a));
  R acc{};
  const double width = (b - a) / static_cast<double>(panels);
  for (std::size_t p = 0; p < panels; ++p) {
    acc += gauss10(f, a + width * static_cast<double>(p),
                   a + width * static_cast<double>(p + 1));
  }
  return acc;
}

}  // namespace fracspde
