#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace qls {

/// Uniform frequency grid over [omega_min, omega_max], endpoints included.
/// Frequencies are wavenumbers in cm^-1 and must be positive.
struct FrequencyGrid {
  double omega_min = 0.0;
  double omega_max = 0.0;
  int n_points = 0;

  FrequencyGrid() = default;
  FrequencyGrid(double omega_min_, double omega_max_, int n_points_)
      : omega_min(omega_min_), omega_max(omega_max_), n_points(n_points_) {
    if (!(omega_min > 0.0))
      throw std::invalid_argument("FrequencyGrid: omega_min must be positive, got " +
                                  std::to_string(omega_min));
    if (!(omega_max > omega_min))
      throw std::invalid_argument("FrequencyGrid: omega_max must exceed omega_min");
    if (n_points < 2)
      throw std::invalid_argument("FrequencyGrid: need at least 2 points, got " +
                                  std::to_string(n_points));
  }

  double spacing() const { return (omega_max - omega_min) / (n_points - 1); }

  double point(int i) const { return omega_min + spacing() * i; }

  /// Grid with the same bounds and doubled resolution (2n-1 points keeps the
  /// original nodes as a subset).
  FrequencyGrid refined() const { return FrequencyGrid(omega_min, omega_max, 2 * n_points - 1); }

  bool operator==(const FrequencyGrid&) const = default;
};

/// Trapezoid weight for node i: spacing * (1/2 at the ends, 1 inside).
inline double trapezoid_weight(const FrequencyGrid& g, int i) {
  const double h = g.spacing();
  return (i == 0 || i == g.n_points - 1) ? 0.5 * h : h;
}

/// Trapezoid quadrature of f over the grid, summed left to right so the
/// result is independent of any outer parallelism.
template <typename F>
auto trapezoid(const FrequencyGrid& g, F&& f) -> decltype(f(0.0)) {
  decltype(f(0.0)) acc{};
  for (int i = 0; i < g.n_points; ++i) acc += trapezoid_weight(g, i) * f(g.point(i));
  return acc;
}

}  // namespace qls
