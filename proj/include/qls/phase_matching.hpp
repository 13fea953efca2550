#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qls/errors.hpp"

namespace qls {

/// Beam direction in an arbitrary consistent unit system. Only directions and
/// integer combinations matter; |k| = omega/c is deliberately not enforced.
struct WaveVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend WaveVector operator+(const WaveVector& a, const WaveVector& b) {
    return {a.x + b.x, a.y + b.y, a.z + b.z};
  }
  friend WaveVector operator-(const WaveVector& a, const WaveVector& b) {
    return {a.x - b.x, a.y - b.y, a.z - b.z};
  }
  friend WaveVector operator-(const WaveVector& a) { return {-a.x, -a.y, -a.z}; }
  friend WaveVector operator*(double c, const WaveVector& a) {
    return {c * a.x, c * a.y, c * a.z};
  }
  friend bool operator==(const WaveVector& a, const WaveVector& b) = default;
};

inline double dot(const WaveVector& a, const WaveVector& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}

inline WaveVector cross(const WaveVector& a, const WaveVector& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const WaveVector& a) { return std::sqrt(dot(a, a)); }

/// Direction-only parallelism test: true iff the cross product is negligible
/// relative to the vector magnitudes AND the vectors point the same way.
/// The zero vector is parallel to nothing (its dot product is never positive).
inline bool parallel_same_direction(const WaveVector& a, const WaveVector& b) {
  constexpr double kTol = 1e-9;
  return norm(cross(a, b)) <= kTol * norm(a) * norm(b) && dot(a, b) > 0.0;
}

/// Probe beam plus the n classical pulse beams it may mix with.
struct BeamGeometry {
  WaveVector k_probe;
  std::vector<WaveVector> k_classical;

  std::size_t n_classical() const { return k_classical.size(); }
};

/// Outcome of the geometry validation. When invalid, `b` and `signs` hold the
/// first offending combination found in canonical order (total order
/// ascending, then lexicographic coefficients, then sign patterns): the
/// vector sum_i signs[i]*b[i]*k_i points along k_probe. Entries with b[i] = 0
/// carry sign +1 by convention.
struct GeometryCheck {
  bool valid = true;
  std::vector<int> b;
  std::vector<int> signs;

  /// The offending signed combination itself (zero vector when valid).
  WaveVector combination(const BeamGeometry& geometry) const {
    WaveVector sum;
    for (std::size_t i = 0; i < b.size(); ++i) {
      sum = sum + (static_cast<double>(signs[i] * b[i]) * geometry.k_classical[i]);
    }
    return sum;
  }

  explicit operator bool() const { return valid; }
};

namespace detail {

// Depth-first scan over sign assignments for a fixed coefficient vector b.
inline bool signs_hit_probe(const BeamGeometry& g, const std::vector<int>& b,
                            std::vector<int>& signs, std::size_t i, WaveVector acc) {
  if (i == b.size()) return parallel_same_direction(acc, g.k_probe);
  if (b[i] == 0) {
    signs[i] = 1;
    return signs_hit_probe(g, b, signs, i + 1, acc);
  }
  for (int s : {+1, -1}) {
    signs[i] = s;
    if (signs_hit_probe(g, b, signs, i + 1,
                        acc + (static_cast<double>(s * b[i]) * g.k_classical[i]))) {
      return true;
    }
  }
  return false;
}

// Lexicographic scan over coefficient vectors with a fixed total order.
inline bool coeffs_hit_probe(const BeamGeometry& g, int remaining, std::size_t i,
                             std::vector<int>& b, std::vector<int>& signs) {
  if (i + 1 == b.size()) {
    b[i] = remaining;
    return signs_hit_probe(g, b, signs, 0, WaveVector{});
  }
  for (int v = 0; v <= remaining; ++v) {
    b[i] = v;
    if (coeffs_hit_probe(g, remaining - v, i + 1, b, signs)) return true;
  }
  return false;
}

}  // namespace detail

/// Checks the beam-geometry constraint: no signed integer combination of the
/// classical wavevectors with total order in [1, max_order] may point along
/// the probe direction. Returns the first violating combination if any.
/// A geometry with no classical beams is vacuously valid.
inline GeometryCheck is_geometry_valid(const BeamGeometry& geometry, int max_order) {
  if (max_order < 1) throw ValidationError("is_geometry_valid: max_order must be >= 1");
  if (max_order > 12) {
    throw CombinatorialLimitExceeded("is_geometry_valid: max_order > 12");
  }
  const std::size_t n = geometry.n_classical();
  GeometryCheck check;
  if (n == 0) return check;

  std::vector<int> b(n, 0);
  std::vector<int> signs(n, 1);
  for (int total = 1; total <= max_order; ++total) {
    if (detail::coeffs_hit_probe(geometry, total, 0, b, signs)) {
      check.valid = false;
      check.b = b;
      check.signs = signs;
      return check;
    }
  }
  return check;
}

}  // namespace qls
