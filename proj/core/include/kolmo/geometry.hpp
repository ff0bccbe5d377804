#pragma once

#include <array>
#include <cmath>
#include <string>

namespace kolmo {

/// A point of R^d for d <= 2. Coordinates beyond the dimension are zero.
using Point = std::array<double, 2>;

inline double norm(const Point& x) { return std::hypot(x[0], x[1]); }
inline double dot(const Point& a, const Point& b) { return a[0] * b[0] + a[1] * b[1]; }

inline std::string to_string(const Point& x, int dimension) {
  std::string s = "(" + std::to_string(x[0]);
  if (dimension > 1) s += ", " + std::to_string(x[1]);
  return s + ")";
}

/// Symmetric 2x2 matrix; one-dimensional problems use `xx` only.
struct SymMatrix2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  double trace(int dimension) const { return dimension == 1 ? xx : xx + yy; }
  double frobenius(int dimension) const {
    return dimension == 1 ? std::abs(xx) : std::sqrt(xx * xx + 2.0 * xy * xy + yy * yy);
  }
  /// Eigenvalues in ascending order.
  std::array<double, 2> eigenvalues(int dimension) const {
    if (dimension == 1) return {xx, xx};
    const double mean = 0.5 * (xx + yy);
    const double radius = std::hypot(0.5 * (xx - yy), xy);
    return {mean - radius, mean + radius};
  }
  /// <A v, v>
  double quadratic(const Point& v) const {
    return xx * v[0] * v[0] + 2.0 * xy * v[0] * v[1] + yy * v[1] * v[1];
  }
  /// tr(A H) for symmetric H.
  double contract(const SymMatrix2& h, int dimension) const {
    if (dimension == 1) return xx * h.xx;
    return xx * h.xx + 2.0 * xy * h.xy + yy * h.yy;
  }
  SymMatrix2 operator-(const SymMatrix2& o) const { return {xx - o.xx, xy - o.xy, yy - o.yy}; }
};

/// Axis-aligned cube [lo, hi]^d.
struct Box {
  int dimension = 1;
  double lo = -1.0;
  double hi = 1.0;

  bool contains(const Point& x) const {
    for (int i = 0; i < dimension; ++i) {
      if (x[i] < lo || x[i] > hi) return false;
    }
    return true;
  }
  Box enlarged(double margin) const { return {dimension, lo - margin, hi + margin}; }
};

}  // namespace kolmo
