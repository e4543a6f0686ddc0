#pragma once

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace fhodge {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Symmetric 2x2 tensor stored by its three independent components.
struct Sym2 {
  double xx = 0.0;
  double xy = 0.0;
  double yy = 0.0;

  static Sym2 identity(double s = 1.0) { return {s, 0.0, s}; }
  static Sym2 diagonal(double a, double b) { return {a, 0.0, b}; }
  static Sym2 symmetrized(const Mat2& m) { return {m(0, 0), 0.5 * (m(0, 1) + m(1, 0)), m(1, 1)}; }

  Mat2 matrix() const {
    Mat2 m;
    m << xx, xy, xy, yy;
    return m;
  }
  double operator()(int i, int j) const {
    if (i != j) return xy;
    return i == 0 ? xx : yy;
  }
  double det() const { return xx * yy - xy * xy; }
  double trace() const { return xx + yy; }
  Sym2 inverse() const {
    const double d = det();
    return {yy / d, -xy / d, xx / d};
  }
  double min_eigenvalue() const {
    const double m = 0.5 * (xx + yy);
    const double r = std::hypot(0.5 * (xx - yy), xy);
    return m - r;
  }
  double max_abs() const { return std::max({std::abs(xx), std::abs(xy), std::abs(yy)}); }
  /// Contraction T(u, v) = u^i T_ij v^j.
  double apply(const Vec2& u, const Vec2& v) const {
    return u[0] * (xx * v[0] + xy * v[1]) + u[1] * (xy * v[0] + yy * v[1]);
  }
  Vec2 operator*(const Vec2& v) const { return {xx * v[0] + xy * v[1], xy * v[0] + yy * v[1]}; }

  friend Sym2 operator+(const Sym2& a, const Sym2& b) { return {a.xx + b.xx, a.xy + b.xy, a.yy + b.yy}; }
  friend Sym2 operator-(const Sym2& a, const Sym2& b) { return {a.xx - b.xx, a.xy - b.xy, a.yy - b.yy}; }
  friend Sym2 operator*(double s, const Sym2& a) { return {s * a.xx, s * a.xy, s * a.yy}; }
};

}  // namespace fhodge
