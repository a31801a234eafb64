#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace wsg {

using Vec4 = std::array<double, 4>;
using Vec2 = std::array<double, 2>;

/// Symmetric 2x2 worldsheet tensor (e.g. induced metric, K components).
struct Sym2 {
  double m00 = 0.0, m01 = 0.0, m11 = 0.0;

  double operator()(int a, int b) const {
    if (a == 0 && b == 0) return m00;
    if (a == 1 && b == 1) return m11;
    return m01;
  }
};

inline Sym2 operator+(const Sym2& x, const Sym2& y) { return {x.m00 + y.m00, x.m01 + y.m01, x.m11 + y.m11}; }
inline Sym2 operator-(const Sym2& x, const Sym2& y) { return {x.m00 - y.m00, x.m01 - y.m01, x.m11 - y.m11}; }
inline Sym2 operator*(double s, const Sym2& x) { return {s * x.m00, s * x.m01, s * x.m11}; }

inline double det(const Sym2& m) { return m.m00 * m.m11 - m.m01 * m.m01; }

inline Sym2 inverse(const Sym2& m) {
  const double d = det(m);
  return {m.m11 / d, -m.m01 / d, m.m00 / d};
}

inline Vec4 operator+(const Vec4& x, const Vec4& y) { return {x[0] + y[0], x[1] + y[1], x[2] + y[2], x[3] + y[3]}; }
inline Vec4 operator-(const Vec4& x, const Vec4& y) { return {x[0] - y[0], x[1] - y[1], x[2] - y[2], x[3] - y[3]}; }
inline Vec4 operator*(double s, const Vec4& x) { return {s * x[0], s * x[1], s * x[2], s * x[3]}; }

inline Vec2 operator+(const Vec2& x, const Vec2& y) { return {x[0] + y[0], x[1] + y[1]}; }
inline Vec2 operator-(const Vec2& x, const Vec2& y) { return {x[0] - y[0], x[1] - y[1]}; }
inline Vec2 operator*(double s, const Vec2& x) { return {s * x[0], s * x[1]}; }

using NormalSym2 = std::array<Sym2, 2>;  // K_ab^i: one Sym2 per normal direction

inline NormalSym2 operator+(const NormalSym2& x, const NormalSym2& y) { return {x[0] + y[0], x[1] + y[1]}; }
inline NormalSym2 operator-(const NormalSym2& x, const NormalSym2& y) { return {x[0] - y[0], x[1] - y[1]}; }
inline NormalSym2 operator*(double s, const NormalSym2& x) { return {s * x[0], s * x[1]}; }

using Met4 = std::array<std::array<double, 4>, 4>;

/// g_{mu nu} u^mu v^nu.
inline double inner(const Met4& g, const Vec4& u, const Vec4& v) {
  double s = 0.0;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) s += g[m][n] * u[m] * v[n];
  return s;
}

inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }
inline double norm2(const Vec2& a) { return dot(a, a); }

/// Levi-Civita on normal indices, eps_{12} = +1 in the fixed frame order.
/// (eps a)_i = eps_{ij} a^j.
inline Vec2 eps_apply(const Vec2& a) { return {a[1], -a[0]}; }

/// eps_{ij} a^i b^j.
inline double eps_contract(const Vec2& a, const Vec2& b) { return a[0] * b[1] - a[1] * b[0]; }

inline double det4(const std::array<Vec4, 4>& c) {
  // Laplace expansion over 3x3 minors.
  auto m3 = [&](int r0, int r1, int r2, int c0, int c1, int c2) {
    return c[r0][c0] * (c[r1][c1] * c[r2][c2] - c[r1][c2] * c[r2][c1]) -
           c[r0][c1] * (c[r1][c0] * c[r2][c2] - c[r1][c2] * c[r2][c0]) +
           c[r0][c2] * (c[r1][c0] * c[r2][c1] - c[r1][c1] * c[r2][c0]);
  };
  return c[0][0] * m3(1, 2, 3, 1, 2, 3) - c[0][1] * m3(1, 2, 3, 0, 2, 3) +
         c[0][2] * m3(1, 2, 3, 0, 1, 3) - c[0][3] * m3(1, 2, 3, 0, 1, 2);
}

}  // namespace wsg
