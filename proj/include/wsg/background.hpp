#pragma once

#include <cmath>
#include <string>

#include "wsg/errors.hpp"
#include "wsg/math.hpp"

namespace wsg {

enum class Signature { lorentzian, euclidean };
enum class BackgroundKind { flat, constant_curvature };

inline std::string to_string(Signature s) { return s == Signature::lorentzian ? "lorentzian" : "euclidean"; }
inline std::string to_string(BackgroundKind k) { return k == BackgroundKind::flat ? "flat" : "constant_curvature"; }

/// Ambient 4-dimensional geometry. Constant-curvature backgrounds are
/// realized in a conformally flat chart g = Omega(x)^2 * (flat metric) with
/// Omega = 1 / (1 + (R/48) sigma), sigma = flat quadratic form of x, so all
/// curvature quantities have closed forms.
struct BackgroundSpacetime {
  Signature signature = Signature::lorentzian;
  BackgroundKind kind = BackgroundKind::flat;
  double scalar_curvature = 0.0;  // ambient R, units 1/length^2; zero when flat

  double eta(int m, int n) const {
    if (m != n) return 0.0;
    return (m == 0 && signature == Signature::lorentzian) ? -1.0 : 1.0;
  }

  double sigma(const Vec4& x) const {
    double s = 0.0;
    for (int m = 0; m < 4; ++m) s += eta(m, m) * x[m] * x[m];
    return s;
  }

  /// Conformal factor of the chart; 1 for flat backgrounds.
  double conformal_factor(const Vec4& x) const {
    if (kind == BackgroundKind::flat) return 1.0;
    const double f = 1.0 + scalar_curvature / 48.0 * sigma(x);
    if (!(f > 0.0) || !std::isfinite(f))
      throw ChartDomainError("point outside the constant-curvature chart (conformal factor " +
                             std::to_string(f) + ")");
    return 1.0 / f;
  }
};

using Christoffel4 = std::array<std::array<std::array<double, 4>, 4>, 4>;  // [mu][nu][lambda]

inline Met4 metric_at(const BackgroundSpacetime& bg, const Vec4& x) {
  const double om = bg.conformal_factor(x);
  Met4 g{};
  for (int m = 0; m < 4; ++m) g[m][m] = om * om * bg.eta(m, m);
  return g;
}

/// Gamma^mu_{nu lambda}; identically zero for flat backgrounds.
inline Christoffel4 christoffel_at(const BackgroundSpacetime& bg, const Vec4& x) {
  Christoffel4 gam{};
  if (bg.kind == BackgroundKind::flat) return gam;
  const double om = bg.conformal_factor(x);  // also checks the chart domain
  // phi = ln Omega, d_mu phi = -(R/24) x_mu * Omega with x_mu = eta_{mu nu} x^nu.
  Vec4 dphi{};
  for (int m = 0; m < 4; ++m) dphi[m] = -bg.scalar_curvature / 24.0 * bg.eta(m, m) * x[m] * om;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int l = 0; l < 4; ++l) {
        double v = 0.0;
        if (m == n) v += dphi[l];
        if (m == l) v += dphi[n];
        if (n == l) v -= bg.eta(n, n) * bg.eta(m, m) * dphi[m];
        gam[m][n][l] = v;
      }
  return gam;
}

using Riemann4 = std::array<std::array<std::array<std::array<double, 4>, 4>, 4>, 4>;

/// R_{mu nu alpha beta}, all indices down. Constant curvature:
/// R_{mnab} = (R/12)(g_ma g_nb - g_mb g_na).
inline Riemann4 riemann_at(const BackgroundSpacetime& bg, const Vec4& x) {
  Riemann4 r{};
  if (bg.kind == BackgroundKind::flat) return r;
  const Met4 g = metric_at(bg, x);
  const double k = bg.scalar_curvature / 12.0;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) r[m][n][a][b] = k * (g[m][a] * g[n][b] - g[m][b] * g[n][a]);
  return r;
}

/// R_{mu nu alpha beta} u^mu v^nu w^alpha z^beta.
inline double riemann_project(const Riemann4& r, const Vec4& u, const Vec4& v, const Vec4& w, const Vec4& z) {
  double s = 0.0;
  for (int m = 0; m < 4; ++m) {
    if (u[m] == 0.0) continue;
    for (int n = 0; n < 4; ++n) {
      if (v[n] == 0.0) continue;
      for (int a = 0; a < 4; ++a) {
        if (w[a] == 0.0) continue;
        for (int b = 0; b < 4; ++b) s += r[m][n][a][b] * u[m] * v[n] * w[a] * z[b];
      }
    }
  }
  return s;
}

}  // namespace wsg
