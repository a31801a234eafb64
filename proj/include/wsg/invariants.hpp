#pragma once

#include <cmath>
#include <optional>

#include "wsg/boundary.hpp"
#include "wsg/geometry.hpp"
#include "wsg/grid.hpp"

namespace wsg {

namespace detail {

// Composite trapezoid weight in one direction. Periodic directions store the
// seam node twice, so the open-endpoint weights sum to the periodic rule.
inline double trap_w(int k, int n, double h) { return h * ((k == 0 || k == n - 1) ? 0.5 : 1.0); }

}  // namespace detail

/// Quadrature of a per-node density over the parameter rectangle.
template <class F>
double integrate_density(const WorldsheetGrid& g, F&& value) {
  double s = 0.0;
  for (int i = 0; i < g.n0; ++i) {
    const double w0 = detail::trap_w(i, g.n0, g.h0());
    for (int j = 0; j < g.n1; ++j) s += w0 * detail::trap_w(j, g.n1, g.h1()) * value(i, j);
  }
  return s;
}

/// Worldsheet area: integral of sqrt|det gamma|.
inline double area(const WorldsheetGrid& g, const GeometryFields& F) {
  return integrate_density(g, [&](int i, int j) { return std::sqrt(std::abs(F.metric.det(i, j))); });
}

/// Bulk curvature integral: sqrt|det gamma| * R.
inline double gauss_bonnet_bulk(const WorldsheetGrid& g, const GeometryFields& F) {
  return integrate_density(
      g, [&](int i, int j) { return std::sqrt(std::abs(F.metric.det(i, j))) * F.R_scalar(i, j); });
}

/// Integral of the twist-curvature density (no metric factor), reported raw
/// and divided by 2 pi.
struct ChernIntegral {
  double raw = 0.0;
  double over_2pi = 0.0;
};

inline ChernIntegral chern_integral(const WorldsheetGrid& g, const GeometryFields& F) {
  ChernIntegral c;
  c.raw = integrate_density(g, [&](int i, int j) { return F.omega_tilde(i, j); });
  c.over_2pi = c.raw / (2.0 * M_PI);
  return c;
}

/// Euler characteristic with the geodesic-curvature boundary term:
/// chi = (1/4pi) [ integral sqrt|gamma| R + 2 * sum over physical ends of
/// the proper-time integral of k ].
///
/// Lorentzian worldsheets have signature-ambiguous boundary contributions;
/// with strict = true the computation refuses, otherwise the value is
/// emitted with an advisory flag.
struct EulerCharacteristic {
  double chi = 0.0;
  bool advisory = false;
};

inline EulerCharacteristic euler_characteristic(const WorldsheetGrid& g, const GeometryFields& F,
                                                bool strict = true) {
  EulerCharacteristic out;
  if (g.bg.signature == Signature::lorentzian) {
    if (strict)
      throw UnsupportedError(
          "Euler characteristic in lorentzian mode is signature-ambiguous at the ends; "
          "rerun in euclidean mode or disable strict topology checks");
    out.advisory = true;
  }
  double boundary = 0.0;
  if (!g.closed1) {
    for (BoundaryId b : {BoundaryId::xi1_min, BoundaryId::xi1_max}) {
      const bool physical = (b == BoundaryId::xi1_min) ? g.physical_min_edge : g.physical_max_edge;
      if (!physical) continue;
      const BoundaryStrip s = boundary_frame(g, F, b);
      for (int i = 0; i < s.n; ++i) boundary += s.weight(i) * s.k[i];
    }
  }
  out.chi = (gauss_bonnet_bulk(g, F) + 2.0 * boundary) / (4.0 * M_PI);
  return out;
}

/// The three action integrals and their weighted sum.
struct ActionValues {
  double I0 = 0, I1 = 0, I2 = 0, S = 0;
};

inline ActionValues action_values(const WorldsheetGrid& g, const GeometryFields& F, const Couplings& c) {
  ActionValues v;
  v.I0 = area(g, F);
  v.I1 = gauss_bonnet_bulk(g, F);
  v.I2 = chern_integral(g, F).raw;
  v.S = -c.mu * v.I0 - c.alpha * v.I1 - c.beta * v.I2;
  return v;
}

}  // namespace wsg
