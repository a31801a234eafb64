#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "wsg/background.hpp"
#include "wsg/errors.hpp"
#include "wsg/grid.hpp"
#include "wsg/math.hpp"

namespace wsg {

// Conventions used throughout:
//   K_ab^i     = g(n^i, D_a e_b)            (D = ambient covariant derivative)
//   omega_a^ij = g(n^i, D_a n^j)            (antisymmetric in i,j)
//   Omega_ab^ij = d_a omega_b^ij - d_b omega_a^ij
//   OmegaTilde = (1/2) eps_ij eps^ab Omega_ab^ij = 2 (d0 w1 - d1 w0), w = omega^12
//   eps_12 = +1 in the smoothed frame order, eps^01 = +1 as a density.
// The frame (t0, t1, n1, n2) is oriented so its coordinate determinant is
// positive; all orientation-sensitive outputs are tied to that choice.

struct MetricField {
  Field<Sym2> gamma, gamma_inv;
  Field<double> det;
};

struct FrameField {
  Field<Vec4> t0, t1;  // orthonormal tangents, t0 along xi0
  Field<Vec4> n1, n2;  // orthonormal spacelike normals
};

struct GeometryFields {
  EmbeddingDerivatives deriv;
  Field<Met4> gmet;                     // ambient metric at the nodes
  MetricField metric;
  FrameField frames;
  Field<std::array<Sym2, 2>> K;         // K_ab^i, i in {0,1} for normals 1,2
  Field<Vec2> K_mean;                   // K^i = gamma^{ab} K_ab^i
  Field<std::array<Sym2, 2>> dgamma;    // d_c gamma_ab, index [c]
  Field<std::array<Sym2, 2>> Gamma_ws;  // worldsheet Gamma^a_{bc}
  Field<Vec2> omega;                    // omega_a^{12}, a in {0,1}
  Field<double> omega_tilde;            // curl form
  Field<double> R0101;                  // intrinsic Riemann component (finite differences)
  Field<double> R_scalar;               // intrinsic scalar curvature, 2 R0101 / det
  Field<double> Omega;                  // omega_tilde / sqrt|det gamma|
};

inline Field<Met4> ambient_metric_field(const WorldsheetGrid& g) {
  Field<Met4> out(g.n0, g.n1);
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) out(i, j) = metric_at(g.bg, g.X(i, j));
  return out;
}

inline MetricField induced_metric(const WorldsheetGrid& g, const EmbeddingDerivatives& d,
                                  const Field<Met4>& gmet) {
  MetricField m;
  m.gamma = Field<Sym2>(g.n0, g.n1);
  m.gamma_inv = Field<Sym2>(g.n0, g.n1);
  m.det = Field<double>(g.n0, g.n1);
  std::vector<std::pair<int, int>> degenerate, acausal;
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      const Met4& gm = gmet(i, j);
      Sym2 ga{inner(gm, d.dX0(i, j), d.dX0(i, j)), inner(gm, d.dX0(i, j), d.dX1(i, j)),
              inner(gm, d.dX1(i, j), d.dX1(i, j))};
      const double dt = det(ga);
      const double scale = std::max({std::abs(ga.m00), std::abs(ga.m01), std::abs(ga.m11)});
      if (scale <= 0.0 || std::abs(dt) < 1e-12 * scale * scale) {
        degenerate.emplace_back(i, j);
      } else if ((g.bg.signature == Signature::lorentzian && dt >= 0.0) ||
                 (g.bg.signature == Signature::euclidean && (dt <= 0.0 || ga.m00 <= 0.0))) {
        acausal.emplace_back(i, j);
      }
      m.gamma(i, j) = ga;
      m.det(i, j) = dt;
      m.gamma_inv(i, j) = (std::abs(dt) > 0) ? inverse(ga) : Sym2{};
    }
  auto describe = [](const std::vector<std::pair<int, int>>& nodes) {
    std::string s;
    for (size_t k = 0; k < nodes.size() && k < 8; ++k)
      s += " (" + std::to_string(nodes[k].first) + "," + std::to_string(nodes[k].second) + ")";
    if (nodes.size() > 8) s += " ...";
    return s;
  };
  if (!degenerate.empty())
    throw DegenerateWorldsheetError(
        "induced metric degenerate at " + std::to_string(degenerate.size()) + " node(s):" + describe(degenerate),
        degenerate);
  if (!acausal.empty())
    throw CausalityError("induced metric has wrong determinant sign for the signature mode at " +
                             std::to_string(acausal.size()) + " node(s):" + describe(acausal),
                         acausal);
  return m;
}

inline MetricField induced_metric(const WorldsheetGrid& g) {
  return induced_metric(g, partial_derivatives(g, 1), ambient_metric_field(g));
}

namespace detail {

struct NormalPair {
  Vec4 a, b;
};

// Best-conditioned Gram-Schmidt seed from fixed reference axes. Candidate
// order (e2, e3, e1, e0) makes the flat sheet come out as n1 = e2, n2 = e3.
inline NormalPair seed_frame(const Met4& gm, const Vec4& t0, const Vec4& t1, double s0, double s1) {
  auto project_tangent = [&](const Vec4& v) {
    return v - (inner(gm, v, t0) / s0) * t0 - (inner(gm, v, t1) / s1) * t1;
  };
  const std::array<Vec4, 4> axes = {Vec4{0, 0, 1, 0}, Vec4{0, 0, 0, 1}, Vec4{0, 1, 0, 0}, Vec4{1, 0, 0, 0}};
  constexpr double kSeedThreshold = 0.05;  // squared-norm floor for a usable seed axis
  int first = -1;
  Vec4 n1{};
  for (int k = 0; k < 4; ++k) {
    Vec4 p = project_tangent(axes[k]);
    const double nn = inner(gm, p, p);
    if (nn > kSeedThreshold) {
      n1 = (1.0 / std::sqrt(nn)) * p;
      first = k;
      break;
    }
  }
  if (first < 0) throw FrameSeedError("no reference axis projects onto the normal space at the seed node");
  for (int k = 0; k < 4; ++k) {
    if (k == first) continue;
    Vec4 p = project_tangent(axes[k]);
    p = p - inner(gm, p, n1) * n1;
    const double nn = inner(gm, p, p);
    if (nn > kSeedThreshold) return {n1, (1.0 / std::sqrt(nn)) * p};
  }
  throw FrameSeedError("no second reference axis spans the normal space at the seed node");
}

// Parallel-style transport: project the previous frame onto the normal space
// at the target node and re-orthonormalize. Preserves orientation.
inline NormalPair transport_frame(const Met4& gm, const Vec4& t0, const Vec4& t1, double s0, double s1,
                                  const NormalPair& prev) {
  auto project_tangent = [&](const Vec4& v) {
    return v - (inner(gm, v, t0) / s0) * t0 - (inner(gm, v, t1) / s1) * t1;
  };
  Vec4 a = project_tangent(prev.a);
  const double na = inner(gm, a, a);
  if (!(na > 0.01)) throw FrameSeedError("normal-frame transport degenerated (grid too coarse or surface kinked)");
  a = (1.0 / std::sqrt(na)) * a;
  Vec4 b = project_tangent(prev.b);
  b = b - inner(gm, b, a) * a;
  const double nb = inner(gm, b, b);
  if (!(nb > 0.01)) throw FrameSeedError("normal-frame transport degenerated (grid too coarse or surface kinked)");
  b = (1.0 / std::sqrt(nb)) * b;
  return {a, b};
}

inline NormalPair rotate_pair(const NormalPair& f, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {c * f.a + s * f.b, (-s) * f.a + c * f.b};
}

// Rotation angle taking frame b onto frame a within their common plane.
inline double relative_angle(const Met4& gm, const NormalPair& a, const NormalPair& b) {
  return std::atan2(inner(gm, a.a, b.b), inner(gm, a.a, b.a));
}

}  // namespace detail

/// Orthonormal tangent pair and smoothed orthonormal normal pair.
///
/// The normal gauge is fixed by a Gram-Schmidt seed at the grid origin
/// (reference axes with automatic fallback), a deterministic sweep transport
/// along the xi0 spine and xi1 fibers, and holonomy spreading on periodic
/// directions so the gauge closes smoothly across seams. The frame is
/// oriented: det(t0, t1, n1, n2) > 0.
inline FrameField normal_frame(const WorldsheetGrid& g, const EmbeddingDerivatives& d,
                               const Field<Met4>& gmet, const MetricField& metric) {
  FrameField f;
  f.t0 = Field<Vec4>(g.n0, g.n1);
  f.t1 = Field<Vec4>(g.n0, g.n1);
  f.n1 = Field<Vec4>(g.n0, g.n1);
  f.n2 = Field<Vec4>(g.n0, g.n1);
  const double s0 = (g.bg.signature == Signature::lorentzian) ? -1.0 : 1.0;
  const double s1 = 1.0;

  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      const Met4& gm = gmet(i, j);
      const Vec4& e0 = d.dX0(i, j);
      Vec4 t0 = (1.0 / std::sqrt(std::abs(inner(gm, e0, e0)))) * e0;
      Vec4 u = d.dX1(i, j) - (inner(gm, d.dX1(i, j), t0) / s0) * t0;
      Vec4 t1 = (1.0 / std::sqrt(std::abs(inner(gm, u, u)))) * u;
      f.t0(i, j) = t0;
      f.t1(i, j) = t1;
    }

  Field<detail::NormalPair> np(g.n0, g.n1);
  auto transport_to = [&](int i, int j, const detail::NormalPair& prev) {
    return detail::transport_frame(gmet(i, j), f.t0(i, j), f.t1(i, j), s0, s1, prev);
  };

  // Seed with canonical orientation.
  np(0, 0) = detail::seed_frame(gmet(0, 0), f.t0(0, 0), f.t1(0, 0), s0, s1);
  if (det4({f.t0(0, 0), f.t1(0, 0), np(0, 0).a, np(0, 0).b}) < 0.0)
    np(0, 0).b = (-1.0) * np(0, 0).b;

  // Spine along xi0 at the first xi1 column.
  for (int i = 1; i < g.n0; ++i) np(i, 0) = transport_to(i, 0, np(i - 1, 0));
  if (g.closed0) {
    const double hol = detail::relative_angle(gmet(g.n0 - 1, 0), np(g.n0 - 1, 0), np(0, 0));
    for (int i = 1; i < g.n0; ++i)
      np(i, 0) = detail::rotate_pair(np(i, 0), -hol * i / (g.n0 - 1));
    np(g.n0 - 1, 0) = np(0, 0);
  }

  // Fibers along xi1.
  for (int i = 0; i < g.n0; ++i) {
    for (int j = 1; j < g.n1; ++j) np(i, j) = transport_to(i, j, np(i, j - 1));
    if (g.closed1) {
      const double hol = detail::relative_angle(gmet(i, g.n1 - 1), np(i, g.n1 - 1), np(i, 0));
      for (int j = 1; j < g.n1; ++j)
        np(i, j) = detail::rotate_pair(np(i, j), -hol * j / (g.n1 - 1));
      np(i, g.n1 - 1) = np(i, 0);
    }
  }
  if (g.closed0)
    for (int j = 0; j < g.n1; ++j) np(g.n0 - 1, j) = np(0, j);

  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      f.n1(i, j) = np(i, j).a;
      f.n2(i, j) = np(i, j).b;
    }
  (void)metric;
  return f;
}

namespace detail {

// Ambient covariant derivative of a vector field v along direction a:
// (D_a v)^mu = d_a v^mu + Gamma^mu_{nu lambda} dXa^nu v^lambda.
inline Vec4 pullback_cov(const Christoffel4& gam, const Vec4& dXa, const Vec4& v, const Vec4& dva) {
  Vec4 out = dva;
  for (int m = 0; m < 4; ++m) {
    double s = 0.0;
    for (int n = 0; n < 4; ++n)
      for (int l = 0; l < 4; ++l) s += gam[m][n][l] * dXa[n] * v[l];
    out[m] += s;
  }
  return out;
}

}  // namespace detail

inline void extrinsic_curvature(const WorldsheetGrid& g, GeometryFields& F) {
  F.K = Field<std::array<Sym2, 2>>(g.n0, g.n1);
  F.K_mean = Field<Vec2>(g.n0, g.n1);
  const bool curved = (g.bg.kind != BackgroundKind::flat);
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      const Met4& gm = F.gmet(i, j);
      Vec4 D00 = F.deriv.dX00(i, j), D01 = F.deriv.dX01(i, j), D11 = F.deriv.dX11(i, j);
      if (curved) {
        const Christoffel4 gam = christoffel_at(g.bg, g.X(i, j));
        D00 = detail::pullback_cov(gam, F.deriv.dX0(i, j), F.deriv.dX0(i, j), D00);
        D01 = detail::pullback_cov(gam, F.deriv.dX0(i, j), F.deriv.dX1(i, j), D01);
        D11 = detail::pullback_cov(gam, F.deriv.dX1(i, j), F.deriv.dX1(i, j), D11);
      }
      const std::array<Vec4, 2> nn = {F.frames.n1(i, j), F.frames.n2(i, j)};
      std::array<Sym2, 2> K;
      for (int n = 0; n < 2; ++n)
        K[n] = Sym2{inner(gm, nn[n], D00), inner(gm, nn[n], D01), inner(gm, nn[n], D11)};
      F.K(i, j) = K;
      const Sym2& gi = F.metric.gamma_inv(i, j);
      for (int n = 0; n < 2; ++n)
        F.K_mean(i, j)[n] = gi.m00 * K[n].m00 + 2.0 * gi.m01 * K[n].m01 + gi.m11 * K[n].m11;
    }
}

inline void twist_potential(const WorldsheetGrid& g, GeometryFields& F) {
  const Field<Vec4> dn1_0 = d0(F.frames.n1, g), dn1_1 = d1(F.frames.n1, g);
  const Field<Vec4> dn2_0 = d0(F.frames.n2, g), dn2_1 = d1(F.frames.n2, g);
  F.omega = Field<Vec2>(g.n0, g.n1);
  const bool curved = (g.bg.kind != BackgroundKind::flat);
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      const Met4& gm = F.gmet(i, j);
      Vec4 Dn2_0 = dn2_0(i, j), Dn2_1 = dn2_1(i, j);
      Vec4 Dn1_0 = dn1_0(i, j), Dn1_1 = dn1_1(i, j);
      if (curved) {
        const Christoffel4 gam = christoffel_at(g.bg, g.X(i, j));
        Dn2_0 = detail::pullback_cov(gam, F.deriv.dX0(i, j), F.frames.n2(i, j), Dn2_0);
        Dn2_1 = detail::pullback_cov(gam, F.deriv.dX1(i, j), F.frames.n2(i, j), Dn2_1);
        Dn1_0 = detail::pullback_cov(gam, F.deriv.dX0(i, j), F.frames.n1(i, j), Dn1_0);
        Dn1_1 = detail::pullback_cov(gam, F.deriv.dX1(i, j), F.frames.n1(i, j), Dn1_1);
      }
      // antisymmetrization suppresses round-off in g(n1, D n2) = -g(n2, D n1)
      F.omega(i, j)[0] = 0.5 * (inner(gm, F.frames.n1(i, j), Dn2_0) - inner(gm, F.frames.n2(i, j), Dn1_0));
      F.omega(i, j)[1] = 0.5 * (inner(gm, F.frames.n1(i, j), Dn2_1) - inner(gm, F.frames.n2(i, j), Dn1_1));
    }
}

/// OmegaTilde from the finite-difference curl of omega.
inline Field<double> twist_curvature(const WorldsheetGrid& g, const Field<Vec2>& omega) {
  Field<double> w0(g.n0, g.n1), w1(g.n0, g.n1);
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      w0(i, j) = omega(i, j)[0];
      w1(i, j) = omega(i, j)[1];
    }
  const Field<double> a = d0(w1, g), b = d1(w0, g);
  Field<double> out(g.n0, g.n1);
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) out(i, j) = 2.0 * (a(i, j) - b(i, j));
  return out;
}

/// OmegaTilde expressed through the extrinsic curvature; valid when the
/// ambient Riemann projection onto (e,e,n,n) vanishes (flat or constant
/// curvature).
inline Field<double> flat_form_twist(const WorldsheetGrid& g, const GeometryFields& F) {
  Field<double> out(g.n0, g.n1);
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      const Sym2& gi = F.metric.gamma_inv(i, j);
      const Sym2& K1 = F.K(i, j)[0];
      const Sym2& K2 = F.K(i, j)[1];
      // (K1 ginv K2)_{ab} = K1_{ac} ginv^{cd} K2_{db}
      auto m = [&](int a, int b) {
        double s = 0.0;
        for (int c = 0; c < 2; ++c)
          for (int dd = 0; dd < 2; ++dd) s += K1(a, c) * gi(c, dd) * K2(dd, b);
        return s;
      };
      out(i, j) = 2.0 * (m(0, 1) - m(1, 0));
    }
  return out;
}

/// Derivatives of the induced metric assembled by the product rule from the
/// embedding derivatives (metric compatibility of the ambient connection),
/// and the worldsheet Christoffels built from them. Avoids differencing
/// computed fields, so the accuracy is uniformly second order.
inline void worldsheet_christoffels(const WorldsheetGrid& g, GeometryFields& F) {
  F.dgamma = Field<std::array<Sym2, 2>>(g.n0, g.n1);
  F.Gamma_ws = Field<std::array<Sym2, 2>>(g.n0, g.n1);
  const bool curved = (g.bg.kind != BackgroundKind::flat);
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      const Met4& gm = F.gmet(i, j);
      const Vec4 e[2] = {F.deriv.dX0(i, j), F.deriv.dX1(i, j)};
      Vec4 De[2][2] = {{F.deriv.dX00(i, j), F.deriv.dX01(i, j)},
                       {F.deriv.dX01(i, j), F.deriv.dX11(i, j)}};
      if (curved) {
        const Christoffel4 gam = christoffel_at(g.bg, g.X(i, j));
        for (int a = 0; a < 2; ++a)
          for (int c = 0; c < 2; ++c) De[a][c] = detail::pullback_cov(gam, e[c], e[a], De[a][c]);
      }
      // d_c gamma_ab = g(D_c e_a, e_b) + g(e_a, D_c e_b)
      std::array<Sym2, 2> dg;
      for (int c = 0; c < 2; ++c) {
        auto v = [&](int a, int b) { return inner(gm, De[a][c], e[b]) + inner(gm, e[a], De[b][c]); };
        dg[c] = Sym2{v(0, 0), v(0, 1), v(1, 1)};
      }
      F.dgamma(i, j) = dg;
      const Sym2& gi = F.metric.gamma_inv(i, j);
      std::array<Sym2, 2> G;
      for (int a = 0; a < 2; ++a) {
        auto gam = [&](int b, int c) {
          double s = 0.0;
          for (int dd = 0; dd < 2; ++dd)
            s += 0.5 * gi(a, dd) * (dg[b](dd, c) + dg[c](dd, b) - dg[dd](b, c));
          return s;
        };
        G[a] = Sym2{gam(0, 0), gam(0, 1), gam(1, 1)};
      }
      F.Gamma_ws(i, j) = G;
    }
}

/// Intrinsic curvature from finite differences of the induced metric:
/// R_{0101} = d0 d1 g01 - (d0 d0 g11 + d1 d1 g00) / 2
///            - (d0 g_{0e}) Gamma^e_{11} + (d1 g_{0e}) Gamma^e_{01}
///            + g_{0e} (Gamma^e_{0f} Gamma^f_{11} - Gamma^e_{1f} Gamma^f_{01}),
/// R = 2 R_{0101} / det(gamma).
///
/// The second metric derivatives come from differencing the assembled
/// d gamma field, so the intrinsic route stays independent of the
/// extrinsic-curvature products entering the Gauss equation.
inline void intrinsic_curvature(const WorldsheetGrid& g, GeometryFields& F) {
  Field<double> ddg_0011(g.n0, g.n1), ddg_1100(g.n0, g.n1), ddg_0101(g.n0, g.n1);
  Field<double> dg0_11(g.n0, g.n1), dg1_00(g.n0, g.n1), dg1_01(g.n0, g.n1);
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      dg0_11(i, j) = F.dgamma(i, j)[0].m11;
      dg1_00(i, j) = F.dgamma(i, j)[1].m00;
      dg1_01(i, j) = F.dgamma(i, j)[1].m01;
    }
  {
    const Field<double> a = d0(dg0_11, g), b = d1(dg1_00, g), c = d0(dg1_01, g);
    for (int i = 0; i < g.n0; ++i)
      for (int j = 0; j < g.n1; ++j) {
        ddg_0011(i, j) = a(i, j);
        ddg_1100(i, j) = b(i, j);
        ddg_0101(i, j) = c(i, j);
      }
  }
  F.R0101 = Field<double>(g.n0, g.n1);
  F.R_scalar = Field<double>(g.n0, g.n1);
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      const Sym2& ga = F.metric.gamma(i, j);
      const std::array<Sym2, 2>& dg = F.dgamma(i, j);
      const std::array<Sym2, 2>& G = F.Gamma_ws(i, j);
      double r = ddg_0101(i, j) - 0.5 * ddg_0011(i, j) - 0.5 * ddg_1100(i, j);
      for (int e = 0; e < 2; ++e) {
        r += -dg[0](0, e) * G[e](1, 1) + dg[1](0, e) * G[e](0, 1);
        for (int f = 0; f < 2; ++f)
          r += ga(0, e) * (G[e](0, f) * G[f](1, 1) - G[e](1, f) * G[f](0, 1));
      }
      F.R0101(i, j) = r;
      F.R_scalar(i, j) = 2.0 * r / F.metric.det(i, j);
    }
}

/// Gauss form of the intrinsic curvature, R = K^i K_i - K_ab^i K^{ab}_i.
/// Only valid in a flat background.
inline Field<double> gauss_form(const WorldsheetGrid& g, const GeometryFields& F) {
  if (g.bg.kind != BackgroundKind::flat)
    throw UnsupportedError("the extrinsic-curvature form of the intrinsic curvature requires a flat background");
  Field<double> out(g.n0, g.n1);
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      const Sym2& gi = F.metric.gamma_inv(i, j);
      double val = 0.0;
      for (int n = 0; n < 2; ++n) {
        const Sym2& K = F.K(i, j)[n];
        const double tr = F.K_mean(i, j)[n];
        double k2 = 0.0;
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            for (int c = 0; c < 2; ++c)
              for (int dd = 0; dd < 2; ++dd) k2 += gi(a, c) * gi(b, dd) * K(a, b) * K(c, dd);
        val += tr * tr - k2;
      }
      out(i, j) = val;
    }
  return out;
}

/// Pointwise residuals of the three integrability conditions.
struct IntegrabilityResiduals {
  Field<double> gauss_codazzi;    // R_0101 component
  Field<double> ricci;            // Omega_01^{12} component
  Field<double> codazzi_mainardi; // max over the four (c, i) components
  double max_gauss = 0, max_ricci = 0, max_cm = 0;
};

inline IntegrabilityResiduals integrability_residuals(const WorldsheetGrid& g, const GeometryFields& F) {
  IntegrabilityResiduals R;
  R.gauss_codazzi = Field<double>(g.n0, g.n1);
  R.ricci = Field<double>(g.n0, g.n1);
  R.codazzi_mainardi = Field<double>(g.n0, g.n1);

  // Codazzi-Mainardi: FD of K plus connection terms.
  const Field<std::array<Sym2, 2>> dK0 = d0(F.K, g), dK1 = d1(F.K, g);

  const bool curved = (g.bg.kind != BackgroundKind::flat);
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      const std::array<Sym2, 2>& G = F.Gamma_ws(i, j);
      const std::array<Sym2, 2>& K = F.K(i, j);
      const Riemann4 riem = curved ? riemann_at(g.bg, g.X(i, j)) : Riemann4{};
      const Vec4& e0 = F.deriv.dX0(i, j);
      const Vec4& e1 = F.deriv.dX1(i, j);
      const std::array<Vec4, 2> nn = {F.frames.n1(i, j), F.frames.n2(i, j)};

      // --- Gauss-Codazzi, 0101 component
      double kk = 0.0;
      for (int n = 0; n < 2; ++n) kk += K[n].m00 * K[n].m11 - K[n].m01 * K[n].m01;
      const double proj_g = curved ? riemann_project(riem, e0, e1, e0, e1) : 0.0;
      R.gauss_codazzi(i, j) = F.R0101(i, j) - kk - proj_g;

      // --- Ricci, (a,b)=(0,1), (i,j)=(1,2)
      const Sym2& gi = F.metric.gamma_inv(i, j);
      auto m12 = [&](int a, int b) {
        double s = 0.0;
        for (int c = 0; c < 2; ++c)
          for (int dd = 0; dd < 2; ++dd) s += K[0](a, c) * gi(c, dd) * K[1](dd, b);
        return s;
      };
      const double curl = 0.5 * F.omega_tilde(i, j);  // = Omega_01^{12}
      const double proj_r = curved ? riemann_project(riem, e0, e1, nn[0], nn[1]) : 0.0;
      R.ricci(i, j) = curl - (m12(0, 1) - m12(1, 0)) - proj_r;

      // --- Codazzi-Mainardi, components (c, i)
      // cov-tilde_a K_bc^i = d_a K_bc^i - Gamma^d_{ab} K_dc^i - Gamma^d_{ac} K_bd^i
      //                      + omega_a^{ik} K_bc^k
      auto covK = [&](int a, int b, int c, int n) {
        const std::array<Sym2, 2>& dK = (a == 0) ? dK0(i, j) : dK1(i, j);
        double s = dK[n](b, c);
        for (int dd = 0; dd < 2; ++dd) s -= G[dd](a, b) * K[n](dd, c) + G[dd](a, c) * K[n](b, dd);
        const double w = F.omega(i, j)[a];  // omega_a^{12}
        // omega^{ik} K^k: i=0 (normal 1): +w K^2 ; i=1 (normal 2): -w K^1
        s += (n == 0) ? w * K[1](b, c) : -w * K[0](b, c);
        return s;
      };
      double cmmax = 0.0;
      for (int c = 0; c < 2; ++c)
        for (int n = 0; n < 2; ++n) {
          const Vec4& ec = (c == 0) ? e0 : e1;
          const double proj = curved ? riemann_project(riem, nn[n], ec, e0, e1) : 0.0;
          const double r = covK(0, 1, c, n) - covK(1, 0, c, n) - proj;
          cmmax = std::max(cmmax, std::abs(r));
        }
      R.codazzi_mainardi(i, j) = cmmax;

      R.max_gauss = std::max(R.max_gauss, std::abs(R.gauss_codazzi(i, j)));
      R.max_ricci = std::max(R.max_ricci, std::abs(R.ricci(i, j)));
      R.max_cm = std::max(R.max_cm, cmmax);
    }
  return R;
}

/// Full per-node geometry pipeline.
inline GeometryFields compute_geometry(const WorldsheetGrid& g) {
  GeometryFields F;
  F.deriv = partial_derivatives(g, 2);
  F.gmet = ambient_metric_field(g);
  F.metric = induced_metric(g, F.deriv, F.gmet);
  F.frames = normal_frame(g, F.deriv, F.gmet, F.metric);
  extrinsic_curvature(g, F);
  worldsheet_christoffels(g, F);
  twist_potential(g, F);
  F.omega_tilde = twist_curvature(g, F.omega);
  intrinsic_curvature(g, F);
  F.Omega = Field<double>(g.n0, g.n1);
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j)
      F.Omega(i, j) = F.omega_tilde(i, j) / std::sqrt(std::abs(F.metric.det(i, j)));
  return F;
}

/// Rotate the normal frame by a per-node O(2) angle and shift the twist
/// potential by the same-stencil gradient of the angle field.
struct GaugeRotated {
  FrameField frames;
  Field<Vec2> omega;
};

inline GaugeRotated gauge_rotate(const WorldsheetGrid& g, const GeometryFields& F, const Field<double>& theta) {
  GaugeRotated out;
  out.frames = F.frames;
  const Field<double> dth0 = d0(theta, g), dth1 = d1(theta, g);
  out.omega = Field<Vec2>(g.n0, g.n1);
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      // Rotation direction chosen so that omega^{12} -> omega^{12} + d theta.
      const double c = std::cos(theta(i, j)), s = std::sin(theta(i, j));
      const Vec4 a = F.frames.n1(i, j), b = F.frames.n2(i, j);
      out.frames.n1(i, j) = c * a + (-s) * b;
      out.frames.n2(i, j) = s * a + c * b;
      out.omega(i, j) = {F.omega(i, j)[0] + dth0(i, j), F.omega(i, j)[1] + dth1(i, j)};
    }
  return out;
}

inline double frame_max_residual(const WorldsheetGrid& g, const GeometryFields& F) {
  double r = 0.0;
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      const Met4& gm = F.gmet(i, j);
      const Vec4& n1 = F.frames.n1(i, j);
      const Vec4& n2 = F.frames.n2(i, j);
      r = std::max(r, std::abs(inner(gm, n1, n1) - 1.0));
      r = std::max(r, std::abs(inner(gm, n2, n2) - 1.0));
      r = std::max(r, std::abs(inner(gm, n1, n2)));
      r = std::max(r, std::abs(inner(gm, n1, F.deriv.dX0(i, j))));
      r = std::max(r, std::abs(inner(gm, n1, F.deriv.dX1(i, j))));
      r = std::max(r, std::abs(inner(gm, n2, F.deriv.dX0(i, j))));
      r = std::max(r, std::abs(inner(gm, n2, F.deriv.dX1(i, j))));
    }
  return r;
}

}  // namespace wsg
