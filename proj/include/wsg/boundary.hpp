#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "wsg/geometry.hpp"
#include "wsg/grid.hpp"

namespace wsg {

/// Action couplings: tension mu (1/length^2), dimensionless alpha (intrinsic
/// curvature term) and beta (twist term), optional endpoint mass M.
struct Couplings {
  double mu = 1.0;
  double alpha = 0.0;
  double beta = 0.0;
  double M = 0.0;

  void validate() const {
    if (!(mu > 0.0)) throw ConsistencyError("invalid couplings: mu must be positive");
  }
};

/// Per-node ambient-Riemann projections entering the third-order boundary
/// condition in a general background. Both projections vanish for flat and
/// constant-curvature backgrounds; nonzero tables are user-supplied.
struct RiemannBoundaryTable {
  std::vector<Vec2> vhvn;   // R_{mu nu rho sigma} v^mu eta^nu v^rho n^{sigma i}
  std::vector<Vec2> nnnve;  // R_{mu nu rho sigma} n^{mu k} n^{nu l} n^{rho i} v^sigma eps_{kl}

  static RiemannBoundaryTable zero(int n) {
    RiemannBoundaryTable t;
    t.vhvn.assign(n, Vec2{0, 0});
    t.nnnve.assign(n, Vec2{0, 0});
    return t;
  }
};

/// End-worldline frame and curvature data along one xi1 = const edge.
///
/// v^a is the unit end tangent (gamma(v,v) = -1 on timelike ends, +1 in
/// euclidean mode), eta^a the unit inward normal, gamma(v,eta) = 0. sigma
/// records the orientation of the worldsheet area tensor relative to (v,
/// eta): eps^{ab} = sigma (v^a eta^b - eta^a v^b); it is +1 at xi1_min and
/// -1 at xi1_max.
struct BoundaryStrip {
  BoundaryId which = BoundaryId::xi1_min;
  int j = 0;
  int inward_sign = +1;
  double sigma = +1.0;
  double tangent_sign = -1.0;  // gamma(v,v)
  int n = 0;
  double h0 = 0;
  bool closed0 = false;

  std::vector<Vec2> v, eta;   // worldsheet-index components
  std::vector<double> lapse;  // d tau / d xi0 = sqrt|gamma_00|
  std::vector<Vec2> K_par, K_mix, K_perp;
  std::vector<double> k;          // geodesic curvature w.r.t. the stored eta
  std::vector<double> R_boundary; // one-sided boundary values of the scalar curvature
  std::vector<double> Omega_boundary;
  std::vector<double> twist;      // v^a omega_a^{12}

  /// Trapezoid weight for proper-time integrals along the end. Periodic
  /// (closed0) ends store the seam node twice, so the half-weight endpoint
  /// rule is the periodic rule there as well.
  double weight(int i) const { return h0 * lapse[i] * ((i == 0 || i == n - 1) ? 0.5 : 1.0); }
};

namespace detail {

inline double line_d1(const std::vector<double>& f, int k, bool closed, double h) {
  const int n = static_cast<int>(f.size());
  return d1_line<double>([&](int m) { return f[m]; }, k, n, closed, h);
}

inline Vec2 line_d1(const std::vector<Vec2>& f, int k, bool closed, double h) {
  const int n = static_cast<int>(f.size());
  return d1_line<Vec2>([&](int m) { return f[m]; }, k, n, closed, h);
}

}  // namespace detail

/// Geodesic curvature k = eta_a (v^b nabla_b v^a) from the strip's stored
/// frame; flipping eta flips k.
inline void compute_geodesic_curvature(const WorldsheetGrid& g, const GeometryFields& F, BoundaryStrip& s) {
  std::vector<Vec2> vfield = s.v;
  s.k.resize(s.n);
  for (int i = 0; i < s.n; ++i) {
    const Vec2 dv = detail::line_d1(vfield, i, s.closed0, g.h0());
    const std::array<Sym2, 2>& G = F.Gamma_ws(i, s.j);
    const Sym2& ga = F.metric.gamma(i, s.j);
    const double v0 = s.v[i][0];
    Vec2 acc;  // v^b nabla_b v^a = v^0 d0 v^a + Gamma^a_{bc} v^b v^c
    for (int a = 0; a < 2; ++a) {
      double x = v0 * dv[a];
      for (int b = 0; b < 2; ++b)
        for (int c = 0; c < 2; ++c) x += G[a](b, c) * s.v[i][b] * s.v[i][c];
      acc[a] = x;
    }
    double k = 0.0;
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) k += ga(a, b) * s.eta[i][a] * acc[b];
    s.k[i] = k;
  }
}

/// Build the end-worldline frame and curvature projections for one end.
/// Throws NullEndError when the end tangent norm is below the null threshold
/// (the standard tension-only string end).
inline BoundaryStrip boundary_frame(const WorldsheetGrid& g, const GeometryFields& F, BoundaryId b) {
  const BoundaryNodes bn = boundary_nodes(g, b);
  BoundaryStrip s;
  s.which = b;
  s.j = bn.j;
  s.inward_sign = bn.inward_sign;
  s.sigma = (b == BoundaryId::xi1_min) ? +1.0 : -1.0;
  s.n = g.n0;
  s.h0 = g.h0();
  s.closed0 = g.closed0;
  s.tangent_sign = (g.bg.signature == Signature::lorentzian) ? -1.0 : +1.0;

  double gmax = 0.0;
  for (int i = 0; i < g.n0; ++i)
    for (int jj = 0; jj < g.n1; ++jj) {
      const Sym2& ga = F.metric.gamma(i, jj);
      gmax = std::max({gmax, std::abs(ga.m00), std::abs(ga.m01), std::abs(ga.m11)});
    }
  std::vector<int> null_nodes;
  for (int i = 0; i < g.n0; ++i)
    if (std::abs(F.metric.gamma(i, s.j).m00) < 1e-6 * gmax) null_nodes.push_back(i);
  if (!null_nodes.empty())
    throw NullEndError("end " + to_string(b) + " is null at " + std::to_string(null_nodes.size()) +
                           " node(s): the end worldline moves at the speed of light",
                       null_nodes);

  s.v.resize(s.n);
  s.eta.resize(s.n);
  s.lapse.resize(s.n);
  s.K_par.resize(s.n);
  s.K_mix.resize(s.n);
  s.K_perp.resize(s.n);
  s.R_boundary.resize(s.n);
  s.Omega_boundary.resize(s.n);
  s.twist.resize(s.n);

  for (int i = 0; i < s.n; ++i) {
    const Sym2& ga = F.metric.gamma(i, s.j);
    const double lapse = std::sqrt(std::abs(ga.m00));
    s.lapse[i] = lapse;
    const Vec2 v{1.0 / lapse, 0.0};
    // eta: inward candidate orthogonalized against v, unit spacelike.
    Vec2 c{0.0, static_cast<double>(s.inward_sign)};
    auto ip = [&](const Vec2& x, const Vec2& y) {
      return ga.m00 * x[0] * y[0] + ga.m01 * (x[0] * y[1] + x[1] * y[0]) + ga.m11 * x[1] * y[1];
    };
    const double vv = ip(v, v);  // = tangent_sign up to rounding
    Vec2 u = c - (ip(c, v) / vv) * v;
    const double uu = ip(u, u);
    s.v[i] = v;
    s.eta[i] = (1.0 / std::sqrt(uu)) * u;

    const std::array<Sym2, 2>& K = F.K(i, s.j);
    for (int nrm = 0; nrm < 2; ++nrm) {
      auto contract = [&](const Vec2& x, const Vec2& y) {
        return K[nrm].m00 * x[0] * y[0] + K[nrm].m01 * (x[0] * y[1] + x[1] * y[0]) + K[nrm].m11 * x[1] * y[1];
      };
      s.K_par[i][nrm] = contract(s.v[i], s.v[i]);
      s.K_mix[i][nrm] = contract(s.v[i], s.eta[i]);
      s.K_perp[i][nrm] = contract(s.eta[i], s.eta[i]);
    }
    s.R_boundary[i] = F.R_scalar(i, s.j);
    s.Omega_boundary[i] = F.Omega(i, s.j);
    s.twist[i] = s.v[i][0] * F.omega(i, s.j)[0];
  }
  compute_geodesic_curvature(g, F, s);
  return s;
}

/// Completeness residual max over the strip:
/// gamma_ab - (eta_a eta_b + sign(v,v) v_a v_b).
inline double completeness_residual(const WorldsheetGrid& g, const GeometryFields& F, const BoundaryStrip& s) {
  double r = 0.0;
  for (int i = 0; i < s.n; ++i) {
    const Sym2& ga = F.metric.gamma(i, s.j);
    auto lower = [&](const Vec2& x) {
      return Vec2{ga.m00 * x[0] + ga.m01 * x[1], ga.m01 * x[0] + ga.m11 * x[1]};
    };
    const Vec2 vl = lower(s.v[i]), el = lower(s.eta[i]);
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        const double rec = el[a] * el[b] + s.tangent_sign * vl[a] * vl[b];
        r = std::max(r, std::abs(ga(a, b) - rec));
      }
    // orthogonality
    double ve = 0.0;
    for (int a = 0; a < 2; ++a) ve += lower(s.v[i])[a] * s.eta[i][a];
    r = std::max(r, std::abs(ve));
  }
  return r;
}

/// O(2)-covariant proper-time derivative along the end:
/// Dtilde f^i = v^0 d0 f^i + twist * (eps-action), with omega pulled back to
/// the end worldline.
inline std::vector<Vec2> end_covariant_derivative(const BoundaryStrip& s, const std::vector<Vec2>& f) {
  if (static_cast<int>(f.size()) != s.n) throw ValidationError("field length does not match the strip");
  if (s.n < 3) throw ValidationError("end covariant derivative requires at least 3 boundary nodes");
  std::vector<Vec2> out(s.n);
  for (int i = 0; i < s.n; ++i) {
    const Vec2 df = detail::line_d1(f, i, s.closed0, s.h0);
    const double v0 = s.v[i][0];
    out[i][0] = v0 * df[0] + s.twist[i] * f[i][1];
    out[i][1] = v0 * df[1] - s.twist[i] * f[i][0];
  }
  return out;
}

/// Closed-form boundary values implied by the boundary conditions for an
/// extremal sheet, expressed in the reporting convention fixed by the sign
/// audit (see SignAuditRecord).
struct PredictedBoundaryValues {
  double K_par_norm2 = 0.0;
  double R_boundary = 0.0;
  double Omega_boundary = 0.0;
  double k_boundary = 0.0;  // geodesic curvature of massive ends, 0 for M = 0
};

inline PredictedBoundaryValues predicted_boundary_values(const Couplings& c) {
  c.validate();
  const double ab = c.alpha + 0.5 * c.M;  // effective coefficient in the second-order condition
  PredictedBoundaryValues p;
  if (c.beta != 0.0) {
    if (!(ab > 0.0))
      throw ConsistencyError("boundary-value algebra requires alpha > 0 when beta != 0 (alpha = " +
                             std::to_string(c.alpha) + ")");
    const double d = ab * ab + c.beta * c.beta;
    p.K_par_norm2 = c.mu * c.beta * c.beta / (2.0 * ab * d);
    p.R_boundary = (c.mu / ab) * (ab * ab - c.beta * c.beta) / d;
    p.Omega_boundary = 2.0 * c.mu * c.beta / d;
    p.k_boundary = (c.M > 0.0) ? c.mu * (ab * ab - c.beta * c.beta) / (2.0 * ab * d) : 0.0;
  } else {
    if (!(ab > 0.0))
      throw ConsistencyError("boundary-value algebra requires alpha > 0 when beta = 0 (alpha = " +
                             std::to_string(c.alpha) + ")");
    p.K_par_norm2 = 0.0;
    p.R_boundary = c.mu / ab;
    p.Omega_boundary = 0.0;
    p.k_boundary = (c.M > 0.0) ? c.mu / (2.0 * ab) : 0.0;
  }
  return p;
}

/// Boundary-condition residuals per node. Under the audited convention the
/// curvature block enters the tangential condition with a minus sign:
///   r1   = mu - (alpha R + beta Omega + M k)
///   r3^i = (alpha + M/2) K_par^i + sigma beta (eps K_mix)^i
///   r2^i = Dtilde[ alpha (K_mix^i + T1^i) + sigma beta ((eps K_par)^i + T2^i / 2) ]
/// where T1, T2 are the ambient-Riemann projections (zero tables for flat
/// and constant-curvature backgrounds reduce r2 to the flat form bit-exactly).
struct BcResiduals {
  std::vector<double> r1;
  std::vector<Vec2> r2, r3;
  double linf_r1 = 0, linf_r2 = 0, linf_r3 = 0;
  double l2_r1 = 0, l2_r2 = 0, l2_r3 = 0;
};

inline BcResiduals bc_residuals(const BoundaryStrip& s, const Couplings& c, const RiemannBoundaryTable& table) {
  c.validate();
  if (static_cast<int>(table.vhvn.size()) != s.n || static_cast<int>(table.nnnve.size()) != s.n)
    throw ValidationError("Riemann boundary table length does not match the strip");
  BcResiduals r;
  r.r1.resize(s.n);
  r.r3.resize(s.n);
  const double ab = c.alpha + 0.5 * c.M;
  std::vector<Vec2> b2vec(s.n);
  for (int i = 0; i < s.n; ++i) {
    r.r1[i] = c.mu - (c.alpha * s.R_boundary[i] + c.beta * s.Omega_boundary[i] + c.M * s.k[i]);
    const Vec2 em = eps_apply(s.K_mix[i]);
    const Vec2 ep = eps_apply(s.K_par[i]);
    for (int n = 0; n < 2; ++n) {
      r.r3[i][n] = ab * s.K_par[i][n] + s.sigma * c.beta * em[n];
      b2vec[i][n] = c.alpha * (s.K_mix[i][n] + table.vhvn[i][n]) +
                    s.sigma * c.beta * (ep[n] + 0.5 * table.nnnve[i][n]);
    }
  }
  r.r2 = end_covariant_derivative(s, b2vec);
  double s1 = 0, s2 = 0, s3 = 0;
  for (int i = 0; i < s.n; ++i) {
    r.linf_r1 = std::max(r.linf_r1, std::abs(r.r1[i]));
    r.linf_r2 = std::max({r.linf_r2, std::abs(r.r2[i][0]), std::abs(r.r2[i][1])});
    r.linf_r3 = std::max({r.linf_r3, std::abs(r.r3[i][0]), std::abs(r.r3[i][1])});
    s1 += r.r1[i] * r.r1[i];
    s2 += norm2(r.r2[i]);
    s3 += norm2(r.r3[i]);
  }
  r.l2_r1 = std::sqrt(s1 / s.n);
  r.l2_r2 = std::sqrt(s2 / s.n);
  r.l2_r3 = std::sqrt(s3 / s.n);
  return r;
}

}  // namespace wsg
