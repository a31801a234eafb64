#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "wsg/boundary.hpp"
#include "wsg/geometry.hpp"
#include "wsg/grid.hpp"
#include "wsg/invariants.hpp"
#include "wsg/solutions.hpp"

namespace wsg {

/// Normal/tangential deformation components sampled on the grid.
struct DeformationField {
  Field<Vec2> phi_normal;   // Phi_i, components along (n1, n2)
  Field<Vec2> phi_tangent;  // Phi^a, components along (d0 X, d1 X)

  static DeformationField zero(const WorldsheetGrid& g) {
    DeformationField d;
    d.phi_normal = Field<Vec2>(g.n0, g.n1);
    d.phi_tangent = Field<Vec2>(g.n0, g.n1);
    return d;
  }

  double max_abs() const {
    double m = 0.0;
    for (const Vec2& x : phi_normal.data) m = std::max({m, std::abs(x[0]), std::abs(x[1])});
    for (const Vec2& x : phi_tangent.data) m = std::max({m, std::abs(x[0]), std::abs(x[1])});
    return m;
  }
};

/// True when the support stays clear of a 2-node collar at every
/// non-periodic edge (the meaning of an "interior" deformation).
inline bool interior_support(const WorldsheetGrid& g, const DeformationField& d) {
  auto used = [&](int i, int j) {
    return d.phi_normal(i, j) != Vec2{0, 0} || d.phi_tangent(i, j) != Vec2{0, 0};
  };
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      if (!used(i, j)) continue;
      if (!g.closed0 && (i < 2 || i >= g.n0 - 2)) return false;
      if (!g.closed1 && (j < 2 || j >= g.n1 - 2)) return false;
    }
  return true;
}

/// Product bump deformation: component `comp` of the normal (0,1) or
/// tangential (2,3) block, centered at (c0, c1) in parameter space with
/// half-widths (w0, w1).
inline DeformationField make_bump(const WorldsheetGrid& g, int comp, double c0, double c1, double w0,
                                  double w1, double amp = 1.0) {
  DeformationField d = DeformationField::zero(g);
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      const double v = amp * detail::bump((g.xi0(i) - c0) / w0) * detail::bump((g.xi1(j) - c1) / w1);
      if (v == 0.0) continue;
      if (comp < 2)
        d.phi_normal(i, j)[comp] = v;
      else
        d.phi_tangent(i, j)[comp - 2] = v;
    }
  return d;
}

/// X -> X + eps (Phi_i n^i + Phi^a e_a), validated non-degenerate.
inline WorldsheetGrid apply_deformation(const WorldsheetGrid& g, const GeometryFields& F,
                                        const DeformationField& d, double eps) {
  WorldsheetGrid out = g;
  out.generator.reset();  // deformed grids are raw data
  for (int i = 0; i < g.n0; ++i)
    for (int j = 0; j < g.n1; ++j) {
      const Vec2& pn = d.phi_normal(i, j);
      const Vec2& pt = d.phi_tangent(i, j);
      out.X(i, j) = g.X(i, j) + eps * (pn[0] * F.frames.n1(i, j) + pn[1] * F.frames.n2(i, j) +
                                       pt[0] * F.deriv.dX0(i, j) + pt[1] * F.deriv.dX1(i, j));
    }
  out.identify_seams();
  out.validate();
  induced_metric(out);  // degeneracy / causality check; throws when eps is too large
  return out;
}

enum class Functional { I0, I1, I2, S };

inline std::string to_string(Functional f) {
  switch (f) {
    case Functional::I0: return "I0";
    case Functional::I1: return "I1";
    case Functional::I2: return "I2";
    default: return "S";
  }
}

inline double evaluate_functional(const WorldsheetGrid& g, Functional f, const Couplings& c) {
  const GeometryFields F = compute_geometry(g);
  switch (f) {
    case Functional::I0: return area(g, F);
    case Functional::I1: return gauss_bonnet_bulk(g, F);
    case Functional::I2: return chern_integral(g, F).raw;
    default: return action_values(g, F, c).S;
  }
}

/// Default deformation amplitude relative to the embedding's coordinate span.
inline double default_epsilon(const WorldsheetGrid& g) {
  double span = 0.0;
  for (const Vec4& x : g.X.data)
    for (int m = 0; m < 4; ++m) span = std::max(span, std::abs(x[m]));
  return 1e-5 * std::max(span, 1.0);
}

/// Centered finite-difference first variation [F(X + eps dX) - F(X - eps dX)]
/// / (2 eps), the oracle against which every analytic variation formula is
/// checked. Halves eps automatically when the deformed grid degenerates;
/// optional Richardson extrapolation combines eps and eps/2.
inline double fd_variation(Functional f, const WorldsheetGrid& g, const GeometryFields& F,
                           const DeformationField& d, double eps = 0.0, bool richardson = false,
                           const Couplings& c = {}) {
  if (eps == 0.0) eps = default_epsilon(g);
  auto centered = [&](double e) {
    for (int attempt = 0; attempt < 6; ++attempt) {
      try {
        const WorldsheetGrid gp = apply_deformation(g, F, d, +e);
        const WorldsheetGrid gm = apply_deformation(g, F, d, -e);
        const double fp = evaluate_functional(gp, f, c);
        const double fm = evaluate_functional(gm, f, c);
        if (!std::isfinite(fp) || !std::isfinite(fm)) throw ValidationError("non-finite functional value");
        return (fp - fm) / (2.0 * e);
      } catch (const DegenerateWorldsheetError&) {
        e *= 0.5;
      }
    }
    throw DegenerateWorldsheetError("deformation keeps degenerating the grid after repeated halving", {});
  };
  const double v1 = centered(eps);
  if (!richardson) return v1;
  const double v2 = centered(0.5 * eps);
  return (4.0 * v2 - v1) / 3.0;
}

/// Analytic first variation of the area functional: bulk term from the
/// normal part, boundary term from the tangential part (inward eta).
struct AreaVariation {
  double bulk = 0.0;
  double boundary = 0.0;
};

inline AreaVariation analytic_variation_I0(const WorldsheetGrid& g, const GeometryFields& F,
                                           const DeformationField& d) {
  AreaVariation out;
  out.bulk = integrate_density(g, [&](int i, int j) {
    return -std::sqrt(std::abs(F.metric.det(i, j))) * dot(F.K_mean(i, j), d.phi_normal(i, j));
  });
  if (!g.closed1) {
    for (BoundaryId b : {BoundaryId::xi1_min, BoundaryId::xi1_max}) {
      const BoundaryStrip s = boundary_frame(g, F, b);
      for (int i = 0; i < s.n; ++i) {
        const Sym2& ga = F.metric.gamma(i, s.j);
        const Vec2& pt = d.phi_tangent(i, s.j);
        const double eta_phi = ga.m00 * s.eta[i][0] * pt[0] + ga.m01 * (s.eta[i][0] * pt[1] + s.eta[i][1] * pt[0]) +
                               ga.m11 * s.eta[i][1] * pt[1];
        out.boundary += -s.weight(i) * eta_phi;
      }
    }
  }
  return out;
}

/// Tangential variation of the full action:
/// delta_par S = - sum over ends of the proper-time integral of
/// (mu + alpha R + beta Omega) eta_a Phi^a, eta inward.
inline double analytic_tangential_variation(const WorldsheetGrid& g, const GeometryFields& F,
                                            const DeformationField& d, const Couplings& c) {
  double total = 0.0;
  if (g.closed1) return 0.0;
  for (BoundaryId b : {BoundaryId::xi1_min, BoundaryId::xi1_max}) {
    const BoundaryStrip s = boundary_frame(g, F, b);
    for (int i = 0; i < s.n; ++i) {
      const Sym2& ga = F.metric.gamma(i, s.j);
      const Vec2& pt = d.phi_tangent(i, s.j);
      const double eta_phi = ga.m00 * s.eta[i][0] * pt[0] + ga.m01 * (s.eta[i][0] * pt[1] + s.eta[i][1] * pt[0]) +
                             ga.m11 * s.eta[i][1] * pt[1];
      total += -s.weight(i) * (c.mu + c.alpha * s.R_boundary[i] + c.beta * s.Omega_boundary[i]) * eta_phi;
    }
  }
  return total;
}

namespace detail {

// Boundary values of Phi^i and its inward O(2)-covariant derivative,
// using the same grid stencils as the bulk fields.
struct BoundaryPhi {
  std::vector<Vec2> phi, grad_eta_phi;
};

inline BoundaryPhi boundary_phi(const WorldsheetGrid& g, const GeometryFields& F, const BoundaryStrip& s,
                                const DeformationField& d) {
  BoundaryPhi out;
  out.phi.resize(s.n);
  out.grad_eta_phi.resize(s.n);
  const Field<Vec2> dp0 = d0(d.phi_normal, g), dp1 = d1(d.phi_normal, g);
  for (int i = 0; i < s.n; ++i) {
    out.phi[i] = d.phi_normal(i, s.j);
    // nabla-tilde_a Phi^i = d_a Phi^i + omega_a (eps-action), contracted with eta^a.
    const Vec2 w = F.omega(i, s.j);
    Vec2 cov0{dp0(i, s.j)[0] + w[0] * d.phi_normal(i, s.j)[1], dp0(i, s.j)[1] - w[0] * d.phi_normal(i, s.j)[0]};
    Vec2 cov1{dp1(i, s.j)[0] + w[1] * d.phi_normal(i, s.j)[1], dp1(i, s.j)[1] - w[1] * d.phi_normal(i, s.j)[0]};
    out.grad_eta_phi[i] = s.eta[i][0] * cov0 + s.eta[i][1] * cov1;
  }
  return out;
}

// One-end kernels with free signs on the two independent boundary terms;
// the sign audit searches these, the public formulas use the audited values.
inline double boundary_variation_I1_end(const WorldsheetGrid& g, const GeometryFields& F,
                                        const BoundaryStrip& s, const DeformationField& d, double s_grad,
                                        double s_dk, const RiemannBoundaryTable* table = nullptr) {
  const BoundaryPhi bp = boundary_phi(g, F, s, d);
  const std::vector<Vec2> DKmix = end_covariant_derivative(s, s.K_mix);
  double total = 0.0;
  for (int i = 0; i < s.n; ++i) {
    double term = s_grad * dot(s.K_par[i], bp.grad_eta_phi[i]) + s_dk * dot(DKmix[i], bp.phi[i]);
    if (table) term += s_dk * dot(table->vhvn[i], bp.phi[i]);
    total += 2.0 * s.weight(i) * term;
  }
  return total;
}

inline double boundary_variation_I2_end(const WorldsheetGrid& g, const GeometryFields& F,
                                        const BoundaryStrip& s, const DeformationField& d, double s_grad,
                                        double s_dk, const RiemannBoundaryTable* table = nullptr) {
  const BoundaryPhi bp = boundary_phi(g, F, s, d);
  const std::vector<Vec2> DKpar = end_covariant_derivative(s, s.K_par);
  double total = 0.0;
  for (int i = 0; i < s.n; ++i) {
    double term = s_grad * eps_contract(bp.grad_eta_phi[i], s.K_mix[i]) +
                  s_dk * eps_contract(bp.phi[i], DKpar[i]);
    if (table) term += s_dk * 0.5 * dot(table->nnnve[i], bp.phi[i]);
    total += 2.0 * s.weight(i) * term;
  }
  return total;
}

}  // namespace detail

/// Boundary formula for the normal variation of the bulk-curvature integral:
/// 2 * sum over ends of the proper-time integral of
/// [ K_par . grad_eta Phi + (Dtilde K_mix) . Phi ], eta inward.
inline double analytic_boundary_variation_I1(const WorldsheetGrid& g, const GeometryFields& F,
                                             const DeformationField& d,
                                             const RiemannBoundaryTable* table = nullptr) {
  if (g.closed1) return 0.0;
  double total = 0.0;
  for (BoundaryId b : {BoundaryId::xi1_min, BoundaryId::xi1_max}) {
    const BoundaryStrip s = boundary_frame(g, F, b);
    total += detail::boundary_variation_I1_end(g, F, s, d, +1.0, +1.0, table);
  }
  return total;
}

/// Boundary formula for the normal variation of the twist-curvature
/// integral: 2 sigma_end * integral of eps_ij [ K_mix^j grad_eta Phi^i +
/// (Dtilde K_par^j) Phi^i ], eta inward, sigma_end the orientation of the
/// worldsheet area tensor relative to (v, eta_in): +1 at xi1_min, -1 at
/// xi1_max.
inline double analytic_boundary_variation_I2(const WorldsheetGrid& g, const GeometryFields& F,
                                             const DeformationField& d,
                                             const RiemannBoundaryTable* table = nullptr) {
  if (g.closed1) return 0.0;
  double total = 0.0;
  for (BoundaryId b : {BoundaryId::xi1_min, BoundaryId::xi1_max}) {
    const BoundaryStrip s = boundary_frame(g, F, b);
    total += detail::boundary_variation_I2_end(g, F, s, d, s.sigma, s.sigma, table);
  }
  return total;
}

}  // namespace wsg
