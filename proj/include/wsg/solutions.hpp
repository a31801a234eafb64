#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsg/boundary.hpp"
#include "wsg/geometry.hpp"
#include "wsg/grid.hpp"

namespace wsg {

/// Known analytic facts attached to a catalog surface, used as test oracles.
struct KnownFacts {
  std::string name;
  bool extremal = false;     // mean curvature vanishes analytically
  bool flat_twist = false;   // OmegaTilde vanishes analytically
  std::optional<double> chi;           // Euler characteristic (euclidean surfaces)
  std::optional<double> chern_raw;     // expected integral of OmegaTilde
  std::optional<double> r_scalar;      // constant intrinsic curvature where applicable
  std::function<Sym2(double, double)> gamma_exact;  // closed-form induced metric
};

struct CatalogSurface {
  WorldsheetGrid grid;
  KnownFacts facts;
};

using Params = std::map<std::string, double>;

namespace detail {

inline double param(const Params& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

/// Smooth compactly supported bump, b(0) = 1, support |t| < 1.
inline double bump(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

inline WorldsheetGrid sample(const WorldsheetGrid::Generator& gen, int n0, int n1, double a0, double b0,
                             double a1, double b1, bool closed0, bool closed1, Signature sig,
                             BackgroundSpacetime bg = {}) {
  WorldsheetGrid g;
  g.n0 = n0;
  g.n1 = n1;
  g.r0min = a0;
  g.r0max = b0;
  g.r1min = a1;
  g.r1max = b1;
  g.closed0 = closed0;
  g.closed1 = closed1;
  bg.signature = sig;
  g.bg = bg;
  g.generator = gen;
  g.X = Field<Vec4>(n0, n1);
  for (int i = 0; i < n0; ++i)
    for (int j = 0; j < n1; ++j) g.X(i, j) = gen(g.xi0(i), g.xi1(j));
  g.identify_seams();
  g.validate();
  return g;
}

}  // namespace detail

/// Analytic catalog of embeddings with known geometry.
///
/// Names and parameters (defaults in parentheses):
///   plane                         X = (xi0, xi1, 0, 0) on [0,1]^2
///   strip          width(1)       plane with xi1 in [0, width]
///   cylinder       r(2)           full circle, closed in xi1, xi0 in [0,1];
///                  arc0,arc1      optional open arc in xi1 (a worldsheet strip)
///   rotating_rod   delta(0.15)    X = (xi0, cos xi1 cos xi0, cos xi1 sin xi0, 0),
///                                 xi1 in [delta, pi - delta]
///   sphere_cap     r(1),theta0(0.05),theta1(pi/2)   euclidean polar chart,
///                                 xi0 = azimuth (closed), xi1 = polar angle;
///                                 theta0 is a chart cutoff around the pole
///   disk           r(1),rho0(0.1)                   euclidean flat disk,
///                                 xi0 = angle (closed), xi1 = radius; rho0 cutoff
///   torus          R(2),r(1)      euclidean, closed in both directions
///   clifford_torus r(1)           X = r (cos xi0, sin xi0, cos xi1, sin xi1)
///   graph_bump     amp(0.05)      plane plus two offset bumps in the two
///                                 transverse directions (generic curved normal bundle)
inline CatalogSurface instantiate(const std::string& name, const Params& p, int n0, int n1,
                                  std::optional<Signature> sig_override = std::nullopt,
                                  BackgroundSpacetime bg = {}) {
  using detail::param;
  CatalogSurface out;
  out.facts.name = name;
  auto sig = [&](Signature def) { return sig_override.value_or(def); };

  if (name == "plane" || name == "strip") {
    const double w = (name == "strip") ? param(p, "width", 1.0) : param(p, "xi1_max", 1.0);
    out.grid = detail::sample([](double a, double b) { return Vec4{a, b, 0, 0}; }, n0, n1, 0, 1, 0, w,
                              false, false, sig(Signature::lorentzian), bg);
    out.facts.extremal = (bg.kind == BackgroundKind::flat);
    out.facts.flat_twist = true;
    out.facts.chern_raw = 0.0;
    if (bg.kind == BackgroundKind::flat) {
      out.facts.r_scalar = 0.0;
      const double s0 = sig(Signature::lorentzian) == Signature::lorentzian ? -1.0 : 1.0;
      out.facts.gamma_exact = [s0](double, double) { return Sym2{s0, 0.0, 1.0}; };
    }
    return out;
  }

  if (name == "cylinder") {
    const double r = param(p, "r", 2.0);
    const bool open_arc = p.count("arc0") || p.count("arc1");
    const double a1 = param(p, "arc0", 0.0);
    const double b1 = param(p, "arc1", open_arc ? 1.0 : 2.0 * M_PI);
    out.grid = detail::sample(
        [r](double a, double b) {
          return Vec4{a, r * std::cos(b), r * std::sin(b), 0};
        },
        n0, n1, 0, param(p, "t1", 1.0), a1, b1, false, !open_arc, sig(Signature::lorentzian), bg);
    out.facts.extremal = false;
    out.facts.flat_twist = true;
    out.facts.chern_raw = 0.0;
    out.facts.r_scalar = 0.0;
    const double s0 = sig(Signature::lorentzian) == Signature::lorentzian ? -1.0 : 1.0;
    out.facts.gamma_exact = [s0, r](double, double) { return Sym2{s0, 0.0, r * r}; };
    return out;
  }

  if (name == "rotating_rod") {
    const double d = param(p, "delta", 0.15);
    out.grid = detail::sample(
        [](double a, double b) {
          return Vec4{a, std::cos(b) * std::cos(a), std::cos(b) * std::sin(a), 0};
        },
        n0, n1, 0, param(p, "t1", 1.5), d, M_PI - d, false, false, sig(Signature::lorentzian), bg);
    out.facts.extremal = true;
    out.facts.flat_twist = true;
    out.facts.chern_raw = 0.0;
    out.facts.gamma_exact = [](double, double b) {
      const double s2 = std::sin(b) * std::sin(b);
      return Sym2{-s2, 0.0, s2};
    };
    return out;
  }

  if (name == "sphere_cap") {
    const double r = param(p, "r", 1.0);
    const double t0 = param(p, "theta0", 0.05);
    const double t1 = param(p, "theta1", 0.5 * M_PI);
    out.grid = detail::sample(
        [r](double a, double b) {
          return Vec4{r * std::sin(b) * std::cos(a), r * std::sin(b) * std::sin(a), r * std::cos(b), 0};
        },
        n0, n1, 0, 2.0 * M_PI, t0, t1, true, false, sig(Signature::euclidean), bg);
    out.grid.physical_min_edge = false;  // pole-side chart cutoff
    out.facts.flat_twist = true;
    out.facts.chern_raw = 0.0;
    out.facts.r_scalar = 2.0 / (r * r);
    out.facts.chi = 1.0;
    out.facts.gamma_exact = [r](double, double b) {
      return Sym2{r * r * std::sin(b) * std::sin(b), 0.0, r * r};
    };
    return out;
  }

  if (name == "disk") {
    const double r = param(p, "r", 1.0);
    const double rho0 = param(p, "rho0", 0.1);
    out.grid = detail::sample(
        [](double a, double b) {
          return Vec4{b * std::cos(a), b * std::sin(a), 0, 0};
        },
        n0, n1, 0, 2.0 * M_PI, rho0, r, true, false, sig(Signature::euclidean), bg);
    out.grid.physical_min_edge = false;  // cutoff around the center
    out.facts.flat_twist = true;
    out.facts.chern_raw = 0.0;
    out.facts.r_scalar = 0.0;
    out.facts.chi = 1.0;
    out.facts.gamma_exact = [](double, double b) { return Sym2{b * b, 0.0, 1.0}; };
    return out;
  }

  if (name == "torus") {
    const double R = param(p, "R", 2.0);
    const double r = param(p, "r", 1.0);
    out.grid = detail::sample(
        [R, r](double a, double b) {
          const double w = R + r * std::cos(b);
          return Vec4{w * std::cos(a), w * std::sin(a), r * std::sin(b), 0};
        },
        n0, n1, 0, 2.0 * M_PI, 0, 2.0 * M_PI, true, true, sig(Signature::euclidean), bg);
    out.facts.flat_twist = true;
    out.facts.chern_raw = 0.0;
    out.facts.chi = 0.0;
    out.facts.gamma_exact = [R, r](double, double b) {
      const double w = R + r * std::cos(b);
      return Sym2{w * w, 0.0, r * r};
    };
    return out;
  }

  if (name == "clifford_torus") {
    const double r = param(p, "r", 1.0);
    out.grid = detail::sample(
        [r](double a, double b) {
          return Vec4{r * std::cos(a), r * std::sin(a), r * std::cos(b), r * std::sin(b)};
        },
        n0, n1, 0, 2.0 * M_PI, 0, 2.0 * M_PI, true, true, sig(Signature::euclidean), bg);
    out.facts.flat_twist = true;
    out.facts.chern_raw = 0.0;
    out.facts.chi = 0.0;
    out.facts.r_scalar = 0.0;
    out.facts.gamma_exact = [r](double, double) { return Sym2{r * r, 0.0, r * r}; };
    return out;
  }

  if (name == "graph_bump") {
    // Two non-proportional transverse height profiles give a generic second
    // fundamental form and a curved normal bundle (nonzero twist curvature).
    const double A = param(p, "amp", 0.05);
    auto gen = [A](double a, double b) {
      const double f = std::sin(M_PI * a) * std::sin(M_PI * b);
      const double h = std::cos(M_PI * a) * std::sin(M_PI * b + 0.5);
      return Vec4{a, b, A * f, A * h};
    };
    out.grid = detail::sample(gen, n0, n1, 0, 1, 0, 1, false, false, sig(Signature::lorentzian), bg);
    out.facts.extremal = false;
    out.facts.flat_twist = false;
    return out;
  }

  throw ValidationError("unknown catalog surface '" + name + "'");
}

/// Cylinder strip with a transverse ripple that reaches both ends: the
/// fixture for exercising the boundary variation formulas and the sign
/// audit, where the plain cylinder strip has vanishing end projections.
inline CatalogSurface audit_fixture(double r, double amp, int n0, int n1) {
  CatalogSurface out;
  out.facts.name = "bumpy_cylinder_strip";
  auto gen = [r, amp](double a, double b) {
    using detail::bump;
    const double f = bump((a - 0.5) / 0.45) * (1.0 + 0.4 * std::sin(2.0 * b));
    const double h = bump((a - 0.55) / 0.5) * std::cos(b);
    const double rr = r + amp * f;
    return Vec4{a, rr * std::cos(b), rr * std::sin(b), amp * h};
  };
  out.grid = detail::sample(gen, n0, n1, 0, 1, 0.3, 1.4, false, false, Signature::lorentzian, {});
  return out;
}

/// Boundary data constructed to satisfy the boundary conditions exactly
/// (constant along the end in the zero-twist gauge, or rotated by a supplied
/// gauge angle with the matching twist).
struct SyntheticOptions {
  double dtau = 0.05;
  int gauge_harmonic = 0;      // 0: zero-twist gauge; else rotate by gauge_amp*sin(harmonic*tau)
  double gauge_amp = 0.0;
  double K_par_scale = 0.3;    // free norm used only in the alpha = 0 branch
};

inline BoundaryStrip synthetic_boundary_data(const Couplings& c, double ratio, int n,
                                             const SyntheticOptions& opt = {}) {
  c.validate();
  if (!std::isfinite(ratio)) throw ConsistencyError("K_par component ratio must be finite");
  BoundaryStrip s;
  s.which = BoundaryId::xi1_min;
  s.sigma = +1.0;
  s.inward_sign = +1;
  s.tangent_sign = -1.0;
  s.n = n;
  s.h0 = opt.dtau;  // unit lapse: tau = xi0
  s.closed0 = false;
  s.v.assign(n, Vec2{1.0, 0.0});
  s.eta.assign(n, Vec2{0.0, 1.0});
  s.lapse.assign(n, 1.0);
  s.K_par.assign(n, Vec2{0, 0});
  s.K_mix.assign(n, Vec2{0, 0});
  s.K_perp.assign(n, Vec2{0, 0});
  s.k.assign(n, 0.0);
  s.R_boundary.assign(n, 0.0);
  s.Omega_boundary.assign(n, 0.0);
  s.twist.assign(n, 0.0);

  const double ab = c.alpha + 0.5 * c.M;
  Vec2 kpar0{0, 0}, kmix0{0, 0};
  double Rb = 0, Ob = 0, kb = 0;
  if (ab == 0.0 && c.beta != 0.0) {
    // Null-end regime: only the second-order condition is meaningful. It
    // forces K_mix = 0, so the assembled boundary twist density vanishes
    // (the twist potential is pure gauge at the ends).
    const double nrm = opt.K_par_scale;
    kpar0 = {nrm / std::sqrt(1.0 + ratio * ratio), nrm * ratio / std::sqrt(1.0 + ratio * ratio)};
    kmix0 = {0, 0};
    Rb = 0;
    Ob = 0;
  } else {
    const PredictedBoundaryValues pv = predicted_boundary_values(c);
    Rb = pv.R_boundary;
    Ob = pv.Omega_boundary;
    kb = pv.k_boundary;
    if (c.beta != 0.0) {
      const double nrm = std::sqrt(pv.K_par_norm2);
      kpar0 = {nrm / std::sqrt(1.0 + ratio * ratio), nrm * ratio / std::sqrt(1.0 + ratio * ratio)};
      // r3 = 0  =>  K_mix = (alpha_eff / (sigma beta)) eps(K_par)
      kmix0 = (ab / (s.sigma * c.beta)) * eps_apply(kpar0);
    } else {
      kpar0 = {0, 0};
      // R = mu/alpha_eff = 2 |K_mix|^2 fixes the mixed projection norm.
      const double nrm = std::sqrt(0.5 * Rb);
      kmix0 = {nrm / std::sqrt(1.0 + ratio * ratio), nrm * ratio / std::sqrt(1.0 + ratio * ratio)};
    }
  }

  for (int i = 0; i < n; ++i) {
    const double tau = i * opt.dtau;
    double theta = 0.0, dtheta = 0.0;
    if (opt.gauge_harmonic > 0) {
      theta = opt.gauge_amp * std::sin(opt.gauge_harmonic * tau);
      dtheta = opt.gauge_amp * opt.gauge_harmonic * std::cos(opt.gauge_harmonic * tau);
    }
    // Normal vectors rotate with the gauge; the twist is the exact angle rate.
    const double cth = std::cos(theta), sth = std::sin(theta);
    auto rot = [&](const Vec2& x) { return Vec2{cth * x[0] - sth * x[1], sth * x[0] + cth * x[1]}; };
    s.K_par[i] = rot(kpar0);
    s.K_mix[i] = rot(kmix0);
    s.K_perp[i] = s.K_par[i];  // extremal sheet
    s.twist[i] = dtheta;
    s.R_boundary[i] = Rb;
    s.Omega_boundary[i] = Ob;
    s.k[i] = kb;
  }
  return s;
}

}  // namespace wsg
