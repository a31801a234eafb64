#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wsg/background.hpp"
#include "wsg/errors.hpp"
#include "wsg/math.hpp"

namespace wsg {

/// Scalar or small-tensor field sampled on the parameter grid, row-major in
/// (i0, i1).
template <class T>
struct Field {
  int n0 = 0, n1 = 0;
  std::vector<T> data;

  Field() = default;
  Field(int a, int b) : n0(a), n1(b), data(static_cast<size_t>(a) * b) {}
  T& operator()(int i, int j) { return data[static_cast<size_t>(i) * n1 + j]; }
  const T& operator()(int i, int j) const { return data[static_cast<size_t>(i) * n1 + j]; }
};

enum class BoundaryId { xi1_min, xi1_max };

inline std::string to_string(BoundaryId b) { return b == BoundaryId::xi1_min ? "xi1_min" : "xi1_max"; }

/// Sampled embedding X^mu(xi0, xi1) on a rectangular parameter grid.
///
/// xi0 is the boundary-tangent (timelike) direction by convention; string
/// ends are the xi1 = const edges. Either direction may be periodic: closed1
/// identifies the first and last xi1 columns (closed surfaces), closed0 does
/// the same for xi0 (angle charts of disks and caps, where the rim worldline
/// is a closed curve). Periodic directions store the seam node twice, so
/// spacing is range/(n-1) in all cases.
class WorldsheetGrid {
 public:
  using Generator = std::function<Vec4(double, double)>;

  int n0 = 0, n1 = 0;
  double r0min = 0, r0max = 1, r1min = 0, r1max = 1;
  bool closed0 = false, closed1 = false;
  BackgroundSpacetime bg;
  Field<Vec4> X;
  std::optional<Generator> generator;
  // xi1 edges that are genuine worldsheet boundary (as opposed to chart
  // cutoffs around a smooth interior point, e.g. the pole of a cap chart).
  bool physical_min_edge = true, physical_max_edge = true;

  WorldsheetGrid() = default;

  double h0() const { return (r0max - r0min) / (n0 - 1); }
  double h1() const { return (r1max - r1min) / (n1 - 1); }
  double xi0(int i) const { return r0min + i * h0(); }
  double xi1(int j) const { return r1min + j * h1(); }

  void identify_seams() {
    if (closed0)
      for (int j = 0; j < n1; ++j) X(n0 - 1, j) = X(0, j);
    if (closed1)
      for (int i = 0; i < n0; ++i) X(i, n1 - 1) = X(i, 0);
  }

  void validate() const {
    if (n0 < 5 || n1 < 5)
      throw ValidationError("grid requires at least 5 nodes per direction, got " + std::to_string(n0) +
                            "x" + std::to_string(n1));
    if (!(h0() > 0.0) || !(h1() > 0.0)) throw ValidationError("grid spacings must be positive");
    for (int i = 0; i < n0; ++i)
      for (int j = 0; j < n1; ++j)
        for (int m = 0; m < 4; ++m)
          if (!std::isfinite(X(i, j)[m]))
            throw ValidationError("non-finite embedding entry X[" + std::to_string(i) + "][" +
                                  std::to_string(j) + "][" + std::to_string(m) + "]");
    if (closed0)
      for (int j = 0; j < n1; ++j)
        if (X(0, j) != X(n0 - 1, j)) throw ValidationError("closed0 grid: first and last xi0 rows differ");
    if (closed1)
      for (int i = 0; i < n0; ++i)
        if (X(i, 0) != X(i, n1 - 1)) throw ValidationError("closed1 grid: first and last xi1 columns differ");
  }
};

namespace detail {

// O(h^2) stencils along one direction of n nodes. Periodic directions wrap
// with period n-1 (the seam node is stored twice).
//
// The one-sided edge formulas are error-matched to the centered ones: their
// truncation expansions agree with the interior stencils through O(h^3),
//   f'  : error +h^2 f'''/6   + O(h^4)
//   f'' : error +h^2 f''''/12 + O(h^4)
// This keeps the h^2 error expansion of every first-pass field smooth across
// the whole grid, so differentiating a computed field (curvature of the
// induced metric, curl of the twist potential, derivatives along an end)
// stays second order up to the edges.
//   f'  edge: (-5/2 f0 + 11/2 f1 - 5 f2 + 5/2 f3 - 1/2 f4) / h
//   f'' edge: (4 f0 - 14 f1 + 20 f2 - 15 f3 + 6 f4 - 1 f5) / h^2
// Grids with fewer than 6 nodes fall back to 5-point second-derivative
// edges matched through O(h^2) only.
template <class T, class At>
T d1_line(At raw, int k, int n, bool closed, double h) {
  if (closed) {
    const int p = n - 1;
    auto at = [&](int m) { return raw(((m % p) + p) % p); };
    return (1.0 / (2 * h)) * (at(k + 1) - at(k - 1));
  }
  if (k == 0)
    return (1.0 / h) *
           ((-2.5) * raw(0) + 5.5 * raw(1) - 5.0 * raw(2) + 2.5 * raw(3) - 0.5 * raw(4));
  if (k == n - 1)
    return (1.0 / h) * (2.5 * raw(n - 1) - 5.5 * raw(n - 2) + 5.0 * raw(n - 3) - 2.5 * raw(n - 4) +
                        0.5 * raw(n - 5));
  return (1.0 / (2 * h)) * (raw(k + 1) - raw(k - 1));
}

template <class T, class At>
T d2_line(At raw, int k, int n, bool closed, double h) {
  const double ih2 = 1.0 / (h * h);
  if (closed) {
    const int p = n - 1;
    auto at = [&](int m) { return raw(((m % p) + p) % p); };
    return ih2 * (at(k + 1) - 2.0 * at(k) + at(k - 1));
  }
  if (k == 0) {
    if (n < 6) return ih2 * (3.0 * raw(0) - 9.0 * raw(1) + 10.0 * raw(2) - 5.0 * raw(3) + raw(4));
    return ih2 * (4.0 * raw(0) - 14.0 * raw(1) + 20.0 * raw(2) - 15.0 * raw(3) + 6.0 * raw(4) - raw(5));
  }
  if (k == n - 1) {
    if (n < 6)
      return ih2 *
             (3.0 * raw(n - 1) - 9.0 * raw(n - 2) + 10.0 * raw(n - 3) - 5.0 * raw(n - 4) + raw(n - 5));
    return ih2 * (4.0 * raw(n - 1) - 14.0 * raw(n - 2) + 20.0 * raw(n - 3) - 15.0 * raw(n - 4) +
                  6.0 * raw(n - 5) - raw(n - 6));
  }
  return ih2 * (raw(k + 1) - 2.0 * raw(k) + raw(k - 1));
}

}  // namespace detail

template <class T>
Field<T> d0(const Field<T>& f, const WorldsheetGrid& g) {
  Field<T> out(f.n0, f.n1);
  for (int j = 0; j < f.n1; ++j)
    for (int i = 0; i < f.n0; ++i)
      out(i, j) = detail::d1_line<T>([&](int k) { return f(k, j); }, i, f.n0, g.closed0, g.h0());
  return out;
}

template <class T>
Field<T> d1(const Field<T>& f, const WorldsheetGrid& g) {
  Field<T> out(f.n0, f.n1);
  for (int i = 0; i < f.n0; ++i)
    for (int j = 0; j < f.n1; ++j)
      out(i, j) = detail::d1_line<T>([&](int k) { return f(i, k); }, j, f.n1, g.closed1, g.h1());
  return out;
}

template <class T>
Field<T> d00(const Field<T>& f, const WorldsheetGrid& g) {
  Field<T> out(f.n0, f.n1);
  for (int j = 0; j < f.n1; ++j)
    for (int i = 0; i < f.n0; ++i)
      out(i, j) = detail::d2_line<T>([&](int k) { return f(k, j); }, i, f.n0, g.closed0, g.h0());
  return out;
}

template <class T>
Field<T> d11(const Field<T>& f, const WorldsheetGrid& g) {
  Field<T> out(f.n0, f.n1);
  for (int i = 0; i < f.n0; ++i)
    for (int j = 0; j < f.n1; ++j)
      out(i, j) = detail::d2_line<T>([&](int k) { return f(i, k); }, j, f.n1, g.closed1, g.h1());
  return out;
}

template <class T>
Field<T> d01(const Field<T>& f, const WorldsheetGrid& g) {
  return d1(d0(f, g), g);
}

/// First (and optionally second) partial derivatives of the embedding.
struct EmbeddingDerivatives {
  Field<Vec4> dX0, dX1;          // e_a^mu
  Field<Vec4> dX00, dX01, dX11;  // second derivatives (order 2 only)
};

inline EmbeddingDerivatives partial_derivatives(const WorldsheetGrid& g, int order = 2) {
  EmbeddingDerivatives d;
  d.dX0 = d0(g.X, g);
  d.dX1 = d1(g.X, g);
  if (order >= 2) {
    d.dX00 = d00(g.X, g);
    d.dX11 = d11(g.X, g);
    d.dX01 = d01(g.X, g);
  }
  return d;
}

struct BoundaryNodes {
  BoundaryId which;
  int j = 0;               // xi1 column index of the edge
  int inward_sign = +1;    // +1: interior lies at increasing xi1
  std::vector<int> order;  // node indices along the end, increasing xi0
};

inline BoundaryNodes boundary_nodes(const WorldsheetGrid& g, BoundaryId b) {
  if (g.closed1) throw UnsupportedError("closed surface has no ends");
  BoundaryNodes bn;
  bn.which = b;
  bn.j = (b == BoundaryId::xi1_min) ? 0 : g.n1 - 1;
  bn.inward_sign = (b == BoundaryId::xi1_min) ? +1 : -1;
  bn.order.resize(g.n0);
  for (int i = 0; i < g.n0; ++i) bn.order[i] = i;
  return bn;
}

/// Resample at doubled resolution (2n-1 nodes per direction) from the
/// attached analytic generator.
inline WorldsheetGrid refine(const WorldsheetGrid& g) {
  if (!g.generator)
    throw UnsupportedError("refinement requires an analytic generator; raw loaded grids cannot be resampled");
  WorldsheetGrid r = g;
  r.n0 = 2 * g.n0 - 1;
  r.n1 = 2 * g.n1 - 1;
  r.X = Field<Vec4>(r.n0, r.n1);
  for (int i = 0; i < r.n0; ++i)
    for (int j = 0; j < r.n1; ++j) r.X(i, j) = (*g.generator)(r.xi0(i), r.xi1(j));
  r.identify_seams();
  r.validate();
  return r;
}

// ---------------------------------------------------------------------------
// Embedding document I/O.
//
// JSON schema:
//   { "signature": "lorentzian"|"euclidean",
//     "background": {"kind": "flat"|"constant_curvature", "R_ambient": <num>},
//     "grid": {"n0":, "n1":, "range0":[a,b], "range1":[a,b],
//              "closed1": bool, "closed0": bool (optional, default false),
//              "physical_edges": [bool,bool] (optional)},
//     "X": [[[x0,x1,x2,x3], ...n1...], ...n0...] }
// All numbers are written with 17 significant digits so reload is bit-exact.
// ---------------------------------------------------------------------------

namespace detail {
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace detail

inline std::string save_embedding_text(const WorldsheetGrid& g) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"signature\": \"" << to_string(g.bg.signature) << "\",\n";
  os << "  \"background\": {\"kind\": \"" << to_string(g.bg.kind) << "\", \"R_ambient\": "
     << detail::fmt17(g.bg.scalar_curvature) << "},\n";
  os << "  \"grid\": {\"n0\": " << g.n0 << ", \"n1\": " << g.n1 << ", \"range0\": ["
     << detail::fmt17(g.r0min) << ", " << detail::fmt17(g.r0max) << "], \"range1\": ["
     << detail::fmt17(g.r1min) << ", " << detail::fmt17(g.r1max) << "], \"closed1\": "
     << (g.closed1 ? "true" : "false") << ", \"closed0\": " << (g.closed0 ? "true" : "false")
     << ", \"physical_edges\": [" << (g.physical_min_edge ? "true" : "false") << ", "
     << (g.physical_max_edge ? "true" : "false") << "]},\n";
  os << "  \"X\": [\n";
  for (int i = 0; i < g.n0; ++i) {
    os << "    [";
    for (int j = 0; j < g.n1; ++j) {
      const Vec4& x = g.X(i, j);
      os << "[" << detail::fmt17(x[0]) << ", " << detail::fmt17(x[1]) << ", " << detail::fmt17(x[2])
         << ", " << detail::fmt17(x[3]) << "]";
      if (j + 1 < g.n1) os << ", ";
    }
    os << "]" << (i + 1 < g.n0 ? "," : "") << "\n";
  }
  os << "  ]\n}\n";
  return os.str();
}

inline void save_embedding(const WorldsheetGrid& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot open '" + path + "' for writing");
  out << save_embedding_text(g);
}

inline WorldsheetGrid load_embedding_json(const nlohmann::json& doc) {
  WorldsheetGrid g;
  try {
    const std::string sig = doc.at("signature").get<std::string>();
    if (sig == "lorentzian")
      g.bg.signature = Signature::lorentzian;
    else if (sig == "euclidean")
      g.bg.signature = Signature::euclidean;
    else
      throw ValidationError("unknown signature '" + sig + "'");

    const auto& b = doc.at("background");
    const std::string kind = b.at("kind").get<std::string>();
    if (kind == "flat")
      g.bg.kind = BackgroundKind::flat;
    else if (kind == "constant_curvature")
      g.bg.kind = BackgroundKind::constant_curvature;
    else
      throw ValidationError("unknown background kind '" + kind + "'");
    g.bg.scalar_curvature = b.value("R_ambient", 0.0);

    const auto& gr = doc.at("grid");
    g.n0 = gr.at("n0").get<int>();
    g.n1 = gr.at("n1").get<int>();
    g.r0min = gr.at("range0").at(0).get<double>();
    g.r0max = gr.at("range0").at(1).get<double>();
    g.r1min = gr.at("range1").at(0).get<double>();
    g.r1max = gr.at("range1").at(1).get<double>();
    g.closed1 = gr.at("closed1").get<bool>();
    g.closed0 = gr.value("closed0", false);
    if (gr.contains("physical_edges")) {
      g.physical_min_edge = gr.at("physical_edges").at(0).get<bool>();
      g.physical_max_edge = gr.at("physical_edges").at(1).get<bool>();
    }
    if (g.n0 < 5 || g.n1 < 5)
      throw ValidationError("grid requires at least 5 nodes per direction, got " + std::to_string(g.n0) +
                            "x" + std::to_string(g.n1));

    const auto& X = doc.at("X");
    if (static_cast<int>(X.size()) != g.n0)
      throw ValidationError("X has " + std::to_string(X.size()) + " rows, expected n0=" + std::to_string(g.n0));
    g.X = Field<Vec4>(g.n0, g.n1);
    for (int i = 0; i < g.n0; ++i) {
      const auto& row = X.at(i);
      if (static_cast<int>(row.size()) != g.n1)
        throw ValidationError("X row " + std::to_string(i) + " has " + std::to_string(row.size()) +
                              " columns, expected n1=" + std::to_string(g.n1));
      for (int j = 0; j < g.n1; ++j) {
        const auto& entry = row.at(j);
        if (static_cast<int>(entry.size()) != 4)
          throw ValidationError("X[" + std::to_string(i) + "][" + std::to_string(j) + "] is not a 4-vector");
        for (int m = 0; m < 4; ++m) g.X(i, j)[m] = entry.at(m).get<double>();
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed embedding document: ") + e.what());
  }
  // A closed seam is allowed to disagree at rounding level in hand-made
  // documents; identify it exactly before validation.
  double seam = 0.0;
  if (g.closed0)
    for (int j = 0; j < g.n1; ++j)
      for (int m = 0; m < 4; ++m) seam = std::max(seam, std::abs(g.X(0, j)[m] - g.X(g.n0 - 1, j)[m]));
  if (g.closed1)
    for (int i = 0; i < g.n0; ++i)
      for (int m = 0; m < 4; ++m) seam = std::max(seam, std::abs(g.X(i, 0)[m] - g.X(i, g.n1 - 1)[m]));
  if (seam > 1e-9) throw ValidationError("closed grid: seam columns differ by " + std::to_string(seam));
  g.identify_seams();
  g.validate();
  return g;
}

inline WorldsheetGrid load_embedding(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open embedding document '" + path + "'");
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed embedding document: ") + e.what());
  }
  return load_embedding_json(doc);
}

}  // namespace wsg
