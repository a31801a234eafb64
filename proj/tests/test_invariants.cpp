#include <gtest/gtest.h>

#include <cmath>

#include "wsg/invariants.hpp"
#include "wsg/solutions.hpp"
#include "wsg/variation.hpp"

using namespace wsg;

TEST(Invariants, PlaneUnitArea) {
  CatalogSurface c = instantiate("plane", {}, 33, 33);
  const GeometryFields F = compute_geometry(c.grid);
  EXPECT_NEAR(area(c.grid, F), 1.0, 1e-13);
  EXPECT_NEAR(gauss_bonnet_bulk(c.grid, F), 0.0, 1e-13);
  EXPECT_EQ(chern_integral(c.grid, F).raw, 0.0);
}

TEST(Invariants, CylinderAreaConverges) {
  auto run = [](int n1) {
    CatalogSurface c = instantiate("cylinder", {{"r", 2.0}}, 17, n1);
    const GeometryFields F = compute_geometry(c.grid);
    return std::abs(area(c.grid, F) - 4.0 * M_PI);
  };
  const double e1 = run(65), e2 = run(129);
  EXPECT_LT(e2, 2e-2);
  const double ratio = e1 / e2;
  EXPECT_GT(ratio, 3.5);
  EXPECT_LT(ratio, 4.5);
}

TEST(Invariants, SphereCapBandIntegral) {
  // Closed form: integral of sqrt(gamma) R over theta in [0.2, pi/2] equals
  // 4 pi cos(0.2) for the unit sphere.
  CatalogSurface c = instantiate("sphere_cap", {{"r", 1.0}, {"theta0", 0.2}, {"theta1", M_PI / 2}}, 65, 65);
  const GeometryFields F = compute_geometry(c.grid);
  const double expected = 4.0 * M_PI * std::cos(0.2);
  EXPECT_NEAR(gauss_bonnet_bulk(c.grid, F), expected, 3e-2);
}

TEST(Invariants, TorusBulkIntegralVanishes) {
  CatalogSurface c = instantiate("torus", {}, 65, 65);
  const GeometryFields F = compute_geometry(c.grid);
  EXPECT_NEAR(gauss_bonnet_bulk(c.grid, F), 0.0, 2e-2);
}

TEST(Invariants, EulerCharacteristics) {
  for (auto [name, expected] : {std::pair<const char*, double>{"disk", 1.0}, {"sphere_cap", 1.0},
                                {"torus", 0.0}, {"clifford_torus", 0.0}}) {
    CatalogSurface c = instantiate(name, {}, 129, 129);
    const GeometryFields F = compute_geometry(c.grid);
    const EulerCharacteristic chi = euler_characteristic(c.grid, F, true);
    EXPECT_FALSE(chi.advisory);
    EXPECT_NEAR(chi.chi, expected, 0.01) << name;
  }
}

TEST(Invariants, LorentzianChiRefusesWhenStrict) {
  CatalogSurface c = instantiate("plane", {}, 17, 17);
  const GeometryFields F = compute_geometry(c.grid);
  EXPECT_THROW(euler_characteristic(c.grid, F, true), UnsupportedError);
  const EulerCharacteristic chi = euler_characteristic(c.grid, F, false);
  EXPECT_TRUE(chi.advisory);
}

TEST(Invariants, ChernRawZeroOnCatalog) {
  for (const char* name : {"plane", "cylinder", "clifford_torus"}) {
    CatalogSurface c = instantiate(name, {}, 65, 65);
    const GeometryFields F = compute_geometry(c.grid);
    EXPECT_NEAR(chern_integral(c.grid, F).raw, 0.0, 1e-6) << name;
  }
}

TEST(Invariants, ChernGaugeInvariant) {
  CatalogSurface c = instantiate("graph_bump", {{"amp", 0.05}}, 49, 49);
  const GeometryFields F = compute_geometry(c.grid);
  const ChernIntegral base = chern_integral(c.grid, F);
  Field<double> theta(c.grid.n0, c.grid.n1);
  for (int i = 0; i < c.grid.n0; ++i)
    for (int j = 0; j < c.grid.n1; ++j)
      theta(i, j) = 0.4 * std::sin(c.grid.xi0(i)) * std::cos(2.0 * c.grid.xi1(j));
  GeometryFields G = F;
  G.frames = gauge_rotate(c.grid, F, theta).frames;
  twist_potential(c.grid, G);
  G.omega_tilde = twist_curvature(c.grid, G.omega);
  const ChernIntegral rot = chern_integral(c.grid, G);
  const double h2 = c.grid.h0() * c.grid.h0();
  EXPECT_NEAR(rot.raw, base.raw, 1e-10 + h2);
}

TEST(Invariants, ChernDeformationInvariantOnCliffordTorus) {
  // Deform the closed surface by a smooth bump; the twist-curvature integral
  // stays put within quadrature error.
  CatalogSurface c = instantiate("clifford_torus", {}, 65, 65);
  const GeometryFields F = compute_geometry(c.grid);
  const ChernIntegral base = chern_integral(c.grid, F);
  DeformationField d = make_bump(c.grid, 0, M_PI, M_PI, 2.0, 2.0, 1.0);
  const WorldsheetGrid def = apply_deformation(c.grid, F, d, 0.05);
  const GeometryFields Fd = compute_geometry(def);
  const ChernIntegral moved = chern_integral(def, Fd);
  EXPECT_NEAR(moved.raw, base.raw, 5e-3);
}

TEST(Invariants, EulerDeformationInvariantOnTorus) {
  CatalogSurface c = instantiate("torus", {}, 65, 65);
  const GeometryFields F = compute_geometry(c.grid);
  const EulerCharacteristic base = euler_characteristic(c.grid, F, true);
  DeformationField d = make_bump(c.grid, 1, M_PI, M_PI, 2.0, 2.0, 1.0);
  const WorldsheetGrid def = apply_deformation(c.grid, F, d, 0.05);
  const GeometryFields Fd = compute_geometry(def);
  const EulerCharacteristic moved = euler_characteristic(def, Fd, true);
  EXPECT_NEAR(moved.chi, base.chi, 0.01);
}

TEST(Invariants, ActionAssembly) {
  CatalogSurface c = instantiate("graph_bump", {{"amp", 0.05}}, 33, 33);
  const GeometryFields F = compute_geometry(c.grid);
  const Couplings cp{2.0, 0.5, -0.25, 0.0};
  const ActionValues v = action_values(c.grid, F, cp);
  EXPECT_EQ(v.S, -cp.mu * v.I0 - cp.alpha * v.I1 - cp.beta * v.I2);
}

TEST(Invariants, DeterministicReduction) {
  CatalogSurface c = instantiate("torus", {}, 65, 65);
  const GeometryFields F1 = compute_geometry(c.grid);
  const GeometryFields F2 = compute_geometry(c.grid);
  EXPECT_EQ(area(c.grid, F1), area(c.grid, F2));
  EXPECT_EQ(gauss_bonnet_bulk(c.grid, F1), gauss_bonnet_bulk(c.grid, F2));
  EXPECT_EQ(chern_integral(c.grid, F1).raw, chern_integral(c.grid, F2).raw);
}
