#include <gtest/gtest.h>

#include <cmath>

#include "wsg/background.hpp"

using namespace wsg;

namespace {

BackgroundSpacetime flat_l() { return {Signature::lorentzian, BackgroundKind::flat, 0.0}; }
BackgroundSpacetime flat_e() { return {Signature::euclidean, BackgroundKind::flat, 0.0}; }
BackgroundSpacetime cc(double R, Signature s = Signature::lorentzian) {
  return {s, BackgroundKind::constant_curvature, R};
}

}  // namespace

TEST(Background, FlatMetrics) {
  const Vec4 x{3.0, -1.0, 0.5, 2.0};
  const Met4 gl = metric_at(flat_l(), x);
  EXPECT_EQ(gl[0][0], -1.0);
  EXPECT_EQ(gl[1][1], 1.0);
  EXPECT_EQ(gl[2][2], 1.0);
  EXPECT_EQ(gl[3][3], 1.0);
  EXPECT_EQ(gl[0][1], 0.0);
  const Met4 ge = metric_at(flat_e(), x);
  for (int m = 0; m < 4; ++m) EXPECT_EQ(ge[m][m], 1.0);
}

TEST(Background, FlatConnectionAndRiemannVanish) {
  const Vec4 x{0.3, 1.0, -2.0, 0.1};
  const Christoffel4 gam = christoffel_at(flat_l(), x);
  const Riemann4 r = riemann_at(flat_l(), x);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      for (int c = 0; c < 4; ++c) {
        EXPECT_EQ(gam[a][b][c], 0.0);
        for (int d = 0; d < 4; ++d) EXPECT_EQ(r[a][b][c][d], 0.0);
      }
}

TEST(Background, ConformalFactorAtOrigin) {
  // At x = 0 the chart factor is 1 and the metric is the flat one.
  const Met4 g = metric_at(cc(12.0), Vec4{0, 0, 0, 0});
  EXPECT_NEAR(g[0][0], -1.0, 1e-15);
  EXPECT_NEAR(g[1][1], 1.0, 1e-15);
}

TEST(Background, ChristoffelSymmetry) {
  const Christoffel4 gam = christoffel_at(cc(7.3), Vec4{0.2, 0.1, -0.4, 0.3});
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int l = 0; l < 4; ++l) EXPECT_EQ(gam[m][n][l], gam[m][l][n]);
}

// Independent oracle: centered finite differences of metric_at reproduce the
// closed-form Christoffels at second order.
namespace {

Christoffel4 christoffel_fd(const BackgroundSpacetime& bg, const Vec4& x, double h) {
  std::array<Met4, 4> dg;
  for (int c = 0; c < 4; ++c) {
    Vec4 xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    const Met4 gp = metric_at(bg, xp), gm = metric_at(bg, xm);
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) dg[c][a][b] = (gp[a][b] - gm[a][b]) / (2 * h);
  }
  const Met4 g = metric_at(bg, x);
  // invert the diagonal conformal metric
  Met4 ginv{};
  for (int m = 0; m < 4; ++m) ginv[m][m] = 1.0 / g[m][m];
  Christoffel4 out{};
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int l = 0; l < 4; ++l) {
        double s = 0.0;
        for (int r = 0; r < 4; ++r) s += 0.5 * ginv[m][r] * (dg[l][r][n] + dg[n][r][l] - dg[r][n][l]);
        out[m][n][l] = s;
      }
  return out;
}

double christoffel_err(const BackgroundSpacetime& bg, const Vec4& x, double h) {
  const Christoffel4 a = christoffel_at(bg, x), b = christoffel_fd(bg, x, h);
  double e = 0.0;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int l = 0; l < 4; ++l) e = std::max(e, std::abs(a[m][n][l] - b[m][n][l]));
  return e;
}

}  // namespace

TEST(Background, ChristoffelMatchesMetricDerivatives) {
  const BackgroundSpacetime bg = cc(5.0);
  const Vec4 x{0.3, -0.2, 0.5, 0.1};
  const double e1 = christoffel_err(bg, x, 1e-2);
  const double e2 = christoffel_err(bg, x, 5e-3);
  EXPECT_LT(e1, 1e-3);
  const double ratio = e1 / e2;
  EXPECT_GT(ratio, 3.5);
  EXPECT_LT(ratio, 4.5);
}

TEST(Background, RiemannClosedFormConstCurvature) {
  // R_ambient = 12 makes R_{mnab} = g_ma g_nb - g_mb g_na.
  const BackgroundSpacetime bg = cc(12.0);
  const Vec4 x{0.1, 0.2, -0.1, 0.05};
  const Met4 g = metric_at(bg, x);
  const Riemann4 r = riemann_at(bg, x);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          EXPECT_NEAR(r[m][n][a][b], g[m][a] * g[n][b] - g[m][b] * g[n][a], 1e-14);
          EXPECT_NEAR(r[m][n][a][b], -r[n][m][a][b], 0.0);  // exact antisymmetry
        }
}

TEST(Background, DoubleContractionGivesScalarCurvature) {
  for (double R : {3.0, -4.5, 12.0}) {
    const BackgroundSpacetime bg = cc(R, Signature::euclidean);
    const Vec4 x{0.2, 0.4, -0.3, 0.6};
    const Met4 g = metric_at(bg, x);
    Met4 ginv{};
    for (int m = 0; m < 4; ++m) ginv[m][m] = 1.0 / g[m][m];
    const Riemann4 r = riemann_at(bg, x);
    double scal = 0.0;
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n)
        for (int a = 0; a < 4; ++a)
          for (int b = 0; b < 4; ++b) scal += ginv[m][a] * ginv[n][b] * r[m][n][a][b];
    EXPECT_NEAR(scal, R, 1e-10);
  }
}

// Independent oracle: assemble the Riemann tensor from finite differences of
// the closed-form Christoffels and compare with the constant-curvature form.
TEST(Background, RiemannMatchesConnectionCurl) {
  const BackgroundSpacetime bg = cc(5.0, Signature::euclidean);
  const Vec4 x{0.3, -0.1, 0.2, 0.4};
  const double h = 1e-4;
  const Met4 g = metric_at(bg, x);
  const Christoffel4 g0 = christoffel_at(bg, x);
  std::array<Christoffel4, 4> dgam;
  for (int c = 0; c < 4; ++c) {
    Vec4 xp = x, xm = x;
    xp[c] += h;
    xm[c] -= h;
    const Christoffel4 gp = christoffel_at(bg, xp), gm = christoffel_at(bg, xm);
    for (int m = 0; m < 4; ++m)
      for (int n = 0; n < 4; ++n)
        for (int l = 0; l < 4; ++l) dgam[c][m][n][l] = (gp[m][n][l] - gm[m][n][l]) / (2 * h);
  }
  const Riemann4 expect = riemann_at(bg, x);
  double maxerr = 0.0;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          // R^m_{nab} = d_a Gamma^m_{nb} - d_b Gamma^m_{na} + G G - G G
          double up = dgam[a][m][n][b] - dgam[b][m][n][a];
          for (int l = 0; l < 4; ++l) up += g0[m][a][l] * g0[l][n][b] - g0[m][b][l] * g0[l][n][a];
          // lower the first index (the chart metric is diagonal)
          const double lowered = g[m][m] * up;
          maxerr = std::max(maxerr, std::abs(lowered - expect[m][n][a][b]));
        }
  EXPECT_LT(maxerr, 1e-6);
}

TEST(Background, ChartDomainError) {
  // Lorentzian, R > 0: the conformal factor blows up on the hyperboloid
  // 1 + (R/48) sigma = 0; far timelike points are outside the chart.
  const BackgroundSpacetime bg = cc(48.0);
  EXPECT_THROW(metric_at(bg, Vec4{1.1, 0, 0, 0}), ChartDomainError);
  EXPECT_NO_THROW(metric_at(bg, Vec4{0.5, 0, 0, 0}));
}
