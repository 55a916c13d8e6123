#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "heis/subdivision.hpp"
#include "heis/surfaces.hpp"

using namespace heis;

namespace {

IntrinsicGraph graph(Field2 phi) {
  IntrinsicGraph g;
  g.phi = std::move(phi);
  return g;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST(IntegralCurve, ConstantFieldIsExact) {
  const auto c = integrate_Wphi(graph([](double, double) { return 0.7; }), 0.2, 1.0, 0.01, 1.5);
  ASSERT_EQ(c.size(), 151u);
  for (std::size_t k = 0; k < c.size(); ++k) EXPECT_NEAR(c.z[k], 1.0 - 2.8 * c.t[k], 1e-12);
  EXPECT_LT(c.richardson, 1e-12);
  for (double q : c.quotient) EXPECT_EQ(q, 0.0);
  const auto back = integrate_Wphi(graph([](double, double) { return 0.7; }), 0.2, 1.0, 0.01, -0.5);
  EXPECT_NEAR(back.z.back(), 1.0 + 1.4, 1e-12);
  EXPECT_NEAR(back.y.back(), -0.3, 1e-12);
}

TEST(IntegralCurve, LinearFieldEulerErrorIsFirstOrder) {
  // phi = y, y0 = 0: z = -2 t^2; Euler lags by 2 h t
  const auto g = graph([](double y, double) { return y; });
  for (double h : {0.01, 0.005, 0.0025}) {
    const auto c = integrate_Wphi(g, 0.0, 0.0, h, 1.0);
    EXPECT_NEAR(c.z.back() + 2.0, 2.0 * h, 1e-10);
    EXPECT_NEAR(c.richardson, h, 1e-10);
  }
}

TEST(IntegralCurve, QuotientTracksSlope) {
  IntrinsicGraph g = graph([](double y, double z) { return 0.3 * std::sin(y + 2.0 * z); });
  double prev = 0.0;
  for (double h : {4e-3, 2e-3, 1e-3}) {
    const auto c = integrate_Wphi(g, 0.0, 0.1, h, 1.0);
    const double err = max_abs_diff(c.quotient, c.slope);
    if (prev > 0.0) {
      EXPECT_LT(err, 0.65 * prev);
    }
    prev = err;
  }
  EXPECT_LT(prev, 5e-3);
  EXPECT_TRUE(check_injective(g, Rect{-1, 1, -1, 1}, 16, 16));
}

TEST(IntegralCurve, RejectsBadStepAndStart) {
  IntrinsicGraph g = graph([](double, double) { return 0.0; });
  EXPECT_THROW(integrate_Wphi(g, 0, 0, 0.0, 1.0), DomainError);
  g.domain = Rect{0, 1, 0, 1};
  EXPECT_THROW(integrate_Wphi(g, 2.0, 0.5, 0.1, 1.0), DomainError);
}

TEST(Peano, UpperSelectionFollowsParabola) {
  // phi = -sqrt|z| from z = 0: solutions 0 and 4 t^2
  const auto g = graph([](double, double z) { return -std::sqrt(std::abs(z)); });
  const double coarse = extremal_flow(g, 0.0, {0.0}, 1e-3, 1.0).curves[0].z.back();
  const double fine = extremal_flow(g, 0.0, {0.0}, 1e-4, 1.0).curves[0].z.back();
  EXPECT_NEAR(fine, 4.0, 0.05);
  EXPECT_LT(std::abs(fine - 4.0), 0.2 * std::abs(coarse - 4.0));  // selection bias is O(step)
  FlowOptions lo;
  lo.upper = false;
  const auto down = extremal_flow(g, 0.0, {0.0}, 1e-3, 1.0, lo);
  EXPECT_NEAR(down.curves[0].z.back(), 0.0, 1e-3);
}

TEST(Peano, MirrorFieldSelectsZero) {
  // phi = sqrt|z|: solutions 0 and -4 t^2; the upper one is 0
  const auto g = graph([](double, double z) { return std::sqrt(std::abs(z)); });
  const auto up = extremal_flow(g, 0.0, {0.0}, 1e-3, 1.0);
  for (double z : up.curves[0].z) EXPECT_NEAR(z, 0.0, 1e-3);
  FlowOptions lo;
  lo.upper = false;
  EXPECT_NEAR(extremal_flow(g, 0.0, {0.0}, 1e-4, 1.0, lo).curves[0].z.back(), -4.0, 0.05);
}

TEST(Peano, FlowFamilyIsOrdered) {
  const auto g = graph([](double y, double z) { return -std::sqrt(std::abs(z)) + 0.2 * std::sin(5.0 * y); });
  const auto f = extremal_flow(g, 0.0, {0.3, -0.2, 0.0, -0.05, 0.1}, 1e-3, 1.0);
  EXPECT_TRUE(f.ordered);
  EXPECT_EQ(f.seeds.front(), -0.2);
  for (std::size_t j = 1; j < f.curves.size(); ++j)
    for (std::size_t k = 0; k < f.curves[j].size(); ++k) EXPECT_LE(f.curves[j - 1].z[k], f.curves[j].z[k]);
  EXPECT_THROW(extremal_flow(g, 0.0, {}, 1e-3, 1.0), DomainError);
}

TEST(GraphDistance, ConstantFieldMatchesLiftedDistance) {
  const auto g = graph([](double, double) { return -0.4; });
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const double y1 = 2 * unit_uniform(rng) - 1, z1 = 2 * unit_uniform(rng) - 1;
    const double y2 = 2 * unit_uniform(rng) - 1, z2 = 2 * unit_uniform(rng) - 1;
    EXPECT_NEAR(dg_distance(g, y1, z1, y2, z2), dist_inf(g.lift(y1, z1), g.lift(y2, z2)), 1e-10);
  }
  const auto flat = graph([](double, double) { return 0.0; });
  EXPECT_NEAR(dg_distance(flat, 0, 0, 0.3, 0.01), 0.3, 1e-15);
  EXPECT_NEAR(dg_distance(flat, 0, 0, 0.1, 0.25), 0.5, 1e-15);
}

TEST(GraphDistance, ComparableToLiftedDistanceAtSmallScales) {
  const auto g = graph([](double y, double z) { return 0.3 * std::sin(y + 2.0 * z); });
  double prev = 1.0;
  for (double s : {0.1, 0.05, 0.025}) {
    const double dg = dg_distance(g, 0.2, 0.1, 0.2 + s, 0.1 + 0.5 * s * s, 1e-5);
    const double dl = dist_inf(g.lift(0.2, 0.1), g.lift(0.2 + s, 0.1 + 0.5 * s * s));
    const double rel = std::abs(dg - dl) / dl;
    EXPECT_LT(rel, prev);
    prev = rel;
  }
  EXPECT_LT(prev, 0.02);
}

TEST(GraphDistance, ExitingCurveThrows) {
  auto g = graph([](double, double) { return 1.0; });
  g.domain = Rect{0, 1, 0, 1};
  EXPECT_THROW(dg_distance(g, 0.1, 0.5, 0.9, 0.5), DomainError);
}

TEST(SurfaceMeasure, ClosedForms) {
  const Rect unit{0, 1, 0, 1};
  EXPECT_NEAR(surface_measure(graph([](double, double) { return 0.0; }), unit), 2.0, 1e-12);
  IntrinsicGraph sloped = graph([](double y, double) { return y; });
  EXPECT_NEAR(surface_measure(sloped, unit, 16, 16), 2.0 * std::sqrt(2.0), 1e-8);  // w = 1 by differences
  sloped.w = [](double, double) { return 1.0; };
  EXPECT_NEAR(surface_measure(sloped, unit), 2.0 * std::sqrt(2.0), 1e-12);
  EXPECT_EQ(surface_measure(sloped, Rect{0, 1, 0.5, 0.5}), 0.0);
}

TEST(Divergence, BoundHoldsForRoughField) {
  const auto g = graph([](double y, double z) { return std::sqrt(std::abs(z - 0.3)) + 0.5 * std::sin(3.0 * y); });
  std::mt19937_64 rng(9);
  for (int i = 0; i < 20; ++i) {
    const double ya = unit_uniform(rng) - 0.5, za = unit_uniform(rng);
    const double yb = ya + 0.2 * (unit_uniform(rng) - 0.5), zb = unit_uniform(rng);
    const auto a = integrate_Wphi(g, ya, za, 1e-3, 1.0), b = integrate_Wphi(g, yb, zb, 1e-3, 1.0);
    const auto chk = divergence_bound_check(a, b);
    EXPECT_TRUE(chk.holds) << "pair " << i << " margin " << chk.worst_margin;
    EXPECT_NEAR(chk.constant, 4.0 * chk.omega, 1e-15);
  }
  const auto a = integrate_Wphi(g, 0, 0, 1e-3, 1.0), b = integrate_Wphi(g, 0, 0, 2e-3, 1.0);
  EXPECT_THROW(divergence_bound_check(a, b), DomainError);
}

TEST(Newton, LinearMapConvergesInOneStep) {
  const auto F = linear_pair(1, 0, 0, 1);
  const auto r = horizontal_newton(F, {0.3, 0.4}, {0, 0, 0});
  EXPECT_TRUE(r.converged);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_NEAR(r.point.x, 0.3, 1e-15);
  EXPECT_NEAR(r.point.y, 0.4, 1e-15);
  EXPECT_EQ(r.point.z, 0.0);
  const auto same = horizontal_newton(F, {0.3, 0.4}, r.point);
  EXPECT_EQ(same.iterations, 0);
}

TEST(Newton, ShearedMapAndTranslationTerm) {
  const auto r = horizontal_newton(linear_pair(1, 1, 0, 1), {1, 1}, {0, 0, 0});
  EXPECT_NEAR(r.point.x, 0.0, 1e-15);
  EXPECT_NEAR(r.point.y, 1.0, 1e-15);
  EXPECT_NEAR(r.point.z, 0.0, 1e-15);
  // a horizontal move from (0,1,0) by (1,0,0) adds 2 * 1 * 1 to z
  const auto s = horizontal_newton(linear_pair(1, 0, 0, 1), {1, 1}, {0, 1, 0});
  EXPECT_NEAR(s.point.z, 2.0, 1e-15);
}

TEST(Newton, CycleDoesNotConvergeAndDegenerateThrows) {
  // x^3 - 2x + 2 cycles between 0 and 1 under Newton
  ScalarMapPair F;
  F.f = [](const HPoint& p) { return p.x * p.x * p.x - 2 * p.x + 2; };
  F.g = [](const HPoint& p) { return p.y; };
  F.xf = [](const HPoint& p) { return 3 * p.x * p.x - 2; };
  F.yf = [](const HPoint&) { return 0.0; };
  F.xg = [](const HPoint&) { return 0.0; };
  F.yg = [](const HPoint&) { return 1.0; };
  const auto r = horizontal_newton(F, {0, 0}, {0, 0, 0}, 1e-12, 10);
  EXPECT_FALSE(r.converged);
  EXPECT_EQ(r.iterations, 10);
  EXPECT_EQ(r.history.size(), 11u);
  EXPECT_THROW(horizontal_newton(linear_pair(1, 1, 1, 1), {1, 0}, {0, 0, 0}), DomainError);
}

TEST(Newton, NumericDerivativesMatchLinear) {
  const auto F = numeric_pair([](const HPoint& p) { return p.x + 2 * p.y; }, [](const HPoint& p) { return p.z; });
  const HPoint p{0.3, -0.7, 1.1};
  EXPECT_NEAR(F.xf(p), 1.0, 1e-8);
  EXPECT_NEAR(F.yf(p), 2.0, 1e-8);
  EXPECT_NEAR(F.xg(p), 2 * p.y, 1e-8);   // X z = 2y
  EXPECT_NEAR(F.yg(p), -2 * p.x, 1e-8);  // Y z = -2x
}

TEST(Coarea, LinearMapsGiveOneConstant) {
  const std::vector<Box3> boxes{{0, 1, 0, 1, 0, 1}, {2, 3, 0, 1, 0, 1}, {0, 1, 2, 3, 1, 2}};
  CoareaOptions o;
  o.grid = 32;
  o.a_grid = 96;
  const auto id = coarea_check(linear_pair(1, 0, 0, 1), boxes, o);
  const auto rot = coarea_check(linear_pair(1, 1, -1, 1), boxes, o);
  for (const auto* rep : {&id, &rot}) {
    EXPECT_LT(rep->spread, 0.05);
    for (const auto& b : rep->boxes) {
      EXPECT_NEAR(b.ratio, 1.0, 0.03);
      EXPECT_EQ(b.failed, 0u);
    }
  }
  EXPECT_NEAR(id.boxes[0].ratio, rot.boxes[0].ratio, 0.03);
  EXPECT_THROW(coarea_check(linear_pair(1, 0, 0, 1), {}, o), DomainError);
}

TEST(Coarea, VerticalShearKeepsConstant) {
  // F = (x, y + z/10): det = 1 - x/5 varies across boxes, and the level sets tilt
  const auto F = numeric_pair([](const HPoint& p) { return p.x; }, [](const HPoint& p) { return p.y + 0.1 * p.z; });
  CoareaOptions o;
  o.grid = 16;
  o.a_grid = 48;
  const auto r = coarea_check(F, {{0, 1, 0, 1, 0, 1}, {2, 3, 0, 1, 0, 1}, {0, 1, 2, 3, 1, 2}}, o);
  EXPECT_LT(r.spread, 0.01);
  EXPECT_NEAR(r.boxes[1].rhs, 0.5, 1e-6);
  EXPECT_NEAR(r.boxes[1].ratio, 1.0, 0.03);
}

TEST(Coarea, InsideFraction) {
  const Box3 b{};
  EXPECT_DOUBLE_EQ(detail::inside_fraction(b, {0.5, 0.5, -1}, {0.5, 0.5, 1}), 0.5);
  EXPECT_DOUBLE_EQ(detail::inside_fraction(b, {2, 0.5, 0}, {2, 0.5, 1}), 0.0);
  EXPECT_DOUBLE_EQ(detail::inside_fraction(b, {0.2, 0.2, 0.2}, {0.3, 0.3, 0.3}), 1.0);
}
