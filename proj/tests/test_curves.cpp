#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "heis/curves.hpp"
#include "heis/stieltjes.hpp"

using namespace heis;

namespace {
constexpr double kPi = std::numbers::pi;

LacunarySpec circle_pair() {
  LacunarySpec s;
  s.a = {cplx(0, 1)};
  s.b = {cplx(0, -1)};
  s.c = {cplx(1, 0)};
  s.d = {cplx(1, 0)};
  return s;
}
}  // namespace

TEST(Lacunary, SingleModeIsAScaledCircle) {
  // a0 = i, b0 = -i, c0 = d0 = 1 gives f = sin(2 pi t)/pi, g = cos(2 pi t)/pi
  const auto grid = dyadic_grid(10);
  const auto e = lacunary_eval(circle_pair(), grid);
  for (std::size_t i = 0; i < grid.size(); i += 37) {
    EXPECT_NEAR(e.f.v[i], std::sin(2 * kPi * grid[i]) / kPi, 1e-14);
    EXPECT_NEAR(e.g.v[i], std::cos(2 * kPi * grid[i]) / kPi, 1e-14);
  }
  EXPECT_LT(e.max_imag, 1e-15);
}

TEST(Lacunary, StieltjesSumMatchesLimit) {
  const auto grid = dyadic_grid(16);
  const auto e = lacunary_eval(circle_pair(), grid);
  EXPECT_NEAR(stieltjes_sum(e.f, e.g), -1.0 / kPi, 1e-3);
  const auto lim = lacunary_limit(circle_pair());
  EXPECT_NEAR(lim.predicted.real(), -1.0 / kPi, 1e-15);
  EXPECT_NEAR(lim.predicted.imag(), 0.0, 1e-15);
}

TEST(Lacunary, LimitFormulaOnMixedPair) {
  // several real modes: the fine-grid sum approaches the series prediction
  std::vector<cplx> a{cplx(0.3, -0.4), cplx(0.0, 0.7), cplx(-0.2, 0.1), cplx(0.5, 0.5)};
  std::vector<cplx> c{cplx(1.0, 0.2), cplx(-0.3, 0.6), cplx(0.4, 0.0), cplx(0.1, -0.9)};
  const auto spec = LacunarySpec::real_pair(a, c);
  const auto grid = dyadic_grid(16);
  const auto e = lacunary_eval(spec, grid);
  const auto lim = lacunary_limit(spec);
  EXPECT_NEAR(stieltjes_sum(e.f, e.g), lim.predicted.real(), 2e-3);
  // for real pairs the prediction is -pi^-1 sum Im(a d)
  double direct = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) direct -= (a[n] * std::conj(c[n])).imag() / kPi;
  EXPECT_NEAR(lim.predicted.real(), direct, 1e-14);
  EXPECT_NEAR(adherence_interval(spec).partial.back(), direct, 1e-14);
  EXPECT_GT(lim.remainder_bound(1e-3), 0.0);
}

TEST(Lacunary, NyquistLimitEnforced) {
  const auto spec = infinite_measure_spec(12);
  EXPECT_THROW(lacunary_eval(spec, dyadic_grid(12)), DomainError);
  EXPECT_NO_THROW(lacunary_eval(spec, dyadic_grid(13)));
}

TEST(Lacunary, InfiniteMeasurePartialsGrowHarmonically) {
  const auto spec = infinite_measure_spec(40, 1.0);
  const auto lim = lacunary_limit(spec);
  double h = 0.0;
  for (std::size_t n = 0; n < 40; ++n) {
    h += 1.0 / static_cast<double>(n + 1);
    EXPECT_NEAR(lim.partial[n].real(), h / kPi, 1e-12);
  }
  const auto adh = adherence_interval(spec, 20);
  EXPECT_LT(adh.lower, adh.upper);
}

TEST(Lacunary, NullMeasureTail) {
  EXPECT_NEAR(null_measure_tail(0, 1), kPi * kPi / 6.0, 1e-3);
  EXPECT_NEAR(null_measure_tail(3, 1), kPi * kPi / 6.0 - 1.0 - 0.25 - 1.0 / 9.0, 1e-3);
  EXPECT_NEAR(null_measure_tail(0, 5), null_measure_tail(4, 1), 1e-12);
  const auto s = null_measure_spec(6, 2);
  EXPECT_EQ(s.b[1], cplx());
  EXPECT_EQ(s.b[2], cplx(0, -0.5));
  EXPECT_EQ(s.c[3], cplx(1.0 / 3.0, 0));
}

TEST(TailCoefficient, GeometricWeights) {
  // single coefficient 1 at n = 2: L_k = 2 * 2^{-|k-2|/2}
  const std::vector<cplx> seq{0, 0, 1};
  EXPECT_NEAR(tail_coefficient(seq, 2), 2.0, 1e-15);
  EXPECT_NEAR(tail_coefficient(seq, 4), 1.0, 1e-15);
  EXPECT_NEAR(tail_coefficient(seq, 0), 1.0, 1e-15);
}

TEST(Weierstrass, HolderSeminormStaysBounded) {
  double prev = 0.0;
  for (int k : {8, 10, 12}) {
    const auto w = weierstrass(dyadic_grid(k), 0.6, k - 2);
    const double s = holder_seminorm(w, 0.6);
    EXPECT_LT(s, 40.0);
    if (prev > 0.0) {
      EXPECT_LT(s, 1.2 * prev);
    }
    prev = s;
  }
  const auto c = holder_curve(dyadic_grid(8), 0.75, 6, 0.1);
  EXPECT_EQ(c.x.front(), 0.0);
  EXPECT_EQ(c.y.front(), 0.0);
}

TEST(Koch, SegmentLengthsFollowSchedule) {
  KochSpec s;
  s.depth = 9;
  const auto p = koch_generate(s);
  ASSERT_EQ(p.size(), (1u << 9) + 1);
  const double l = koch_length(s, 9);
  EXPECT_NEAR(l, std::pow(2.0, -9.0 * (0.5 + 1.0 / 6.0)), 1e-15);
  for (std::size_t i = 0; i + 1 < p.size(); ++i)
    EXPECT_NEAR(std::hypot(p.x[i + 1] - p.x[i], p.y[i + 1] - p.y[i]), l, 1e-12);
  EXPECT_EQ(p.x.front(), 0.0);
  EXPECT_NEAR(p.x.back(), 1.0, 1e-15);
  EXPECT_NEAR(p.y.back(), 0.0, 1e-15);
}

TEST(Koch, FlatAtHalfAndInfeasibleSchedules) {
  KochSpec s;
  s.h = [](int) { return 0.0; };  // l_{n+1} = l_n / sqrt 2: right-angle apex
  s.depth = 1;
  const auto p = koch_generate(s);
  EXPECT_NEAR(p.x[1], 0.5, 1e-15);
  EXPECT_NEAR(std::abs(p.y[1]), 0.5, 1e-15);
  KochSpec bad;
  bad.h = [](int n) { return n == 1 ? 0.0 : 0.49; };
  bad.depth = 3;
  EXPECT_THROW(koch_generate(bad), DomainError);
  bad.h = [](int) { return 0.5; };
  EXPECT_THROW(koch_generate(bad), DomainError);
}

TEST(Koch, QuasiHelixAndSlowSchedule) {
  const auto q = quasi_helix_spec(1.5, 4);
  EXPECT_NEAR(q.h(3), 1.0 / 6.0, 1e-15);
  EXPECT_THROW(quasi_helix_spec(1.0, 4), DomainError);
  for (int n = 1; n < 50; ++n) EXPECT_LT(koch_slow_h(n + 1), koch_slow_h(n));
  KochSpec s;
  s.h = koch_slow_h;
  s.depth = 14;
  EXPECT_NO_THROW(koch_generate(s));
}

TEST(Lift, ConsecutiveContactIsTimeStep) {
  const auto grid = dyadic_grid(10, 0.0, 2.0);
  const auto g = holder_curve(grid, 0.75, 8, 0.2);
  const auto L = vertical_lift(g, 0.5);
  EXPECT_EQ(L.z.front(), 0.5);
  for (std::size_t i = 0; i + 1 < L.size(); ++i)
    EXPECT_NEAR(contact_z(L.point(i), L.point(i + 1)), grid[i + 1] - grid[i], 1e-13);
}

TEST(Modulus, ConstantAndTabulated) {
  const Modulus m = constant_modulus(0.5);
  EXPECT_DOUBLE_EQ(m.h(0.2), 0.4);
  EXPECT_THROW(constant_modulus(1.5), DomainError);
  const Modulus t = tabulated_modulus({1e-4, 1e-2, 1.0}, {0.01, 0.1, 1.0});
  double prev = 0.0;
  for (double d = 1e-6; d < 1.0; d *= 1.7) {
    EXPECT_GE(t.eps(d), prev);
    prev = t.eps(d);
  }
}

TEST(RoughLift, StraightLineGivesChordOverEps) {
  // no area on a segment, and sum |d|^2 over a chain is maximal for the single chord
  SampledPath g;
  for (double t : dyadic_grid(7)) g.push_back(t, 3.0 * t, -t);
  const auto r = rough_lift(g, constant_modulus(0.25));
  for (std::size_t i = 0; i < g.size(); i += 9) {
    const double d2 = g.x[i] * g.x[i] + g.y[i] * g.y[i];
    EXPECT_NEAR(r.lift.z[i], d2 / 0.25, 1e-12);
  }
  EXPECT_TRUE(r.finite);
  EXPECT_FALSE(rough_lift(g, constant_modulus(0.25), 1.0).finite);
}

TEST(RoughLift, ContactDominatesModulusTerm) {
  const auto grid = dyadic_grid(8);
  const auto g = lacunary_path(infinite_measure_spec(5), grid);
  const auto r = rough_lift(g, constant_modulus(1.0));
  for (std::size_t i = 0; i < g.size(); i += 5)
    for (std::size_t j = i + 1; j < g.size(); j += 7) {
      const double dx = g.x[j] - g.x[i], dy = g.y[j] - g.y[i];
      EXPECT_GE(contact_z(r.lift.point(i), r.lift.point(j)), (dx * dx + dy * dy) * (1 - 1e-9) - 1e-15);
    }
}
