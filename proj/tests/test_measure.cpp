#include <gtest/gtest.h>

#include <cmath>

#include "heis/curves.hpp"
#include "heis/measure.hpp"

using namespace heis;

namespace {
SampledPath vertical_segment(int k, double height) {
  SampledPath p;
  p.kind = PathKind::Heisenberg;
  for (double t : dyadic_grid(k)) p.push_back(t, HPoint{0.0, 0.0, height * t});
  return p;
}
}  // namespace

TEST(Buckets, Log2) {
  EXPECT_EQ(log2_bucket(1.0), 0);
  EXPECT_EQ(log2_bucket(1.5), 0);
  EXPECT_EQ(log2_bucket(0.5), -1);
  EXPECT_EQ(log2_bucket(0.49), -2);
}

TEST(Verdict, Rules) {
  AreaOptions o;
  EXPECT_EQ(classify_levels({1, 1.2, 1.5, 1.9, 2.4}, o), Verdict::Divergent);
  EXPECT_EQ(classify_levels({1, 0.9, 0.8, 0.7}, o), Verdict::Convergent);
  EXPECT_EQ(classify_levels({1, 1.001, 1.0011, 1.0012}, o), Verdict::Convergent);
  EXPECT_EQ(classify_levels({1, 1.3, 1.0, 1.3, 1.0}, o), Verdict::Inconclusive);
  EXPECT_EQ(classify_levels({1, 1.1}, o), Verdict::Inconclusive);
  // growth below 1.5x and no ceiling: keeps rising but is not declared divergent
  EXPECT_EQ(classify_levels({1, 1.05, 1.1, 1.15}, o), Verdict::Inconclusive);
  o.ceiling = 1.12;
  EXPECT_EQ(classify_levels({1, 1.05, 1.1, 1.15}, o), Verdict::Divergent);
}

TEST(Verdict, GeometricExtrapolation) {
  EXPECT_NEAR(extrapolate_levels({2.0, 1.5, 1.25, 1.125}, Verdict::Convergent), 1.0, 1e-12);
  EXPECT_TRUE(std::isinf(extrapolate_levels({1, 2, 3, 4}, Verdict::Divergent)));
}

TEST(Area, VerticalSegmentIsExact) {
  const auto p = vertical_segment(10, 3.0);
  const auto c = kappa_dinf2(p);
  AreaOptions o;
  o.max_level = 8;
  const auto r = hausdorff_area(c, o);
  for (double e : r.estimate) EXPECT_NEAR(e, 3.0, 1e-12);
  EXPECT_EQ(r.verdict, Verdict::Convergent);
}

TEST(Area, ParameterKappaGivesLength) {
  const auto c = kappa_parameter(dyadic_grid(8, 0.0, 2.5), 2.0);
  AreaOptions o;
  o.max_level = 5;
  for (double e : hausdorff_area(c, o).estimate) EXPECT_NEAR(e, 5.0, 1e-12);
}

TEST(Area, LiftFormulaDecomposition) {
  // kappa sums over a subdivision = vertical term - Levy area when contacts dominate
  const auto grid = dyadic_grid(12);
  const auto L = vertical_lift(holder_curve(grid, 0.75, 10, 0.05));
  const auto c = kappa_contact(L);
  AreaOptions o;
  o.max_level = 10;
  o.random_count = 4;
  const auto r = hausdorff_area(c, o);
  for (std::size_t k = 0; k < r.level.size(); ++k) {
    EXPECT_NEAR(r.vertical_term[k], L.z.back(), 1e-15);
    EXPECT_GT(r.estimate[k], 0.0);
  }
  EXPECT_NEAR(r.estimate.back(), 1.0, 0.02);
}

TEST(Area, DegenerateCurveRejected) {
  SampledPath p;
  p.kind = PathKind::Heisenberg;
  p.push_back(0.0, HPoint{});
  EXPECT_THROW(hausdorff_area(kappa_dinf2(p)), DomainError);
}

TEST(Flatness, ModulusVanishesOnSegmentAndIsSmallOnLift) {
  const auto seg = kappa_dinf2(vertical_segment(10, 1.0));
  for (double v : flatness_modulus(seg).value) EXPECT_LT(v, 1e-12);
  const auto L = vertical_lift(holder_curve(dyadic_grid(12), 0.75, 10, 0.05));
  const auto prof = flatness_modulus(kappa_dinf2(L));
  ASSERT_GT(prof.size(), 4u);
  EXPECT_LT(prof.value.front(), 0.02);
  const auto env = prof.envelope();
  for (std::size_t i = 1; i < env.size(); ++i) EXPECT_GE(env[i], env[i - 1]);
}

TEST(Flatness, DegenerateThrows) {
  SampledPath p;
  p.kind = PathKind::Heisenberg;
  for (double t : dyadic_grid(3)) p.push_back(t, HPoint{});
  EXPECT_THROW(flatness_modulus(kappa_dinf2(p)), DomainError);
}

TEST(Bisection, ParameterKappaHalves) {
  const auto c = kappa_parameter(dyadic_grid(4));
  EXPECT_NEAR(kappa_midpoint(c, 0.0, 1.0), 0.5, 1e-10);
  const auto rep = bisect_dimension(c, 10);
  EXPECT_NEAR(rep.dimension, 1.0, 1e-9);
  EXPECT_TRUE(rep.family.envelope_ok);
  EXPECT_NEAR(rep.ahlfors_min, 1.0, 1e-8);
  EXPECT_NEAR(rep.ahlfors_max, 1.0, 1e-8);
}

TEST(Bisection, SquareRootKappaHasDimensionTwo) {
  // kappa = |t-s|^(1/2): mu = 2^-k on intervals with kappa = 2^{-k/2}
  QuasiMetricCurve c;
  c.grid = dyadic_grid(4);
  c.on_param = [](double s, double t) { return std::sqrt(std::abs(t - s)); };
  c.on_index = [&](std::size_t i, std::size_t j) { return c.on_param(c.grid[i], c.grid[j]); };
  EXPECT_NEAR(bisect_dimension(c, 10).dimension, 2.0, 1e-6);
}

TEST(Bisection, LiftHasUnitDimension) {
  const auto L = vertical_lift(holder_curve(dyadic_grid(14), 0.75, 12, 0.05));
  const auto rep = bisect_dimension(kappa_dinf2(L), 10);
  EXPECT_NEAR(rep.dimension, 1.0, 0.05);
  EXPECT_TRUE(rep.family.envelope_ok);
  EXPECT_GT(rep.ahlfors_min, 0.5);
  EXPECT_LT(rep.ahlfors_max, 2.0);
}

TEST(Bisection, FailsToBracketOnFlatPiece) {
  QuasiMetricCurve c;
  c.grid = dyadic_grid(2);
  c.on_param = [](double, double) { return 1.0; };
  c.on_index = [](std::size_t, std::size_t) { return 1.0; };
  EXPECT_THROW(kappa_midpoint(c, 0.0, 1.0), DomainError);
}

TEST(Diameter, VerticalSegmentRatiosAreOne) {
  const auto prof = diameter_ratio(kappa_dinf2(vertical_segment(9, 1.0)), 32, 9);
  for (double v : prof.diameter.value) EXPECT_NEAR(v, 1.0, 1e-12);
  for (double v : prof.cover.value) EXPECT_NEAR(v, 1.0, 1e-9);
}

TEST(BoxCount, Segment) {
  SampledPath seg;
  for (double t : dyadic_grid(4)) seg.push_back(t, 0.3 + 0.5 * t, 0.31);
  EXPECT_NEAR(box_counting_dimension(seg, 4, 10).dimension, 1.0, 0.05);
  EXPECT_THROW(box_counting_dimension(seg, 4, 4), DomainError);
}

TEST(BoxCount, KochBetweenSegmentScales) {
  // h = 1/6 gives segment ratio 2^{-2/3}: similarity dimension 1.5
  KochSpec s;
  s.depth = 12;
  const auto p = koch_generate(s);
  EXPECT_NEAR(box_counting_dimension(p, 3, 8).dimension, 1.5, 0.15);
  const double koch = box_counting_dimension(p, 3, 8).dimension;
  s.h = [](int) { return 0.0; };
  s.depth = 12;
  // h = 0 keeps the ratio at 2^-1/2 and fills a region
  EXPECT_GT(box_counting_dimension(koch_generate(s), 3, 8).dimension, koch + 0.1);
}
