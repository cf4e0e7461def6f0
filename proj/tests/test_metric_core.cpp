#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "arcflow/arcflow.hpp"

using namespace arcflow;

namespace {

MetricSpace<double> signed_line() {
  MetricSpace<double> s;
  s.name = "broken";
  s.distance = [](double a, double b) { return a - b; };
  s.sample = [](std::uint64_t seed, const Region<double>& r) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-r.radius, r.radius);
    std::vector<double> out;
    for (std::size_t i = 0; i < r.count; ++i) out.push_back(r.center + u(rng));
    return out;
  };
  s.describe = [](double a) { return std::to_string(a); };
  s.magnitude = [](double a) { return std::abs(a); };
  return s;
}

}  // namespace

TEST(MetricAxioms, EuclideanPlanePasses) {
  const auto r2 = euclidean_space(2);
  const auto rep = verify_metric_axioms(r2, Region<EuclideanPoint>{{0.0, 0.0}, 5.0, 1}, 1000, 11);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.worst_triangle, 1e-12);
  EXPECT_EQ(rep.worst_symmetry, 0.0);
  EXPECT_EQ(rep.worst_identity, 0.0);
}

TEST(MetricAxioms, GridFunctionSpacePasses) {
  const auto rep = verify_metric_axioms(l2_space(), Region<GridFunction>{l2::gaussian(), 1.0, 1}, 1000, 3);
  EXPECT_TRUE(rep.pass);
  EXPECT_LE(rep.worst_triangle, 1e-9);
}

TEST(MetricAxioms, SignedDistanceFailsOnSymmetry) {
  const auto rep = verify_metric_axioms(signed_line(), Region<double>{0.0, 1.0, 1}, 100, 5);
  EXPECT_FALSE(rep.pass);
  EXPECT_GT(rep.worst_symmetry, 0.1);
}

TEST(MetricAxioms, SamplerFailureIsReported) {
  auto s = signed_line();
  s.sample = [](std::uint64_t, const Region<double>&) -> std::vector<double> { throw std::runtime_error("boom"); };
  try {
    verify_metric_axioms(s, Region<double>{0.0, 1.0, 1}, 10, 1);
    FAIL() << "expected SAMPLER_ERROR";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::SamplerError);
  }
  EXPECT_THROW(verify_metric_axioms(signed_line(), Region<double>{0.0, 1.0, 1}, 0, 1), Error);
}

TEST(CurveGap, IdenticalCurvesGiveZeros) {
  const auto r1 = euclidean_space(1);
  auto c = [](double t) { return EuclideanPoint{std::sin(t)}; };
  const auto gaps = curve_gap(r1, c, c, dyadic_grid());
  for (double g : gaps) EXPECT_EQ(g, 0.0);
}

TEST(CurveGap, QuadraticSeparation) {
  const auto r1 = euclidean_space(1);
  const auto ts = dyadic_grid(1, 8);
  const auto gaps = curve_gap(
      r1, [](double t) { return EuclideanPoint{t}; }, [](double t) { return EuclideanPoint{t + t * t}; }, ts);
  for (std::size_t i = 0; i < ts.size(); ++i) EXPECT_NEAR(gaps[i], ts[i] * ts[i], 1e-15);
}

TEST(CurveGap, DilationBracketAgainstTranslation) {
  const auto r2 = euclidean_space(2);
  const auto br = bracket(dilation_flow({0.0, 0.0}).as_arc_field(), dilation_flow({1.0, 0.0}).as_arc_field());
  const auto Z = make_translation({1.0, 0.0});
  const EuclideanPoint x{0.0, 0.0};
  const std::vector<double> ts{0.01};
  const auto gaps = curve_gap(
      r2, [&](double t) { return br(x, t); }, [&](double t) { return Z(x, t); }, ts);
  const double expect = std::abs(0.01 - std::pow(std::exp(-0.1) - 1.0, 2));
  EXPECT_NEAR(gaps[0], expect, 1e-15);
  EXPECT_NEAR(gaps[0], 9.44e-4, 5e-7);
}

TEST(CurveGap, RejectsBadGrids) {
  const auto r1 = euclidean_space(1);
  auto c = [](double t) { return EuclideanPoint{t}; };
  const std::vector<double> ascending{0.1, 0.2};
  const std::vector<double> nonpositive{0.1, 0.0};
  EXPECT_THROW(curve_gap(r1, c, c, ascending), Error);
  EXPECT_THROW(curve_gap(r1, c, c, nonpositive), Error);
}

TEST(CurveGap, EscapeCarriesIndex) {
  const auto r1 = euclidean_space(1);
  auto ok = [](double t) { return EuclideanPoint{t}; };
  auto escaping = [](double t) -> EuclideanPoint {
    if (t < 0.01) throw Error(ErrorCode::PointEscaped, "left the domain");
    return {t};
  };
  try {
    curve_gap(r1, ok, escaping, dyadic_grid());
    FAIL() << "expected CURVE_ESCAPED";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::CurveEscaped);
    ASSERT_TRUE(e.index().has_value());
    EXPECT_EQ(*e.index(), 3u);  // 2^-7 is the first grid value below 0.01
  }
}

TEST(EstimateOrder, ExactSquare) {
  const auto ts = dyadic_grid();
  std::vector<double> gaps;
  for (double t : ts) gaps.push_back(t * t);
  const auto r = estimate_order(ts, gaps);
  EXPECT_NEAR(r.order_p, 2.0, 1e-6);
  EXPECT_EQ(r.verdict, Verdict::SecondOrder);
  EXPECT_NEAR(r.constant_C, 1.0, 1e-6);
  EXPECT_LT(r.fit_residual, 1e-9);
}

TEST(EstimateOrder, DilationBracketIsTangent) {
  const auto ts = dyadic_grid();
  std::vector<double> gaps;
  for (double t : ts) gaps.push_back(std::abs(std::pow(std::exp(-std::sqrt(t)) - 1.0, 2) - t));
  const auto r = estimate_order(ts, gaps);
  EXPECT_NEAR(r.order_p, 1.5, 0.05);
  EXPECT_EQ(r.verdict, Verdict::Tangent);
}

TEST(EstimateOrder, LinearGapIsNotTangent) {
  const auto ts = dyadic_grid();
  std::vector<double> gaps;
  for (double t : ts) gaps.push_back(0.5 * t);
  const auto r = estimate_order(ts, gaps);
  EXPECT_NEAR(r.order_p, 1.0, 1e-9);
  EXPECT_EQ(r.verdict, Verdict::NotTangent);
}

TEST(EstimateOrder, RecoversSyntheticPowers) {
  const auto ts = dyadic_grid();
  for (double p : {1.0, 1.5, 2.0}) {
    for (double C : {1e-3, 1.0, 1e3}) {
      std::vector<double> gaps;
      for (double t : ts) gaps.push_back(C * std::pow(t, p));
      const auto r = estimate_order(ts, gaps);
      EXPECT_NEAR(r.order_p, p, 0.05) << "p=" << p << " C=" << C;
    }
  }
}

TEST(EstimateOrder, AllBelowFloorIsExactZero) {
  const auto ts = dyadic_grid();
  std::vector<double> gaps(ts.size(), 1e-13);
  EXPECT_EQ(estimate_order(ts, gaps).verdict, Verdict::ExactZero);
}

TEST(EstimateOrder, InsufficientData) {
  const std::vector<double> ts{0.1, 0.05, 0.025};
  const std::vector<double> gaps{1.0, 0.5, 0.25};
  EXPECT_THROW(estimate_order(ts, gaps), Error);
  // four points inside one decade
  const std::vector<double> narrow{0.1, 0.08, 0.06, 0.04};
  const std::vector<double> g4{0.1, 0.08, 0.06, 0.04};
  try {
    estimate_order(narrow, g4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientData);
  }
}

TEST(DistanceToSet, MemberAndPlane) {
  const auto r3 = euclidean_space(3);
  SampledSet<EuclideanPoint> plane;
  for (int i = -10; i <= 10; ++i) {
    for (int j = -10; j <= 10; ++j) plane.points.push_back({0.1 * i, 0.1 * j, 0.0});
  }
  EXPECT_EQ(distance_to_set(r3, plane.points[37], plane), 0.0);
  EXPECT_DOUBLE_EQ(distance_to_set(r3, {0.0, 0.0, 1.0}, plane), 1.0);

  SampledSet<EuclideanPoint> shifted;
  for (int i = -10; i <= 10; ++i) {
    for (int j = -10; j <= 10; ++j) shifted.points.push_back({0.1 * i + 0.05, 0.1 * j + 0.05, 0.0});
  }
  const double d = distance_to_set(r3, {0.0, 0.0, 1.0}, shifted);
  EXPECT_GE(d, 1.0);
  EXPECT_LE(d, std::sqrt(1.0 + 2.0 * 0.05 * 0.05) + 1e-15);
}

TEST(DistanceToSet, TriangleTypeInequality) {
  const auto r2 = euclidean_space(2);
  SampledSet<EuclideanPoint> S;
  for (int k = 0; k < 200; ++k) S.points.push_back({std::cos(0.0314 * k), std::sin(0.0314 * k)});
  const auto pts = r2.sample(9, Region<EuclideanPoint>{{0.0, 0.0}, 3.0, 200});
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    EXPECT_LE(distance_to_set(r2, pts[i], S),
              r2.distance(pts[i], pts[i + 1]) + distance_to_set(r2, pts[i + 1], S) + 1e-12);
  }
}
