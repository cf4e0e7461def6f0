#include <gtest/gtest.h>

#include <cmath>

#include "arcflow/arcflow.hpp"

using namespace arcflow;

namespace {

const MetricSpace<EuclideanPoint> R1 = euclidean_space(1);
const MetricSpace<EuclideanPoint> R2 = euclidean_space(2);

}  // namespace

TEST(EulerCurve, DilationPowers) {
  const auto X = make_dilation({0.0});
  EXPECT_NEAR(euler_curve(X, EuclideanPoint{1.0}, 1.0, 10)[0], 2.5937424601, 1e-10);
  EXPECT_NEAR(euler_curve(X, EuclideanPoint{1.0}, 1.0, 20)[0], 2.6532977, 1e-7);
}

TEST(EulerCurve, ExactFlowsIgnoreStepCount) {
  const auto F = dilation_flow({1.0, -1.0});
  const EuclideanPoint x{0.3, 0.2};
  for (int n : {1, 3, 16, 100}) {
    EXPECT_LE(R2.distance(euler_curve(F.as_arc_field(), x, 0.8, n), F(x, 0.8)), 1e-13);
  }
}

TEST(EulerCurve, FirstOrderConvergence) {
  const auto X = make_dilation({0.0});
  std::vector<double> err;
  for (int n : {10, 20, 40, 80, 160}) err.push_back(std::exp(1.0) - euler_curve(X, EuclideanPoint{1.0}, 1.0, n)[0]);
  EXPECT_NEAR(err[0], 0.12454, 1e-5);
  EXPECT_NEAR(err[1], 0.06498, 1e-5);
  for (std::size_t i = 0; i + 1 < err.size(); ++i) {
    const double ratio = err[i] / err[i + 1];
    EXPECT_GE(ratio, 1.7);
    EXPECT_LE(ratio, 2.3);
  }
}

TEST(EulerCurve, EscapeReportsCompletedSteps) {
  const auto X = ArcField<EuclideanPoint>::leaf("wall", "r1", [](const EuclideanPoint& x, double t) {
    const double y = x[0] + t;
    if (y > 0.55) throw Error(ErrorCode::PointEscaped, "past the wall");
    return EuclideanPoint{y};
  });
  try {
    euler_curve(X, EuclideanPoint{0.0}, 1.0, 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PointEscaped);
    ASSERT_TRUE(e.index().has_value());
    EXPECT_EQ(*e.index(), 5u);
  }
  EXPECT_THROW(euler_curve(X, EuclideanPoint{0.0}, 1.0, 0), Error);
}

TEST(Solve, DilationReachesE) {
  const auto r = solve(R1, make_dilation({0.0}), EuclideanPoint{1.0}, 1.0, 1e-4, SolveOptions{16, 1 << 16});
  EXPECT_NEAR(r.endpoint[0], std::exp(1.0), 1e-4);
  EXPECT_FALSE(r.escaped);
  EXPECT_LE(r.error_estimate, 1e-4);
  EXPECT_GE(r.error_estimate, 0.0);
}

TEST(Solve, TranslationIsExactAtFirstComparison) {
  const auto r = solve(R2, make_translation({1.0, 2.0}), EuclideanPoint{0.0, 0.0}, 0.75, 1e-12);
  EXPECT_EQ(r.error_estimate, 0.0);
  EXPECT_EQ(r.steps_used, 32);  // 32 vs 16 steps is the first Richardson comparison
  EXPECT_NEAR(r.endpoint[0], 0.75, 1e-15);
  EXPECT_NEAR(r.endpoint[1], 1.5, 1e-15);
}

TEST(Solve, NoConvergence) {
  try {
    solve(R1, make_dilation({0.0}), EuclideanPoint{1.0}, 1.0, 1e-9, SolveOptions{16, 256});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::NoConvergence);
  }
  EXPECT_THROW(solve(R1, make_dilation({0.0}), EuclideanPoint{1.0}, 1.0, 0.0), Error);
}

TEST(Solve, EscapeSetsFlagAndTime) {
  const auto X = ArcField<EuclideanPoint>::leaf("wall", "r1", [](const EuclideanPoint& x, double t) {
    const double y = x[0] + t;
    if (y > 0.5) throw Error(ErrorCode::PointEscaped, "past the wall");
    return EuclideanPoint{y};
  });
  const auto r = solve(R1, X, EuclideanPoint{0.0}, 1.0, 1e-6);
  EXPECT_TRUE(r.escaped);
  ASSERT_TRUE(r.escape_time.has_value());
  EXPECT_GT(*r.escape_time, 0.0);
  EXPECT_LT(*r.escape_time, 1.0);
  EXPECT_NEAR(*r.escape_time, 8.5 / 16.0, 1e-15);
}

TEST(Solve, GridEscapeFromMassLoss) {
  const GridSpec grid{2.0, 1.0 / 64};
  const auto h = GridFunction::sample(grid, [](double x) { return std::exp(-x * x); });
  const auto r = solve(l2_space(), l2::l2_Y(), h, 1.0, 1e-6);
  // shifting the Gaussian by ~1 on [-2, 2] drops more than 1e-6 of its mass
  EXPECT_TRUE(r.escaped);
  ASSERT_TRUE(r.escape_time.has_value());
  EXPECT_LT(*r.escape_time, 1.0);
}

TEST(PullBack, TranslationsGiveTheField) {
  const auto F = translation_flow({0.0, 1.0});
  const auto X = make_translation({1.0, 0.0});
  const EuclideanPoint x{0.4, -0.2};
  for (double s : {0.3, -0.8}) {
    for (double t : {0.2, -0.5}) EXPECT_LE(R2.distance(pull_back(F, s, X)(x, t), X(x, t)), 1e-15);
  }
}

TEST(PullBack, DilationOfTranslation) {
  const auto F = dilation_flow({0.0, 0.0});
  const EuclideanPoint u{1.0, 2.0}, x{0.5, -0.5};
  const auto X = make_translation(u);
  for (double s : {0.3, -0.6}) {
    for (double t : {0.25, -0.1}) {
      const auto got = pull_back(F, s, X)(x, t);
      for (int i = 0; i < 2; ++i) EXPECT_NEAR(got[i], x[i] + t * std::exp(-s) * u[i], 1e-14);
      const auto pushed = push_forward(F, s, X)(x, t);
      for (int i = 0; i < 2; ++i) EXPECT_NEAR(pushed[i], x[i] + t * std::exp(s) * u[i], 1e-14);
    }
  }
}

TEST(PullBack, OwnFlowIsTangentAndExactForDilationAboutZero) {
  const auto F = dilation_flow({0.0, 0.0});
  const auto X = make_dilation({0.0, 0.0});
  const EuclideanPoint x{1.5, 0.5};
  for (double s : {0.2, -0.4}) {
    for (double t : {0.1, -0.3}) EXPECT_LE(R2.distance(pull_back(F, s, X)(x, t), X(x, t)), 1e-14);
  }
  // about u != 0 the pull-back is tangent to X
  const auto G = dilation_flow({1.0, 0.0});
  const auto Y = make_dilation({1.0, 0.0});
  const auto ts = dyadic_grid();
  const auto gaps = curve_gap(
      R2, [&](double t) { return pull_back(G, 0.3, Y)(x, t); }, [&](double t) { return Y(x, t); }, ts);
  const auto r = estimate_order(ts, gaps, OrderFitOptions{2.0});
  EXPECT_TRUE(is_tangent(r.verdict));
}

TEST(PushForward, InvertsPullBack) {
  const auto F = dilation_flow({1.0, 0.0});
  const auto X = rotation_field();
  const auto pts = R2.sample(3, Region<EuclideanPoint>{{0.0, 0.0}, 2.0, 50});
  for (const auto& x : pts) {
    for (double t : {0.3, -0.2}) {
      EXPECT_LE(R2.distance(push_forward(F, 0.4, pull_back(F, 0.4, X))(x, t), X(x, t)), 1e-13);
    }
  }
  const auto T = translation_flow({1.0, 0.0});
  const auto Y = make_translation({0.0, 1.0});
  EXPECT_LE(R2.distance(push_forward(T, 0.7, Y)({0.0, 0.0}, 0.5), Y({0.0, 0.0}, 0.5)), 1e-15);
}

TEST(PullBack, Linearity) {
  const auto F = dilation_flow({0.5, 0.5});
  const auto X = rotation_field(), Y = make_dilation({1.0, 0.0});
  const auto pts = R2.sample(12, Region<EuclideanPoint>{{0.0, 0.0}, 2.0, 100});
  for (const auto& x : pts) {
    const double t = 0.3;
    EXPECT_LE(R2.distance(pull_back(F, 0.2, sum(X, Y))(x, t), sum(pull_back(F, 0.2, X), pull_back(F, 0.2, Y))(x, t)),
              1e-13);
  }
}

TEST(PullBack, SolutionsPullBack) {
  const auto F = dilation_flow({0.0, 0.0});
  const auto X = rotation_field();
  const EuclideanPoint x{0.8, 0.1};
  const double s = 0.3, t = 0.5, tol = 1e-5;
  const SolveOptions opt{16, 1 << 16};
  const auto lhs = solve(R2, pull_back(F, s, X), x, t, tol, opt).endpoint;
  const auto rhs = F(solve(R2, X, F(x, s), t, tol, opt).endpoint, -s);
  EXPECT_LE(R2.distance(lhs, rhs), 4.0 * tol);
}

TEST(LieIdentity, TranslationsAndDilations) {
  const auto Tu = translation_flow({1.0, 0.0}), Tv = translation_flow({0.0, 1.0});
  EXPECT_LE(lie_identity_gap(R2, Tu, Tv, {0.2, 0.3}, 0.25), 1e-12);
  const auto Du = dilation_flow({0.0, 0.0}), Dv = dilation_flow({1.0, 0.0});
  const EuclideanPoint x{1.0, 1.0};
  const double scale = 1.0 + euclid::norm(x);
  for (double t : {0.25, 0.01, -0.25, -0.6}) {
    EXPECT_LE(lie_identity_gap(R2, Du, Dv, x, t), 1e-10 * scale) << t;
    EXPECT_LE(lie_identity_gap(R2, Tu, Dv, x, t), 1e-10 * scale) << t;
  }
}

TEST(LieIdentity, L2AddAndShift) {
  const GridSpec grid;
  const auto X = l2::self_flow(l2::l2_X(l2::gaussian(grid))), Y = l2::self_flow(l2::l2_Y());
  const GridFunction zero = GridFunction::zero(grid);
  EXPECT_LE(lie_identity_gap(l2_space(), X, Y, zero, 0.25), l2::interpolation_floor(grid));
  EXPECT_LE(lie_identity_gap(l2_space(), X, Y, zero, 0.1), l2::interpolation_floor(grid));
  EXPECT_LE(lie_identity_gap(l2_space(), X, Y, zero, -0.1), l2::interpolation_floor(grid));
}

TEST(Flow, ClosedFormGroupLaw) {
  const auto F = dilation_flow({1.0, -2.0});
  const auto pts = R2.sample(21, Region<EuclideanPoint>{{0.0, 0.0}, 3.0, 100});
  for (const auto& x : pts) {
    for (double s : {0.3, -0.7}) {
      for (double t : {0.5, -0.2}) {
        const auto a = F(F(x, s), t), b = F(x, s + t);
        EXPECT_LE(R2.distance(a, b), 1e-12 * (1.0 + euclid::norm(b)));
      }
    }
  }
  EXPECT_EQ(F.exactness(), FlowExactness::ClosedForm);
  EXPECT_TRUE(F.as_arc_field().is_exact_flow());
}

TEST(Flow, EulerFlowApproximates) {
  const auto F = Flow<EuclideanPoint>::euler(make_dilation({0.0}), 1000);
  EXPECT_EQ(F.exactness(), FlowExactness::Euler);
  EXPECT_EQ(F.euler_steps(), 1000);
  EXPECT_NEAR(F(EuclideanPoint{1.0}, 1.0)[0], std::exp(1.0), 2e-3);
  EXPECT_NEAR(F(F(EuclideanPoint{1.0}, 0.5), -0.5)[0], 1.0, 1e-3);
  EXPECT_FALSE(F.as_arc_field().is_exact_flow());
  EXPECT_THROW(Flow<EuclideanPoint>::euler(make_dilation({0.0}), 0), Error);
}

TEST(ExpGrowth, DilationFlowMeetsTheBoundWithEquality) {
  const auto F = dilation_flow({0.0, 0.0});
  const auto pts = R2.sample(17, Region<EuclideanPoint>{{0.0, 0.0}, 2.0, 2000});
  for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
    const double d = R2.distance(pts[i], pts[i + 1]);
    for (double t : {1.0, 0.5, -0.5, -1.0}) {
      const double lhs = R2.distance(F(pts[i], t), F(pts[i + 1], t));
      const double bound = std::exp(std::abs(t)) * d;
      if (t > 0) {
        EXPECT_NEAR(lhs, bound, 1e-9 * bound);
      } else {
        EXPECT_LE(lhs, bound * (1.0 + 1e-9));
      }
    }
  }
}
