#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "arcflow/arc_field.hpp"
#include "arcflow/error.hpp"
#include "arcflow/flow.hpp"
#include "arcflow/l2/hermite.hpp"
#include "arcflow/spaces/grid_function.hpp"
#include "arcflow/tangency.hpp"

namespace arcflow::l2 {

inline const std::string kSpaceId = "l2";

using L2Field = ArcField<GridFunction>;

/// X_t(f) = f + t h
inline L2Field l2_X(const GridFunction& h, std::string name = "X") {
  return L2Field::leaf(std::move(name), kSpaceId,
                       [h](const GridFunction& f, double t) { return grid_axpy(t, h, f); }, true);
}

/// Y_t(f)(x) = f(x + t)
inline L2Field l2_Y(std::string name = "Y") {
  return L2Field::leaf(std::move(name), kSpaceId, [](const GridFunction& f, double t) { return grid_shift(f, t); },
                       true);
}

/// V_t(f) = e^t f
inline L2Field l2_V(std::string name = "V") {
  return L2Field::leaf(std::move(name), kSpaceId,
                       [](const GridFunction& f, double t) { return grid_scale(std::exp(t), f); }, true);
}

/// W_t(f)(x) = f(e^t x)
inline L2Field l2_W(std::string name = "W") {
  return L2Field::leaf(std::move(name), kSpaceId,
                       [](const GridFunction& f, double t) { return grid_dilate_arg(f, t); }, true);
}

/// An arc field that is its own flow, wrapped as a closed-form Flow.
inline Flow<GridFunction> self_flow(const L2Field& field) {
  if (!field.is_exact_flow()) throw Error(ErrorCode::InvalidArgument, field.name() + " is not its own flow");
  return Flow<GridFunction>::closed_form(field, [field](const GridFunction& f, double t) { return field(f, t); },
                                         field.name());
}

/// Max of |h''| for the Gaussian is 2, at x = 0.
inline double interpolation_floor(const GridSpec& grid = {}, double max_second_derivative = 2.0) {
  return grid.spacing * grid.spacing * max_second_derivative / 8.0 * std::sqrt(2.0 * grid.half_width);
}

/// Sum over n of c_n [X, n, Y], n = 0 innermost.
inline L2Field build_control_field(const L2Field& x, const L2Field& y, const CoefficientVector& c) {
  std::vector<std::pair<ScalarField<GridFunction>, L2Field>> terms;
  for (std::size_t n = 0; n < c.values.size(); ++n) {
    terms.emplace_back(ScalarField<GridFunction>::constant(c.values[n]),
                       iterated_bracket(x, y, static_cast<int>(n)));
  }
  return linear_combination(terms, kSpaceId);
}

/// Maximum order reach accepts.
inline constexpr int kMaxReachOrder = 10;

struct ReachabilitySpec {
  GridFunction target;
  std::string target_name = "chi01";
  int order = 3;
  int steps = 256;
  /// Closed-form coefficients for the indicator target; quadrature otherwise.
  bool closed_form = true;
};

struct ReachResult {
  GridFunction output;
  GridFunction oracle;
  CoefficientVector coefficients;
  double gap_oracle = 0.0;
  double gap_target = 0.0;
  double oracle_target_gap = 0.0;
  std::vector<int> n_values;
  std::vector<double> trace_gap_oracle;
  std::vector<double> trace_gap_target;
  std::vector<double> cost_evals;
};

/// Euler step counts 16, 32, ... up to n (n itself appended when off the sequence).
inline std::vector<int> reach_schedule(int n) {
  std::vector<int> out;
  for (int k = 16; k <= n; k *= 2) out.push_back(k);
  if (out.empty() || out.back() != n) out.push_back(n);
  return out;
}

/**
 * Euler curve of the control field at t = 1 from the zero function, for each
 * step count of reach_schedule(steps). The result holds the finest run.
 */
inline ReachResult reach(const ReachabilitySpec& spec) {
  if (spec.order < 0 || spec.order > kMaxReachOrder) {
    throw Error(ErrorCode::InvalidArgument, "order N must be in [0, " + std::to_string(kMaxReachOrder) + "]");
  }
  if (spec.steps < 1) throw Error(ErrorCode::InvalidArgument, "steps must be >= 1");
  const GridSpec grid = spec.target.grid();
  ReachResult res;
  res.coefficients = spec.closed_form ? coefficients_chi01(spec.order)
                                      : coefficients_general(spec.target, spec.order, spec.target_name);
  res.oracle = direct_sum_oracle(res.coefficients, grid);
  res.oracle_target_gap = grid_distance(res.oracle, spec.target);
  const L2Field field = build_control_field(l2_X(gaussian(grid)), l2_Y(), res.coefficients);
  const GridFunction zero = GridFunction::zero(grid);
  for (int n : reach_schedule(spec.steps)) {
    GridFunction out = euler_curve(field, zero, 1.0, n);
    res.n_values.push_back(n);
    res.trace_gap_oracle.push_back(grid_distance(out, res.oracle));
    res.trace_gap_target.push_back(grid_distance(out, spec.target));
    res.cost_evals.push_back(field.leaf_cost() * n);
    res.output = std::move(out);
  }
  res.gap_oracle = res.trace_gap_oracle.back();
  res.gap_target = res.trace_gap_target.back();
  return res;
}

/// ||g - sum_{n<=N} c_n h^[n]|| for the indicator of [0, 1].
inline double chi01_target_error(int N, const GridSpec& grid = {}) {
  return grid_distance(indicator(0.0, 1.0, grid), direct_sum_oracle(coefficients_chi01(N), grid));
}

struct BracketRelation {
  std::string name;
  std::string candidate;
  std::string base;
  TangencyReport report;
  Verdict expected = Verdict::Tangent;
  bool pass = false;
};

/// tau = 4^-k, k = 2..6, so sqrt(tau) is a whole number of default grid steps.
inline std::vector<double> grid_exact_taus() {
  std::vector<double> g;
  for (int k = 2; k <= 6; ++k) g.push_back(std::ldexp(1.0, -2 * k));
  return g;
}

namespace detail {
inline TangencyReport fit_relation(const L2Field& br, const L2Field& cand, const GridFunction& base,
                                   const std::vector<double>& taus, const OrderFitOptions& opt) {
  std::vector<double> gaps;
  for (double t : taus) gaps.push_back(grid_distance(br(base, t), cand(base, t)));
  return estimate_order(taus, gaps, opt);
}
}  // namespace detail

/**
 * The six bracket relations among X (add t h), Y (shift), V (scale e^t) and
 * W (dilate by e^t), each fitted against its candidate arc at one base point.
 */
inline std::vector<BracketRelation> bracket_table_check(const GridSpec& grid = {}) {
  const GridFunction h = gaussian(grid);
  const GridFunction zero = GridFunction::zero(grid);
  const GridFunction xh1 = GridFunction::sample(grid, [](double x) { return -2.0 * x * x * std::exp(-x * x); });
  const GridFunction h1 = GridFunction::sample(grid, [](double x) { return gaussian_derivative(1, x); });
  const L2Field X = l2_X(h), Y = l2_Y(), V = l2_V(), W = l2_W();
  const L2Field id = L2Field::identity(kSpaceId);
  const L2Field add_xh1 = l2_X(xh1, "f+t*x*h'");
  const L2Field Z = l2_X(h1, "Z");
  const L2Field back_shift = scale(-1.0, Y).renamed("f(.-t)");

  OrderFitOptions plain;
  plain.scale = grid_norm(h);
  OrderFitOptions interp = plain;
  interp.floor = interpolation_floor(grid);

  auto make = [](std::string name, std::string cand, std::string base, TangencyReport r, Verdict expected) {
    BracketRelation rel{std::move(name), std::move(cand), std::move(base), std::move(r), expected, false};
    rel.pass = expected == Verdict::ExactZero ? rel.report.verdict == Verdict::ExactZero
                                              : is_tangent(rel.report.verdict);
    return rel;
  };

  std::vector<BracketRelation> out;
  const auto dy = dyadic_grid();
  out.push_back(make("[X,V]", "f+t*h", "0", detail::fit_relation(bracket(X, V), X, zero, dy, plain),
                     Verdict::Tangent));
  out.push_back(make("[X,W]", add_xh1.name(), "0", detail::fit_relation(bracket(X, W), add_xh1, zero, dy, plain),
                     Verdict::Tangent));
  out.push_back(make("[Y,V]", "0", "h", detail::fit_relation(bracket(Y, V), id, h, grid_exact_taus(), plain),
                     Verdict::ExactZero));
  out.push_back(make("[Y,W]", back_shift.name(), "h", detail::fit_relation(bracket(Y, W), back_shift, h, dy, plain),
                     Verdict::Tangent));
  out.push_back(make("[V,W]", "0", "h", detail::fit_relation(bracket(V, W), id, h, grid_exact_taus(), interp),
                     Verdict::ExactZero));
  out.push_back(make("[X,Y]", "f+t*h'", "0", detail::fit_relation(bracket(X, Y), Z, zero, dy, plain),
                     Verdict::Tangent));
  return out;
}

}  // namespace arcflow::l2
