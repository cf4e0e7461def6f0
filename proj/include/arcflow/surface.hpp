#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "arcflow/arc_field.hpp"
#include "arcflow/error.hpp"
#include "arcflow/flow.hpp"
#include "arcflow/metric.hpp"
#include "arcflow/tangency.hpp"

namespace arcflow {

/// Points F_t G_s(x0) on an (s, t) parameter grid; points[i * t_grid.size() + j] is (s_i, t_j).
template <class P>
struct SampledSurface {
  P x0;
  std::vector<double> s_grid;
  std::vector<double> t_grid;
  std::vector<P> points;
  double resolution = 0.0;  // largest distance between grid neighbours
  Flow<P> f;
  Flow<P> g;

  const P& at(std::size_t i, std::size_t j) const { return points[i * t_grid.size() + j]; }
  P evaluate(double s, double t) const { return f(g(x0, s), t); }
};

namespace detail {
inline void check_parameter_grid(const std::vector<double>& grid, const char* what) {
  if (grid.size() < 2) throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs two or more values");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) throw Error(ErrorCode::InvalidArgument, std::string(what) + " must increase");
  }
  if (std::find(grid.begin(), grid.end(), 0.0) == grid.end()) {
    throw Error(ErrorCode::InvalidArgument, std::string(what) + " must contain 0");
  }
}
}  // namespace detail

/// Evenly spaced grid from -h to h with 2m + 1 values (0 included exactly).
inline std::vector<double> symmetric_grid(double h, int m) {
  std::vector<double> g;
  for (int k = -m; k <= m; ++k) g.push_back(h * k / m);
  return g;
}

/**
 * Samples S = {F_t G_s(x0)}. Two distinct parameter pairs landing within
 * `collision_tol` (default 1e-9 (1 + |x0|)) raise SURFACE_DEGENERATE.
 */
template <class P>
SampledSurface<P> sample_integral_surface(const MetricSpace<P>& space, const Flow<P>& f, const Flow<P>& g,
                                          const P& x0, std::vector<double> s_grid, std::vector<double> t_grid,
                                          double collision_tol = -1.0) {
  detail::check_parameter_grid(s_grid, "s_grid");
  detail::check_parameter_grid(t_grid, "t_grid");
  if (collision_tol < 0.0) collision_tol = 1e-9 * (1.0 + space.magnitude(x0));
  SampledSurface<P> S{x0, std::move(s_grid), std::move(t_grid), {}, 0.0, f, g};
  const std::size_t ns = S.s_grid.size(), nt = S.t_grid.size();
  S.points.reserve(ns * nt);
  for (double s : S.s_grid) {
    const P gs = g(x0, s);
    for (double t : S.t_grid) S.points.push_back(f(gs, t));
  }
  for (std::size_t a = 0; a < S.points.size(); ++a) {
    for (std::size_t b = a + 1; b < S.points.size(); ++b) {
      if (space.distance(S.points[a], S.points[b]) <= collision_tol) {
        throw Error(ErrorCode::SurfaceDegenerate,
                    "parameters (" + std::to_string(S.s_grid[a / nt]) + "," + std::to_string(S.t_grid[a % nt]) +
                        ") and (" + std::to_string(S.s_grid[b / nt]) + "," + std::to_string(S.t_grid[b % nt]) +
                        ") give the same point",
                    b);
      }
    }
  }
  for (std::size_t i = 0; i < ns; ++i) {
    for (std::size_t j = 0; j < nt; ++j) {
      if (i + 1 < ns) S.resolution = std::max(S.resolution, space.distance(S.at(i, j), S.at(i + 1, j)));
      if (j + 1 < nt) S.resolution = std::max(S.resolution, space.distance(S.at(i, j), S.at(i, j + 1)));
    }
  }
  return S;
}

namespace detail {
template <class F>
double golden_minimize(F&& phi, double a, double b, double& arg) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = phi(c), fd = phi(d);
  for (int it = 0; it < 90 && b - a > 1e-15 * (1.0 + std::abs(a) + std::abs(b)); ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = phi(d);
    }
  }
  arg = fc <= fd ? c : d;
  return std::min(fc, fd);
}
}  // namespace detail

/**
 * Distance from p to the surface: nearest sampled point, then coordinate-wise
 * golden-section refinement of (s, t) within two grid cells of it. With
 * `refine = false` this is the plain sampled-set distance.
 */
template <class P>
double distance_to_surface(const MetricSpace<P>& space, const SampledSurface<P>& S, const P& p, bool refine = true) {
  const std::size_t nt = S.t_grid.size();
  double best = std::numeric_limits<double>::infinity();
  std::size_t arg = 0;
  for (std::size_t k = 0; k < S.points.size(); ++k) {
    const double d = space.distance(p, S.points[k]);
    if (d < best) {
      best = d;
      arg = k;
    }
  }
  if (!refine || best == 0.0) return best;
  const std::size_t i = arg / nt, j = arg % nt;
  const double s_lo = S.s_grid[i >= 2 ? i - 2 : 0], s_hi = S.s_grid[std::min(i + 2, S.s_grid.size() - 1)];
  const double t_lo = S.t_grid[j >= 2 ? j - 2 : 0], t_hi = S.t_grid[std::min(j + 2, nt - 1)];
  double s = S.s_grid[i], t = S.t_grid[j];
  double val = best;
  for (int sweep = 0; sweep < 200; ++sweep) {
    const double before = val;
    double arg_s = s, arg_t = t;
    const double vs = detail::golden_minimize(
        [&](double sv) { return space.distance(p, S.evaluate(sv, t)); }, s_lo, s_hi, arg_s);
    if (vs < val) {
      val = vs;
      s = arg_s;
    }
    const double vt = detail::golden_minimize(
        [&](double tv) { return space.distance(p, S.evaluate(s, tv)); }, t_lo, t_hi, arg_t);
    if (vt < val) {
      val = vt;
      t = arg_t;
    }
    if (val == 0.0 || !(val < before * (1.0 - 1e-12))) break;
  }
  return std::min(best, val);
}

/**
 * gap(tau) = max over base points b of dist((combo)_tau(b), S), then the
 * order fit. The default floor is 1e-11 (1 + max |b|).
 */
template <class P>
TangencyReport surface_tangency(const MetricSpace<P>& space, const SampledSurface<P>& S, const ArcField<P>& combo,
                                const std::vector<P>& base_points, const std::vector<double>& t_grid,
                                OrderFitOptions opt = {}) {
  if (base_points.empty()) throw Error(ErrorCode::InvalidArgument, "surface_tangency needs base points");
  double scale = 0.0;
  for (const P& b : base_points) scale = std::max(scale, space.magnitude(b));
  opt.scale = std::max(opt.scale, scale);
  std::vector<double> gaps;
  for (double tau : t_grid) {
    double worst = 0.0;
    for (const P& b : base_points) worst = std::max(worst, distance_to_surface(space, S, combo(b, tau)));
    gaps.push_back(worst);
  }
  return estimate_order(t_grid, gaps, opt);
}

struct InvolutivityPoint {
  std::string base;
  double a = 0.0;
  double b = 0.0;
  TangencyReport report;
};

struct InvolutivityReport {
  bool involutive = false;
  std::vector<InvolutivityPoint> points;
};

inline std::vector<double> coefficient_grid(double bound = 2.0, double step = 0.25) {
  std::vector<double> g;
  const int m = static_cast<int>(std::llround(bound / step));
  for (int k = -m; k <= m; ++k) g.push_back(k * step);
  return g;
}

namespace detail {
inline std::optional<TangencyReport> try_fit(const std::vector<double>& t, const std::vector<double>& gaps,
                                             const OrderFitOptions& o) {
  try {
    return estimate_order(t, gaps, o);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientData) throw;
    return std::nullopt;
  }
}

inline double fit_score(const std::optional<TangencyReport>& r) {
  if (!r) return -std::numeric_limits<double>::infinity();
  if (r->verdict == Verdict::ExactZero) return std::numeric_limits<double>::infinity();
  return r->order_p;
}
}  // namespace detail

/**
 * For each base point, fits [F,G] against aF + bG over constant (a, b) on
 * the coefficient grid (highest fitted order wins, ties by smaller gap at the
 * smallest tau), then golden-refines a and b on that smallest-tau gap. The
 * refinement is kept only when it raises the order without worsening the fit
 * residual. INVOLUTIVE iff every base point reaches TANGENT or better.
 */
template <class P>
InvolutivityReport involutivity_check(const MetricSpace<P>& space, const Flow<P>& f, const Flow<P>& g,
                                      const std::vector<double>& coeff_grid, const std::vector<P>& base_points,
                                      const std::vector<double>& t_grid = dyadic_grid(), OrderFitOptions opt = {}) {
  if (coeff_grid.size() < 2) throw Error(ErrorCode::InvalidArgument, "coefficient grid too small");
  if (t_grid.empty()) throw Error(ErrorCode::InvalidArgument, "empty t grid");
  const ArcField<P> F = f.as_arc_field(), G = g.as_arc_field();
  const ArcField<P> br = bracket(F, G);
  const double tau_min = *std::min_element(t_grid.begin(), t_grid.end());
  const double step = coeff_grid[1] - coeff_grid[0];

  InvolutivityReport rep;
  rep.involutive = true;
  for (const P& x : base_points) {
    OrderFitOptions o = opt;
    o.scale = std::max(opt.scale, space.magnitude(x));
    std::vector<P> bracket_pts;
    for (double tau : t_grid) bracket_pts.push_back(br(x, tau));
    auto candidate = [&](double a, double b) { return sum(scale(a, F), scale(b, G)); };
    auto gaps_for = [&](double a, double b) {
      const ArcField<P> c = candidate(a, b);
      std::vector<double> gaps;
      for (std::size_t k = 0; k < t_grid.size(); ++k) gaps.push_back(space.distance(bracket_pts[k], c(x, t_grid[k])));
      return gaps;
    };
    auto q_at_min = [&](double a, double b) { return space.distance(br(x, tau_min), candidate(a, b)(x, tau_min)); };

    InvolutivityPoint best{space.describe(x), 0.0, 0.0, {}};
    double best_score = -std::numeric_limits<double>::infinity();
    double best_q = std::numeric_limits<double>::infinity();
    bool have = false;
    for (double a : coeff_grid) {
      for (double b : coeff_grid) {
        const auto gaps = gaps_for(a, b);
        const auto r = detail::try_fit(t_grid, gaps, o);
        const double score = detail::fit_score(r);
        const double q = gaps.back();
        if (!have || score > best_score || (score == best_score && q < best_q)) {
          best = {space.describe(x), a, b, r ? *r : TangencyReport{t_grid, gaps}};
          best_score = score;
          best_q = q;
          have = true;
        }
      }
    }
    if (best.report.verdict != Verdict::ExactZero) {
      double a = best.a, b = best.b;
      for (int sweep = 0; sweep < 4; ++sweep) {
        double arg = a;
        detail::golden_minimize([&](double av) { return q_at_min(av, b); }, a - step, a + step, arg);
        a = arg;
        arg = b;
        detail::golden_minimize([&](double bv) { return q_at_min(a, bv); }, b - step, b + step, arg);
        b = arg;
      }
      const auto r = detail::try_fit(t_grid, gaps_for(a, b), o);
      if (r && detail::fit_score(r) > best_score &&
          (r->verdict == Verdict::ExactZero || r->fit_residual <= best.report.fit_residual + 1e-12)) {
        best.a = a;
        best.b = b;
        best.report = *r;
      }
    }
    if (!is_tangent(best.report.verdict)) rep.involutive = false;
    rep.points.push_back(std::move(best));
  }
  return rep;
}

}  // namespace arcflow
