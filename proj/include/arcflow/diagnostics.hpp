#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "arcflow/arc_field.hpp"
#include "arcflow/error.hpp"
#include "arcflow/flow.hpp"
#include "arcflow/metric.hpp"

namespace arcflow {

/**
 * Where and how finely an estimator samples: points in B(center, radius)
 * (the center is always sample 0) and times +-delta 2^-k, k < time_levels.
 */
template <class P>
struct RegionSampler {
  P center;
  double radius = 0.1;
  std::size_t count = 64;
  double delta = 0.5;
  int time_levels = 6;
  std::uint64_t seed = 1;

  void validate() const {
    if (!(radius > 0.0)) throw Error(ErrorCode::InvalidArgument, "sampler radius must be positive");
    if (!(delta > 0.0 && delta <= 1.0)) throw Error(ErrorCode::InvalidArgument, "sampler delta must be in (0, 1]");
    if (count < 1 || time_levels < 1) throw Error(ErrorCode::InvalidArgument, "sampler needs count, levels >= 1");
  }

  /// Twice the points and two more time levels.
  RegionSampler refined() const {
    RegionSampler r = *this;
    r.count *= 2;
    r.time_levels += 2;
    return r;
  }

  std::vector<double> times(bool with_zero = false) const {
    std::vector<double> ts;
    if (with_zero) ts.push_back(0.0);
    for (int k = 0; k < time_levels; ++k) {
      const double v = std::ldexp(delta, -k);
      ts.push_back(v);
      ts.push_back(-v);
    }
    return ts;
  }

  std::vector<P> points(const MetricSpace<P>& space, std::size_t n) const {
    std::vector<P> pts{center};
    if (n > 1) {
      auto more = space.sample(seed, Region<P>{center, radius, n - 1});
      pts.insert(pts.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
    }
    return pts;
  }
};

/// Empirical supremum (or infimum) of a quotient with its maximizing sample.
struct ConstantEstimate {
  std::string estimator;
  double value = 0.0;
  double coarse_value = 0.0;
  std::string witness;
  bool diverging = false;
  std::uint64_t seed = 0;
  std::string grid_spec;
};

/// Relative change that flags an estimate as not refinement-stable.
inline constexpr double kRefinementTolerance = 0.10;

namespace detail {

struct Extremum {
  double value;
  std::string witness;
  bool any = false;
};

inline std::string time_witness(double s, double t) {
  return "s=" + std::to_string(s) + ",t=" + std::to_string(t);
}

template <class P, class Pass>
ConstantEstimate two_level(std::string name, const RegionSampler<P>& sampler, Pass&& pass) {
  sampler.validate();
  const Extremum coarse = pass(sampler);
  const RegionSampler<P> fine_s = sampler.refined();
  const Extremum fine = pass(fine_s);
  ConstantEstimate est;
  est.estimator = std::move(name);
  est.value = fine.value;
  est.coarse_value = coarse.value;
  est.witness = fine.witness;
  est.seed = sampler.seed;
  est.grid_spec = "count=" + std::to_string(sampler.count) + "," + std::to_string(fine_s.count) +
                  ";delta=" + std::to_string(sampler.delta) + ";levels=" + std::to_string(sampler.time_levels) +
                  "," + std::to_string(fine_s.time_levels) + ";radius=" + std::to_string(sampler.radius);
  const double denom = std::max(std::abs(fine.value), std::abs(coarse.value));
  est.diverging = !std::isfinite(fine.value) ||
                  (denom > 1e-9 && std::abs(fine.value - coarse.value) > kRefinementTolerance * denom);
  return est;
}

}  // namespace detail

/// Lambda-hat = sup over pairs and t != 0 of (d(X_t x, X_t y) / d(x, y) - 1) / |t|, clipped at 0.
template <class P>
ConstantEstimate estimate_E1(const MetricSpace<P>& space, const ArcField<P>& field, const RegionSampler<P>& sampler) {
  return detail::two_level("E1", sampler, [&](const RegionSampler<P>& s) {
    const auto pts = s.points(space, 2 * s.count);
    detail::Extremum best{0.0, "", false};
    for (std::size_t i = 0; i + 1 < pts.size(); i += 2) {
      const double dxy = space.distance(pts[i], pts[i + 1]);
      if (dxy == 0.0) continue;
      best.any = true;
      for (double t : s.times()) {
        const double ratio = space.distance(field(pts[i], t), field(pts[i + 1], t)) / dxy;
        const double q = (ratio - 1.0) / std::abs(t);
        if (q > best.value) best = {q, space.describe(pts[i]) + ";" + detail::time_witness(0, t), true};
      }
    }
    if (!best.any) throw Error(ErrorCode::InsufficientData, "all sampled pairs are degenerate");
    return best;
  });
}

/// Omega-hat = sup of d(X_{s+t} x, X_t X_s x) / |st|.
template <class P>
ConstantEstimate estimate_E2(const MetricSpace<P>& space, const ArcField<P>& field, const RegionSampler<P>& sampler) {
  return detail::two_level("E2", sampler, [&](const RegionSampler<P>& s) {
    const auto pts = s.points(space, s.count);
    const auto ts = s.times();
    detail::Extremum best{0.0, "", true};
    for (const P& x : pts) {
      for (double a : ts) {
        const P xa = field(x, a);
        for (double b : ts) {
          const double q = space.distance(field(x, a + b), field(xa, b)) / std::abs(a * b);
          if (q > best.value) best = {q, space.describe(x) + ";" + detail::time_witness(a, b), true};
        }
      }
    }
    return best;
  });
}

/// C-hat = sup of d(Y_s X_t x, X_t Y_s x) / |st|.
template <class P>
ConstantEstimate estimate_closeness(const MetricSpace<P>& space, const ArcField<P>& x_field,
                                    const ArcField<P>& y_field, const RegionSampler<P>& sampler) {
  return detail::two_level("close", sampler, [&](const RegionSampler<P>& s) {
    const auto pts = s.points(space, s.count);
    const auto ts = s.times();
    detail::Extremum best{0.0, "", true};
    for (const P& x : pts) {
      for (double a : ts) {
        const P ys = y_field(x, a);
        for (double b : ts) {
          const double q = space.distance(y_field(x_field(x, b), a), x_field(ys, b)) / std::abs(a * b);
          if (q > best.value) best = {q, space.describe(x) + ";" + detail::time_witness(a, b), true};
        }
      }
    }
    return best;
  });
}

/// Infimum of d(X_s x, Y_t x) / (|s| + |t|) over samples and (s, t) != (0, 0).
template <class P>
double transversality_at(const MetricSpace<P>& space, const ArcField<P>& x_field, const ArcField<P>& y_field,
                         const std::vector<P>& pts, const std::vector<double>& ts, std::string* witness = nullptr) {
  double best = std::numeric_limits<double>::infinity();
  for (const P& x : pts) {
    for (double a : ts) {
      const P xs = x_field(x, a);
      for (double b : ts) {
        if (a == 0.0 && b == 0.0) continue;
        const double q = space.distance(xs, y_field(x, b)) / (std::abs(a) + std::abs(b));
        if (q < best) {
          best = q;
          if (witness) *witness = space.describe(x) + ";" + detail::time_witness(a, b);
        }
      }
    }
  }
  return best;
}

template <class P>
ConstantEstimate estimate_transversality(const MetricSpace<P>& space, const ArcField<P>& x_field,
                                         const ArcField<P>& y_field, const RegionSampler<P>& sampler) {
  ConstantEstimate est = detail::two_level("transverse", sampler, [&](const RegionSampler<P>& s) {
    detail::Extremum e{0.0, "", true};
    e.value = transversality_at(space, x_field, y_field, s.points(space, s.count), s.times(true), &e.witness);
    return e;
  });
  est.diverging = false;
  return est;
}

/// X and Y are reported transverse when the infimum clears this floor.
inline bool is_transverse(const ConstantEstimate& e, double floor = 1e-9) { return e.value > floor; }

struct SpeedGrowthReport {
  std::vector<double> radii;
  std::vector<double> rho;
  double c1 = 0.0;  // slope
  double c2 = 0.0;  // intercept
};

/// rho-hat(x, r) = sup over y in B(x, r), s != t of d(X_s y, X_t y) / |s - t|, then a least-squares line.
template <class P>
SpeedGrowthReport estimate_speed_growth(const MetricSpace<P>& space, const ArcField<P>& field, const P& base,
                                        const std::vector<double>& radii, std::size_t count = 128,
                                        std::uint64_t seed = 1, int time_levels = 5) {
  if (radii.size() < 2) throw Error(ErrorCode::InsufficientData, "need at least two radii");
  std::vector<double> ts{0.0};
  for (int k = 0; k < time_levels; ++k) {
    ts.push_back(std::ldexp(1.0, -k));
    ts.push_back(-std::ldexp(1.0, -k));
  }
  SpeedGrowthReport rep;
  rep.radii = radii;
  for (double r : radii) {
    RegionSampler<P> s{base, r, count, 1.0, time_levels, seed};
    const auto pts = s.points(space, count);
    double sup = 0.0;
    for (const P& y : pts) {
      std::vector<P> arc;
      arc.reserve(ts.size());
      for (double t : ts) arc.push_back(field(y, t));
      for (std::size_t i = 0; i < ts.size(); ++i) {
        for (std::size_t j = i + 1; j < ts.size(); ++j) {
          sup = std::max(sup, space.distance(arc[i], arc[j]) / std::abs(ts[i] - ts[j]));
        }
      }
    }
    rep.rho.push_back(sup);
  }
  const double n = static_cast<double>(radii.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    mx += radii[i];
    my += rep.rho[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    sxx += (radii[i] - mx) * (radii[i] - mx);
    sxy += (radii[i] - mx) * (rep.rho[i] - my);
  }
  rep.c1 = sxx > 0 ? sxy / sxx : 0.0;
  rep.c2 = my - rep.c1 * mx;
  return rep;
}

/// d(F_t G_s x, G_s F_t x) at one sample.
template <class P>
double commutation_gap_at(const MetricSpace<P>& space, const Flow<P>& f, const Flow<P>& g, const P& x, double s,
                          double t) {
  return space.distance(f(g(x, s), t), g(f(x, t), s));
}

template <class P>
ConstantEstimate commutation_gap(const MetricSpace<P>& space, const Flow<P>& f, const Flow<P>& g,
                                 const RegionSampler<P>& sampler) {
  ConstantEstimate est = detail::two_level("commute", sampler, [&](const RegionSampler<P>& s) {
    const auto pts = s.points(space, s.count);
    const auto ts = s.times();
    detail::Extremum best{0.0, "", true};
    for (const P& x : pts) {
      for (double a : ts) {
        for (double b : ts) {
          const double q = commutation_gap_at(space, f, g, x, a, b);
          if (q > best.value) best = {q, space.describe(x) + ";" + detail::time_witness(a, b), true};
        }
      }
    }
    return best;
  });
  // A vanishing supremum is stable whatever the relative change says.
  if (est.value <= 1e-12 && est.coarse_value <= 1e-12) est.diverging = false;
  return est;
}

struct NagumoReport {
  bool ratio_mode = true;   // false: x lies in S and drift is reported
  double base_distance = 0.0;
  double max_ratio = 0.0;   // max d(sigma(t), S) / (e^{Lambda|t|} d(x, S))
  double max_drift = 0.0;   // max d(sigma(t), S)
  std::vector<double> t_grid;
  std::vector<double> distances;
};

/**
 * Follows the solution through x with solve() and compares its distance to
 * the sampled set S against the exponential bound e^{Lambda|t|} d(x, S).
 * When d(x, S) is at or below `in_set_floor`, reports the absolute drift.
 */
template <class P>
NagumoReport nagumo_check(const MetricSpace<P>& space, const ArcField<P>& field, double lambda,
                          const SampledSet<P>& set, const P& x, const std::vector<double>& t_grid, double tol,
                          const SolveOptions& opt = {}, double in_set_floor = 1e-12) {
  NagumoReport rep;
  rep.base_distance = distance_to_set(space, x, set);
  rep.ratio_mode = rep.base_distance > in_set_floor;
  rep.t_grid = t_grid;
  for (double t : t_grid) {
    const P end = t == 0.0 ? x : solve(space, field, x, t, tol, opt).endpoint;
    const double d = distance_to_set(space, end, set);
    rep.distances.push_back(d);
    rep.max_drift = std::max(rep.max_drift, d);
    if (rep.ratio_mode) {
      rep.max_ratio = std::max(rep.max_ratio, d / (std::exp(lambda * std::abs(t)) * rep.base_distance));
    }
  }
  return rep;
}

}  // namespace arcflow
