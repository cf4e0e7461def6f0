#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arcflow/arc_field.hpp"
#include "arcflow/error.hpp"
#include "arcflow/metric.hpp"

namespace arcflow {

/// n-fold self-composition X_{t/n}^{(n)}(x). On escape, the error index is
/// the number of completed steps.
template <class P>
P euler_curve(const ArcField<P>& field, const P& x, double t, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "euler_curve needs n >= 1");
  const double h = t / n;
  P p = x;
  for (int k = 0; k < n; ++k) {
    try {
      p = field(p, h);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PointEscaped) throw;
      throw Error(ErrorCode::PointEscaped,
                  std::string(e.what()) + " (after " + std::to_string(k) + " Euler steps)",
                  static_cast<std::size_t>(k));
    }
  }
  return p;
}

enum class FlowExactness { ClosedForm, Euler };

/**
 * Local flow F generated by an arc field.
 *
 * A closed-form flow evaluates its exact map for any s; an Euler flow
 * approximates F_s(x) by euler_curve with a fixed step count. F_s^{-1} = F_{-s}.
 */
template <class P>
class Flow {
 public:
  using Map = std::function<P(const P&, double)>;

  Flow() = default;

  static Flow closed_form(ArcField<P> generator, Map exact, std::string name = {}) {
    Flow f;
    f.name_ = name.empty() ? "flow(" + generator.name() + ")" : std::move(name);
    f.generator_ = std::move(generator);
    f.exact_ = std::move(exact);
    f.kind_ = FlowExactness::ClosedForm;
    return f;
  }

  static Flow euler(ArcField<P> generator, int steps) {
    if (steps < 1) throw Error(ErrorCode::InvalidArgument, "Euler flow needs steps >= 1");
    Flow f;
    f.name_ = "euler" + std::to_string(steps) + "(" + generator.name() + ")";
    f.generator_ = std::move(generator);
    f.kind_ = FlowExactness::Euler;
    f.steps_ = steps;
    return f;
  }

  P operator()(const P& x, double s) const {
    if (s == 0.0) return x;
    if (kind_ == FlowExactness::ClosedForm) return exact_(x, s);
    return euler_curve(generator_, x, s, steps_);
  }

  /// The flow viewed as an arc field (time clamped to [-1, 1]).
  ArcField<P> as_arc_field() const {
    Flow self = *this;
    return ArcField<P>::leaf(name_, generator_.space(),
                             [self](const P& x, double t) { return self(x, t); },
                             kind_ == FlowExactness::ClosedForm, generator_.claimed_constants());
  }

  const ArcField<P>& generator() const { return generator_; }
  FlowExactness exactness() const { return kind_; }
  int euler_steps() const { return steps_; }
  const std::string& name() const { return name_; }

 private:
  std::string name_;
  ArcField<P> generator_;
  Map exact_;
  FlowExactness kind_ = FlowExactness::ClosedForm;
  int steps_ = 0;
};

template <class P>
struct SolveResult {
  P endpoint;
  int steps_used = 0;
  double error_estimate = 0.0;
  bool escaped = false;
  std::optional<double> escape_time;
  /// (n, Richardson estimate) for every level after the first.
  std::vector<std::pair<int, double>> trace;
};

struct SolveOptions {
  int n_start = 16;
  int n_max = 4096;
};

/**
 * Doubles the Euler step count from `n_start` until the distance between the
 * n- and n/2-step endpoints is at most `tol`. The endpoint is the finest level.
 *
 * Throws NO_CONVERGENCE once n would exceed n_max. An escaping Euler curve
 * returns escaped = true with the last point reached and the midpoint of the
 * failing step as escape_time.
 */
template <class P>
SolveResult<P> solve(const MetricSpace<P>& space, const ArcField<P>& field, const P& x, double t,
                     double tol, const SolveOptions& opt = {}) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (opt.n_start < 1) throw Error(ErrorCode::InvalidArgument, "n_start must be >= 1");

  SolveResult<P> res;
  auto run = [&](int n) -> std::optional<P> {
    const double h = t / n;
    P p = x;
    for (int k = 0; k < n; ++k) {
      try {
        p = field(p, h);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::PointEscaped) throw;
        res.endpoint = p;
        res.steps_used = n;
        res.escaped = true;
        res.escape_time = (k + 0.5) * std::abs(t) / n;
        return std::nullopt;
      }
    }
    return p;
  };

  int n = opt.n_start;
  auto coarse = run(n);
  if (!coarse) return res;
  double estimate = 0.0;
  while (true) {
    if (2L * n > opt.n_max) {
      throw Error(ErrorCode::NoConvergence,
                  "Richardson estimate " + std::to_string(estimate) + " > tol " + std::to_string(tol) +
                      " at n = " + std::to_string(n),
                  static_cast<std::size_t>(n));
    }
    n *= 2;
    auto fine = run(n);
    if (!fine) return res;
    estimate = space.distance(*coarse, *fine);
    res.trace.emplace_back(n, estimate);
    if (estimate <= tol) {
      res.endpoint = std::move(*fine);
      res.steps_used = n;
      res.error_estimate = estimate;
      return res;
    }
    coarse = std::move(fine);
  }
}

/// (F_s)^* X : x, t -> F_{-s}(X_t(F_s(x))).
template <class P>
ArcField<P> pull_back(const Flow<P>& flow, double s, const ArcField<P>& field) {
  return ArcField<P>::leaf(
      "pull_back(" + flow.name() + "," + ScalarField<P>::format_constant(s) + "," + field.name() + ")",
      field.space(), [flow, s, field](const P& x, double t) { return flow(field(flow(x, s), t), -s); });
}

/// (F_s)_* X : x, t -> F_s(X_t(F_{-s}(x))).
template <class P>
ArcField<P> push_forward(const Flow<P>& flow, double s, const ArcField<P>& field) {
  return ArcField<P>::leaf(
      "push_forward(" + flow.name() + "," + ScalarField<P>::format_constant(s) + "," + field.name() +
          ")",
      field.space(), [flow, s, field](const P& x, double t) { return flow(field(flow(x, -s), t), s); });
}

/**
 * Distance between F_t^* G_t(x) and its bracket form: (t[F,G] + G)_t(x) for
 * t >= 0, and (-t[-F,-G] - G)_{-t}(x) for t < 0. Both sides are the same
 * composition of flow maps, so for exact flows the gap is rounding noise.
 */
template <class P>
double lie_identity_gap(const MetricSpace<P>& space, const Flow<P>& f, const Flow<P>& g, const P& x,
                        double t) {
  const ArcField<P> F = f.as_arc_field();
  const ArcField<P> G = g.as_arc_field();
  const P lhs = pull_back(f, t, G)(x, t);
  P rhs;
  if (t >= 0.0) {
    rhs = sum(scale(t, bracket(F, G)), G)(x, t);
  } else {
    const ArcField<P> negG = scale(-1.0, G);
    rhs = sum(scale(-t, bracket(scale(-1.0, F), negG)), negG)(x, -t);
  }
  return space.distance(lhs, rhs);
}

}  // namespace arcflow
