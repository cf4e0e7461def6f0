#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "arcflow/error.hpp"

namespace arcflow {

/// Constants an arc field claims for Conditions E1/E2 and its speed bound.
struct ClaimedConstants {
  double lambda = 0.0;  // E1 growth constant
  double omega = 0.0;   // E2 semigroup-defect constant
  double rho = 0.0;     // local speed bound
};

/// Real-valued function on the space. The Lipschitz bound is metadata only.
template <class P>
struct ScalarField {
  std::function<double(const P&)> eval;
  std::optional<double> lipschitz_bound;
  std::string name;

  double operator()(const P& x) const { return eval(x); }

  static ScalarField constant(double c) {
    return {[c](const P&) { return c; }, 0.0, format_constant(c)};
  }

  static std::string format_constant(double c) {
    std::string s = std::to_string(c);
    while (s.size() > 1 && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
    return s;
  }
};

/// Pointwise product (a*b)(x) = a(x) b(x).
template <class P>
ScalarField<P> operator*(const ScalarField<P>& a, const ScalarField<P>& b) {
  return {[a, b](const P& x) { return a(x) * b(x); }, std::nullopt, "(" + a.name + "*" + b.name + ")"};
}

inline double clamp_time(double t) { return std::clamp(t, -1.0, 1.0); }

/**
 * Arc field X : M x [-1, 1] -> M held as an immutable composition tree.
 *
 * Leaves wrap a user map; interior nodes are sums, scalar multiples and
 * brackets of other fields. Evaluation clamps the time into [-1, 1] and returns
 * x unchanged at t = 0, at every node.
 */
template <class P>
class ArcField {
 public:
  using Map = std::function<P(const P&, double)>;

  enum class Kind { Identity, Leaf, Sum, Scale, Bracket };

  ArcField() = default;

  static ArcField leaf(std::string name, std::string space, Map map, bool is_exact_flow = false,
                       std::optional<ClaimedConstants> claimed = std::nullopt) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Leaf;
    n->name = std::move(name);
    n->space = std::move(space);
    n->map = std::move(map);
    n->exact = is_exact_flow;
    n->claimed = claimed;
    n->cost = 1;
    return ArcField(std::move(n));
  }

  /// The constant arc field 0(x, t) = x.
  static ArcField identity(std::string space) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Identity;
    n->name = "0";
    n->space = std::move(space);
    n->exact = true;
    n->cost = 0;
    return ArcField(std::move(n));
  }

  P operator()(const P& x, double t) const { return eval(*node_, x, clamp_time(t)); }

  bool valid() const { return static_cast<bool>(node_); }
  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const std::string& space() const { return node_->space; }
  bool is_exact_flow() const { return node_->exact; }
  const std::optional<ClaimedConstants>& claimed_constants() const { return node_->claimed; }

  /// Number of leaf-map applications one evaluation performs (upper bound).
  double leaf_cost() const { return node_->cost; }

  ArcField renamed(std::string name) const {
    auto n = std::make_shared<Node>(*node_);
    n->name = std::move(name);
    return ArcField(std::move(n));
  }

  template <class Q>
  friend ArcField<Q> sum(const ArcField<Q>& x, const ArcField<Q>& y);
  template <class Q>
  friend ArcField<Q> scale(const ScalarField<Q>& a, const ArcField<Q>& x);
  template <class Q>
  friend ArcField<Q> bracket(const ArcField<Q>& x, const ArcField<Q>& y);

 private:
  struct Node {
    Kind kind = Kind::Leaf;
    std::string name;
    std::string space;
    Map map;
    ScalarField<P> coeff;
    std::shared_ptr<const Node> lhs, rhs;
    bool exact = false;
    std::optional<ClaimedConstants> claimed;
    double cost = 0;
  };

  explicit ArcField(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  static P eval(const Node& n, const P& x, double t) {
    if (t == 0.0) return x;
    switch (n.kind) {
      case Kind::Identity:
        return x;
      case Kind::Leaf:
        return n.map(x, t);
      case Kind::Sum:
        return eval(*n.rhs, eval(*n.lhs, x, t), t);
      case Kind::Scale: {
        const double a = n.coeff(x);
        if (a == 0.0) return x;
        return eval(*n.lhs, x, clamp_time(a * t));
      }
      case Kind::Bracket: {
        const Node& X = *n.lhs;
        const Node& Y = *n.rhs;
        const double r = std::sqrt(std::abs(t));
        if (t >= 0.0) {
          // Y_{-r} X_{-r} Y_r X_r (x)
          return eval(Y, eval(X, eval(Y, eval(X, x, r), r), -r), -r);
        }
        // X_{-r} Y_{-r} X_r Y_r (x)
        return eval(X, eval(Y, eval(X, eval(Y, x, r), r), -r), -r);
      }
    }
    return x;
  }

  static void require_same_space(const ArcField& x, const ArcField& y) {
    if (!x.valid() || !y.valid()) throw Error(ErrorCode::InvalidArgument, "empty arc field");
    if (x.space() != y.space()) {
      throw Error(ErrorCode::SpaceMismatch, "'" + x.name() + "' lives on " + x.space() + ", '" +
                                                y.name() + "' on " + y.space());
    }
  }

  std::shared_ptr<const Node> node_;
};

/// (X + Y)_t(x) = Y_t(X_t(x)).
template <class P>
ArcField<P> sum(const ArcField<P>& x, const ArcField<P>& y) {
  using AF = ArcField<P>;
  AF::require_same_space(x, y);
  auto n = std::make_shared<typename AF::Node>();
  n->kind = AF::Kind::Sum;
  n->name = "sum(" + x.name() + "," + y.name() + ")";
  n->space = x.space();
  n->lhs = x.node_;
  n->rhs = y.node_;
  n->cost = x.leaf_cost() + y.leaf_cost();
  return AF(std::move(n));
}

/// (aX)_t(x) = X_{clamp(a(x) t)}(x); a(x) = 0 gives the constant arc.
template <class P>
ArcField<P> scale(const ScalarField<P>& a, const ArcField<P>& x) {
  using AF = ArcField<P>;
  if (!x.valid()) throw Error(ErrorCode::InvalidArgument, "empty arc field");
  auto n = std::make_shared<typename AF::Node>();
  n->kind = AF::Kind::Scale;
  n->name = "scale(" + a.name + "," + x.name() + ")";
  n->space = x.space();
  n->coeff = a;
  n->lhs = x.node_;
  n->cost = x.leaf_cost();
  return AF(std::move(n));
}

template <class P>
ArcField<P> scale(double a, const ArcField<P>& x) {
  return scale(ScalarField<P>::constant(a), x);
}

/// Asymptotic bracket with time warp sqrt|t|; see the two branches in eval.
template <class P>
ArcField<P> bracket(const ArcField<P>& x, const ArcField<P>& y) {
  using AF = ArcField<P>;
  AF::require_same_space(x, y);
  auto n = std::make_shared<typename AF::Node>();
  n->kind = AF::Kind::Bracket;
  n->name = "bracket(" + x.name() + "," + y.name() + ")";
  n->space = x.space();
  n->lhs = x.node_;
  n->rhs = y.node_;
  n->cost = 2 * (x.leaf_cost() + y.leaf_cost());
  return AF(std::move(n));
}

/// X - Y := X + (-1) Y.
template <class P>
ArcField<P> difference(const ArcField<P>& x, const ArcField<P>& y) {
  return sum(x, scale(-1.0, y));
}

/// [X, n, Y] := [[...[X, Y], ...], Y] with [X, 0, Y] := X.
template <class P>
ArcField<P> iterated_bracket(const ArcField<P>& x, const ArcField<P>& y, int n) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "bracket depth must be >= 0");
  ArcField<P> out = x;
  for (int k = 0; k < n; ++k) out = bracket(out, y);
  if (n > 0) out = out.renamed("ibracket(" + x.name() + "," + y.name() + "," + std::to_string(n) + ")");
  return out;
}

/// Left-to-right composition: the first term is applied first (innermost).
/// An empty list gives the identity arc field on `space`.
template <class P>
ArcField<P> linear_combination(const std::vector<std::pair<ScalarField<P>, ArcField<P>>>& terms,
                               const std::string& space) {
  if (terms.empty()) return ArcField<P>::identity(space);
  ArcField<P> out = scale(terms.front().first, terms.front().second);
  if (out.space() != space) {
    throw Error(ErrorCode::SpaceMismatch, "term '" + out.name() + "' is not on " + space);
  }
  for (std::size_t i = 1; i < terms.size(); ++i) out = sum(out, scale(terms[i].first, terms[i].second));
  return out;
}

template <class P>
P evaluate(const ArcField<P>& x, const P& p, double t) {
  return x(p, t);
}

}  // namespace arcflow
