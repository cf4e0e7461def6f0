#pragma once

#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "arcflow/error.hpp"

namespace arcflow {

enum class Verdict { NotTangent, Tangent, SecondOrder, ExactZero };

inline std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::NotTangent: return "NOT_TANGENT";
    case Verdict::Tangent: return "TANGENT";
    case Verdict::SecondOrder: return "SECOND_ORDER";
    case Verdict::ExactZero: return "EXACT_ZERO";
  }
  return "UNKNOWN";
}

/// True for every verdict that certifies gap = o(t) on the fitted grid.
inline bool is_tangent(Verdict v) { return v != Verdict::NotTangent; }

/// Fitted asymptotics of a gap function t -> d(A(t), B(t)).
struct TangencyReport {
  std::vector<double> t_grid;
  std::vector<double> gaps;
  double order_p = 0.0;
  double constant_C = 0.0;
  double fit_residual = 0.0;
  double floor = 0.0;
  Verdict verdict = Verdict::NotTangent;
};

struct OrderFitOptions {
  /// Absolute zero floor is 1e-11 * (1 + scale) unless `floor` is set.
  double scale = 1.0;
  double floor = -1.0;
  double tangent_above = 1.15;
  double second_order_above = 1.85;
};

/// {2^-k : k = k_first..k_last}, descending.
inline std::vector<double> dyadic_grid(int k_first = 4, int k_last = 12) {
  std::vector<double> g;
  for (int k = k_first; k <= k_last; ++k) g.push_back(std::ldexp(1.0, -k));
  return g;
}

/**
 * Least-squares fit of log gap = log C + p log t over the entries whose gap
 * exceeds the zero floor.
 *
 * All gaps at or below the floor give EXACT_ZERO. Otherwise at least four usable
 * points spanning two decades of t are required.
 */
inline TangencyReport estimate_order(std::span<const double> t_grid, std::span<const double> gaps,
                                     const OrderFitOptions& opt = {}) {
  if (t_grid.size() != gaps.size()) {
    throw Error(ErrorCode::InvalidArgument, "t_grid and gaps differ in length");
  }
  TangencyReport rep;
  rep.t_grid.assign(t_grid.begin(), t_grid.end());
  rep.gaps.assign(gaps.begin(), gaps.end());
  rep.floor = opt.floor >= 0.0 ? opt.floor : 1e-11 * (1.0 + opt.scale);

  for (double g : gaps) {
    if (!(g >= 0.0)) throw Error(ErrorCode::InvalidArgument, "gaps must be nonnegative");
  }
  for (double t : t_grid) {
    if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_grid must be positive");
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    if (gaps[i] > rep.floor) {
      lx.push_back(std::log(t_grid[i]));
      ly.push_back(std::log(gaps[i]));
    }
  }
  if (lx.empty() && !gaps.empty()) {
    rep.verdict = Verdict::ExactZero;
    return rep;
  }
  if (lx.size() < 4) {
    throw Error(ErrorCode::InsufficientData, "fewer than 4 gaps above the zero floor");
  }
  double lo = lx[0], hi = lx[0];
  for (double v : lx) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (hi - lo < 2.0 * std::log(10.0) - 1e-12) {
    throw Error(ErrorCode::InsufficientData, "usable t values span less than two decades");
  }

  const double n = static_cast<double>(lx.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  rep.order_p = sxy / sxx;
  const double intercept = my - rep.order_p * mx;
  rep.constant_C = std::exp(intercept);
  double ss = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double r = ly[i] - (intercept + rep.order_p * lx[i]);
    ss += r * r;
  }
  rep.fit_residual = std::sqrt(ss / n);

  if (rep.order_p > opt.second_order_above) {
    rep.verdict = Verdict::SecondOrder;
  } else if (rep.order_p > opt.tangent_above) {
    rep.verdict = Verdict::Tangent;
  } else {
    rep.verdict = Verdict::NotTangent;
  }
  return rep;
}

}  // namespace arcflow
