#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "arcflow/error.hpp"
#include "arcflow/spaces/grid_function.hpp"

namespace arcflow::l2 {

/// Physicists' Hermite polynomial by H_{n+1} = 2x H_n - 2n H_{n-1}.
inline double hermite_eval(int n, double x) {
  if (n < 0) throw Error(ErrorCode::InvalidArgument, "Hermite degree must be >= 0");
  double prev = 1.0;
  if (n == 0) return prev;
  double cur = 2.0 * x;
  for (int k = 1; k < n; ++k) {
    const double next = 2.0 * x * cur - 2.0 * k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// h^[n](x), the n-th derivative of e^{-x^2}: (-1)^n H_n(x) e^{-x^2}.
inline double gaussian_derivative(int n, double x) {
  const double sign = (n % 2 == 0) ? 1.0 : -1.0;
  return sign * hermite_eval(n, x) * std::exp(-x * x);
}

/// Rectangle-rule value of the integral of H_m H_n e^{-x^2} over the grid.
inline double hermite_orthogonality(int m, int n, const GridSpec& grid = {}) {
  double s = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    s += hermite_eval(m, x) * hermite_eval(n, x) * std::exp(-x * x);
  }
  return s * grid.spacing;
}

/// n! 2^n sqrt(pi)
inline double hermite_norm_squared(int n) {
  return std::tgamma(n + 1.0) * std::ldexp(1.0, n) * std::sqrt(M_PI);
}

struct CoefficientVector {
  std::vector<double> values;
  std::string target;
  std::vector<std::string> provenance;

  int order() const { return static_cast<int>(values.size()) - 1; }
};

inline double coefficient_prefactor(int n) {
  return 1.0 / (std::tgamma(n + 1.0) * std::ldexp(1.0, n) * std::sqrt(2.0 * M_PI));
}

/// c_n for g = indicator of [0, 1]: (-1)^n (H_{n+1}(1) - H_{n+1}(0)) / (2(n+1) n! 2^n sqrt(2 pi)).
inline CoefficientVector coefficients_chi01(int N) {
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "order N must be >= 0");
  CoefficientVector c;
  c.target = "chi01";
  for (int n = 0; n <= N; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    const double diff = hermite_eval(n + 1, 1.0) - hermite_eval(n + 1, 0.0);
    c.values.push_back(sign * coefficient_prefactor(n) * diff / (2.0 * (n + 1)));
    c.provenance.push_back("closed form");
  }
  return c;
}

/**
 * c_n = (1 / (n! 2^n sqrt(2 pi))) * sum over supp g of g h^[n] e^{x^2} dx.
 * The weight is evaluated only where g != 0; a non-finite weight or product
 * there raises WEIGHT_OVERFLOW.
 */
inline CoefficientVector coefficients_general(const GridFunction& g, int N, std::string target = "grid") {
  if (N < 0) throw Error(ErrorCode::InvalidArgument, "order N must be >= 0");
  CoefficientVector c;
  c.target = std::move(target);
  for (int n = 0; n <= N; ++n) {
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g[i] == 0.0) continue;
      const double x = g.x(i);
      const double w = std::exp(x * x);
      const double term = g[i] * gaussian_derivative(n, x) * w;
      if (!std::isfinite(w) || !std::isfinite(term)) {
        throw Error(ErrorCode::WeightOverflow,
                    "e^{x^2} weight overflows at x = " + std::to_string(x) + "; truncate the support of g", i);
      }
      s += term;
    }
    c.values.push_back(coefficient_prefactor(n) * s * g.spacing());
    c.provenance.push_back("quadrature");
  }
  return c;
}

/// Sum of c_n h^[n] sampled on the grid.
inline GridFunction direct_sum_oracle(const CoefficientVector& c, const GridSpec& grid = {}) {
  return GridFunction::sample(grid, [&](double x) {
    double v = 0.0;
    for (std::size_t n = 0; n < c.values.size(); ++n) v += c.values[n] * gaussian_derivative(static_cast<int>(n), x);
    return v;
  });
}

inline GridFunction indicator(double a, double b, const GridSpec& grid = {}) {
  return GridFunction::sample(grid, [&](double x) { return (x >= a && x <= b) ? 1.0 : 0.0; });
}

inline GridFunction gaussian(const GridSpec& grid = {}) {
  return GridFunction::sample(grid, [](double x) { return std::exp(-x * x); });
}

}  // namespace arcflow::l2
