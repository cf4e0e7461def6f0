#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arcflow/arc_field.hpp"
#include "arcflow/error.hpp"
#include "arcflow/flow.hpp"
#include "arcflow/metric.hpp"

namespace arcflow {

/// Point of R^n (or any finite-dimensional Banach space with the 2-norm).
using EuclideanPoint = std::vector<double>;

namespace euclid {

inline void require_dim(const EuclideanPoint& a, const EuclideanPoint& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::InvalidArgument, "dimension mismatch " + std::to_string(a.size()) + " vs " +
                                                std::to_string(b.size()));
  }
}

inline double norm(const EuclideanPoint& a) {
  double s = 0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

inline double distance(const EuclideanPoint& a, const EuclideanPoint& b) {
  require_dim(a, b);
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

/// a*x + y
inline EuclideanPoint axpy(double a, const EuclideanPoint& x, const EuclideanPoint& y) {
  require_dim(x, y);
  EuclideanPoint out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = a * x[i] + y[i];
  return out;
}

inline std::string describe(const EuclideanPoint& p) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? "," : "") << p[i];
  os << ']';
  return os.str();
}

/// Uniform samples from the closed ball about `center`.
inline std::vector<EuclideanPoint> sample_ball(std::uint64_t seed, const Region<EuclideanPoint>& region) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t dim = region.center.size();
  if (dim == 0) throw Error(ErrorCode::SamplerError, "zero-dimensional region center");
  std::vector<EuclideanPoint> out;
  out.reserve(region.count);
  for (std::size_t k = 0; k < region.count; ++k) {
    EuclideanPoint dir(dim);
    double n = 0;
    do {
      for (double& v : dir) v = gauss(rng);
      n = norm(dir);
    } while (n == 0.0);
    const double rad = region.radius * std::pow(unit(rng), 1.0 / static_cast<double>(dim));
    EuclideanPoint p = region.center;
    for (std::size_t i = 0; i < dim; ++i) p[i] += rad * dir[i] / n;
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace euclid

/// R^n with the Euclidean metric; the space id is "r<n>".
inline MetricSpace<EuclideanPoint> euclidean_space(std::size_t dim) {
  MetricSpace<EuclideanPoint> s;
  s.name = "r" + std::to_string(dim);
  s.distance = [](const EuclideanPoint& a, const EuclideanPoint& b) { return euclid::distance(a, b); };
  s.sample = [dim](std::uint64_t seed, const Region<EuclideanPoint>& r) {
    if (r.center.size() != dim) throw Error(ErrorCode::SamplerError, "region center has wrong dimension");
    return euclid::sample_ball(seed, r);
  };
  s.describe = [](const EuclideanPoint& p) { return euclid::describe(p); };
  s.magnitude = [](const EuclideanPoint& p) { return euclid::norm(p); };
  return s;
}

inline std::string euclidean_space_id(std::size_t dim) { return "r" + std::to_string(dim); }

/// X_t(x) = x + t u; it is its own flow.
inline ArcField<EuclideanPoint> make_translation(const EuclideanPoint& u, std::string name = "translation") {
  return ArcField<EuclideanPoint>::leaf(
      std::move(name), euclidean_space_id(u.size()),
      [u](const EuclideanPoint& x, double t) { return euclid::axpy(t, u, x); }, true,
      ClaimedConstants{0.0, 0.0, euclid::norm(u)});
}

inline Flow<EuclideanPoint> translation_flow(const EuclideanPoint& u, std::string name = "translation") {
  auto gen = make_translation(u, name);
  return Flow<EuclideanPoint>::closed_form(
      gen, [u](const EuclideanPoint& x, double t) { return euclid::axpy(t, u, x); }, std::move(name));
}

/// X_t(x) = (1 + t)(x - u) + u.
inline ArcField<EuclideanPoint> make_dilation(const EuclideanPoint& u, std::string name = "dilation") {
  return ArcField<EuclideanPoint>::leaf(
      std::move(name), euclidean_space_id(u.size()),
      [u](const EuclideanPoint& x, double t) {
        EuclideanPoint out(x.size());
        euclid::require_dim(x, u);
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = (1.0 + t) * (x[i] - u[i]) + u[i];
        return out;
      },
      false, ClaimedConstants{1.0, 0.0, 0.0});
}

/// Exact flow of the dilation about u: F_t(x) = e^t x - (e^t - 1) u.
inline Flow<EuclideanPoint> dilation_flow(const EuclideanPoint& u, std::string name = "dilation_flow") {
  auto gen = make_dilation(u, name + "_arc");
  return Flow<EuclideanPoint>::closed_form(
      gen,
      [u](const EuclideanPoint& x, double t) {
        euclid::require_dim(x, u);
        const double e = std::exp(t);
        const double em1 = std::expm1(t);
        EuclideanPoint out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) out[i] = e * x[i] - em1 * u[i];
        return out;
      },
      std::move(name));
}

/// Banach-space arc field X(x, t) = x + t f(x).
inline ArcField<EuclideanPoint> vector_field_arc(
    std::function<EuclideanPoint(const EuclideanPoint&)> f, std::size_t dim, std::string name = "vector_field") {
  return ArcField<EuclideanPoint>::leaf(std::move(name), euclidean_space_id(dim),
                                        [f = std::move(f)](const EuclideanPoint& x, double t) {
                                          return euclid::axpy(t, f(x), x);
                                        });
}

/// X(x, t) = x + t J x with J the quarter turn of R^2.
inline ArcField<EuclideanPoint> rotation_field() {
  return vector_field_arc([](const EuclideanPoint& x) { return EuclideanPoint{-x[1], x[0]}; }, 2, "rotation");
}

/// Y(x, t) = x + t (e2 + x1 e3) on R^3. x1 is invariant under Y, so Y is its own flow.
inline ArcField<EuclideanPoint> heisenberg_field() {
  return ArcField<EuclideanPoint>::leaf(
      "heisenberg", euclidean_space_id(3),
      [](const EuclideanPoint& x, double t) { return EuclideanPoint{x[0], x[1] + t, x[2] + t * x[0]}; }, true);
}

inline Flow<EuclideanPoint> heisenberg_flow() {
  return Flow<EuclideanPoint>::closed_form(
      heisenberg_field(),
      [](const EuclideanPoint& x, double t) { return EuclideanPoint{x[0], x[1] + t, x[2] + t * x[0]}; },
      "heisenberg");
}

}  // namespace arcflow
