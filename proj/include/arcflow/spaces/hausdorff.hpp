#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "arcflow/arc_field.hpp"
#include "arcflow/error.hpp"
#include "arcflow/flow.hpp"
#include "arcflow/metric.hpp"

namespace arcflow {

using Point2 = std::array<double, 2>;

/// Finite nonempty subset of R^2, deduplicated within `kDedupTolerance`.
class CompactSet {
 public:
  static constexpr double kDedupTolerance = 1e-12;

  CompactSet() = default;

  explicit CompactSet(std::vector<Point2> pts) {
    if (pts.empty()) throw Error(ErrorCode::InvalidArgument, "compact set must be nonempty");
    for (const auto& p : pts) {
      if (!std::isfinite(p[0]) || !std::isfinite(p[1])) {
        throw Error(ErrorCode::InvalidArgument, "non-finite point in compact set");
      }
      const bool dup = std::any_of(points_.begin(), points_.end(), [&](const Point2& q) {
        return std::hypot(p[0] - q[0], p[1] - q[1]) <= kDedupTolerance;
      });
      if (!dup) points_.push_back(p);
    }
  }

  const std::vector<Point2>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<Point2> points_;
};

namespace detail {
inline double directed_hausdorff(const CompactSet& a, const CompactSet& b) {
  double worst = 0.0;
  for (const auto& p : a.points()) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& q : b.points()) best = std::min(best, std::hypot(p[0] - q[0], p[1] - q[1]));
    worst = std::max(worst, best);
  }
  return worst;
}
}  // namespace detail

inline double hausdorff_distance(const CompactSet& a, const CompactSet& b) {
  if (a.size() == 0 || b.size() == 0) throw Error(ErrorCode::InvalidArgument, "empty compact set");
  return std::max(detail::directed_hausdorff(a, b), detail::directed_hausdorff(b, a));
}

/// Applies a map of R^2 to every member point.
template <class Map>
CompactSet map_points(const CompactSet& s, Map&& m) {
  std::vector<Point2> out;
  out.reserve(s.size());
  for (const auto& p : s.points()) out.push_back(m(p));
  return CompactSet(std::move(out));
}

inline const std::string kHausdorffSpaceId = "hausdorff";

inline ArcField<CompactSet> set_translation(Point2 u, std::string name = "set_translation") {
  return ArcField<CompactSet>::leaf(
      std::move(name), kHausdorffSpaceId,
      [u](const CompactSet& s, double t) {
        return map_points(s, [&](const Point2& p) { return Point2{p[0] + t * u[0], p[1] + t * u[1]}; });
      },
      true);
}

inline ArcField<CompactSet> set_dilation(Point2 u, std::string name = "set_dilation") {
  return ArcField<CompactSet>::leaf(std::move(name), kHausdorffSpaceId, [u](const CompactSet& s, double t) {
    return map_points(s, [&](const Point2& p) {
      return Point2{(1.0 + t) * (p[0] - u[0]) + u[0], (1.0 + t) * (p[1] - u[1]) + u[1]};
    });
  });
}

inline Flow<CompactSet> set_dilation_flow(Point2 u, std::string name = "set_dilation_flow") {
  auto gen = set_dilation(u, name + "_arc");
  return Flow<CompactSet>::closed_form(
      gen,
      [u](const CompactSet& s, double t) {
        const double e = std::exp(t), em1 = std::expm1(t);
        return map_points(s, [&](const Point2& p) { return Point2{e * p[0] - em1 * u[0], e * p[1] - em1 * u[1]}; });
      },
      std::move(name));
}

/// Hausdorff metric on finite planar sets. Samples have 1 to 6 points, each a
/// member of the center set displaced by at most the region radius.
inline MetricSpace<CompactSet> hausdorff_space() {
  MetricSpace<CompactSet> s;
  s.name = kHausdorffSpaceId;
  s.distance = [](const CompactSet& a, const CompactSet& b) { return hausdorff_distance(a, b); };
  s.sample = [](std::uint64_t seed, const Region<CompactSet>& r) {
    if (r.center.size() == 0) throw Error(ErrorCode::SamplerError, "empty region center");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> count(1, 6);
    std::uniform_int_distribution<std::size_t> pick(0, r.center.size() - 1);
    std::vector<CompactSet> out;
    out.reserve(r.count);
    for (std::size_t k = 0; k < r.count; ++k) {
      const int m = count(rng);
      std::vector<Point2> pts;
      for (int j = 0; j < m; ++j) {
        const Point2& c = r.center.points()[pick(rng)];
        const double ang = 2.0 * M_PI * unit(rng);
        const double rad = r.radius * std::sqrt(unit(rng));
        pts.push_back({c[0] + rad * std::cos(ang), c[1] + rad * std::sin(ang)});
      }
      out.emplace_back(std::move(pts));
    }
    return out;
  };
  s.describe = [](const CompactSet& a) {
    std::ostringstream os;
    os.precision(17);
    os << '{';
    for (std::size_t i = 0; i < a.size(); ++i) {
      os << (i ? "," : "") << '(' << a.points()[i][0] << ',' << a.points()[i][1] << ')';
    }
    os << '}';
    return os.str();
  };
  s.magnitude = [](const CompactSet& a) {
    double m = 0;
    for (const auto& p : a.points()) m = std::max(m, std::hypot(p[0], p[1]));
    return m;
  };
  return s;
}

}  // namespace arcflow
