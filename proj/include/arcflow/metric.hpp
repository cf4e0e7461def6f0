#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "arcflow/error.hpp"

namespace arcflow {

/// A ball in which a space draws random points.
template <class P>
struct Region {
  P center;
  double radius = 1.0;
  std::size_t count = 1;
};

/**
 * Type-erased metric space over the point type P.
 *
 * `distance` must be a metric; `sample` draws `region.count` points from the
 * ball about `region.center` and must be a pure function of its seed.
 * `describe` renders a point for reports and witnesses.
 */
template <class P>
struct MetricSpace {
  std::string name;
  std::function<double(const P&, const P&)> distance;
  std::function<std::vector<P>(std::uint64_t seed, const Region<P>& region)> sample;
  std::function<std::string(const P&)> describe;
  /// Characteristic magnitude of the space's points, used for float floors.
  std::function<double(const P&)> magnitude;

  double operator()(const P& a, const P& b) const { return distance(a, b); }
};

struct AxiomReport {
  bool pass = false;
  std::size_t triples = 0;
  double worst_triangle = 0.0;  // max d(x,y) - d(x,z) - d(z,y), relative to the local scale
  double worst_symmetry = 0.0;  // max |d(x,y) - d(y,x)|
  double worst_identity = 0.0;  // max d(x,x)
  double slack = 0.0;
};

/// Samples `n_triples` triples from `region` and checks the metric axioms.
/// The triangle violation is normalized by 1 + max side length of the triple.
template <class P>
AxiomReport verify_metric_axioms(const MetricSpace<P>& space, const Region<P>& region,
                                 std::size_t n_triples, std::uint64_t seed,
                                 double relative_slack = 1e-9) {
  if (n_triples < 1) throw Error(ErrorCode::InvalidArgument, "n_triples must be >= 1");
  Region<P> r = region;
  r.count = 3 * n_triples;
  std::vector<P> pts;
  try {
    pts = space.sample(seed, r);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::SamplerError, e.what());
  }
  if (pts.size() < 3 * n_triples) {
    throw Error(ErrorCode::SamplerError, "sampler returned too few points for " + space.name);
  }

  AxiomReport rep;
  rep.triples = n_triples;
  rep.slack = relative_slack;
  rep.worst_triangle = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_triples; ++i) {
    const P& x = pts[3 * i];
    const P& y = pts[3 * i + 1];
    const P& z = pts[3 * i + 2];
    const double dxy = space.distance(x, y);
    const double dyx = space.distance(y, x);
    const double dxz = space.distance(x, z);
    const double dzy = space.distance(z, y);
    const double scale = 1.0 + std::max({dxy, dxz, dzy});
    rep.worst_triangle = std::max(rep.worst_triangle, (dxy - dxz - dzy) / scale);
    rep.worst_symmetry = std::max(rep.worst_symmetry, std::abs(dxy - dyx) / scale);
    rep.worst_identity = std::max({rep.worst_identity, space.distance(x, x), space.distance(y, y)});
  }
  rep.pass = rep.worst_triangle <= relative_slack && rep.worst_symmetry <= relative_slack &&
             rep.worst_identity <= relative_slack;
  return rep;
}

/// Distances d(A(t_i), B(t_i)) along a strictly positive, descending grid.
template <class P, class CurveA, class CurveB>
std::vector<double> curve_gap(const MetricSpace<P>& space, CurveA&& curve_a, CurveB&& curve_b,
                              std::span<const double> t_grid) {
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (!(t_grid[i] > 0.0)) throw Error(ErrorCode::InvalidArgument, "t_grid must be positive");
    if (i > 0 && !(t_grid[i] < t_grid[i - 1])) {
      throw Error(ErrorCode::InvalidArgument, "t_grid must be strictly descending");
    }
  }
  std::vector<double> gaps;
  gaps.reserve(t_grid.size());
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    try {
      gaps.push_back(space.distance(curve_a(t_grid[i]), curve_b(t_grid[i])));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::PointEscaped) throw;
      throw Error(ErrorCode::CurveEscaped, "curve left the space at grid index " + std::to_string(i), i);
    }
  }
  return gaps;
}

/// Finite sample standing in for a subset N of the space. `resolution` bounds
/// how far a point of N can be from the nearest sample, when known.
template <class P>
struct SampledSet {
  std::vector<P> points;
  std::string provenance;
  double resolution = 0.0;
};

/// min over the samples of d(p, q); the sampled proxy for d(p, N).
template <class P>
double distance_to_set(const MetricSpace<P>& space, const P& p, const SampledSet<P>& set) {
  if (set.points.empty()) throw Error(ErrorCode::InvalidArgument, "sampled set is empty");
  double best = std::numeric_limits<double>::infinity();
  for (const P& q : set.points) best = std::min(best, space.distance(p, q));
  return best;
}

}  // namespace arcflow
