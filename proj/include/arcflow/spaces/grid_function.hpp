#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "arcflow/error.hpp"
#include "arcflow/metric.hpp"

namespace arcflow {

/// Uniform grid on [-L, L] with spacing dx; nodes x_i = -L + i dx.
struct GridSpec {
  double half_width = 8.0;
  double spacing = 1.0 / 256.0;

  std::size_t size() const { return static_cast<std::size_t>(std::llround(2.0 * half_width / spacing)) + 1; }
  double node(std::size_t i) const { return -half_width + static_cast<double>(i) * spacing; }

  bool operator==(const GridSpec& o) const {
    return half_width == o.half_width && spacing == o.spacing;
  }
};

/**
 * Samples of an L^2(R) function on a uniform grid, zero outside [-L, L].
 * Immutable in practice: every grid operation returns a new value.
 */
class GridFunction {
 public:
  GridFunction() = default;

  GridFunction(GridSpec grid, std::vector<double> samples) : grid_(grid), samples_(std::move(samples)) {
    if (!(grid_.half_width > 0.0) || !(grid_.spacing > 0.0)) {
      throw Error(ErrorCode::InvalidArgument, "grid needs L > 0 and dx > 0");
    }
    const double ratio = 2.0 * grid_.half_width / grid_.spacing;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
      throw Error(ErrorCode::InvalidArgument, "2L/dx must be an integer");
    }
    if (samples_.size() != grid_.size()) {
      throw Error(ErrorCode::GridMismatch, "expected " + std::to_string(grid_.size()) + " samples, got " +
                                               std::to_string(samples_.size()));
    }
    for (double v : samples_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite grid sample");
    }
  }

  static GridFunction zero(GridSpec grid) { return GridFunction(grid, std::vector<double>(grid.size(), 0.0)); }

  template <class F>
  static GridFunction sample(GridSpec grid, F&& f) {
    std::vector<double> s(grid.size());
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = f(grid.node(i));
    return GridFunction(grid, std::move(s));
  }

  const GridSpec& grid() const { return grid_; }
  double half_width() const { return grid_.half_width; }
  double spacing() const { return grid_.spacing; }
  std::size_t size() const { return samples_.size(); }
  double x(std::size_t i) const { return grid_.node(i); }
  const std::vector<double>& samples() const { return samples_; }
  double operator[](std::size_t i) const { return samples_[i]; }

  /// Linear interpolation at an arbitrary abscissa, zero outside the grid.
  double at(double xv) const {
    const double o = (xv + grid_.half_width) / grid_.spacing;
    const double k = std::floor(o);
    const double th = o - k;
    auto sample = [&](double idx) -> double {
      if (idx < 0.0 || idx > static_cast<double>(samples_.size() - 1)) return 0.0;
      return samples_[static_cast<std::size_t>(idx)];
    };
    if (th == 0.0) return sample(k);
    return (1.0 - th) * sample(k) + th * sample(k + 1.0);
  }

 private:
  GridSpec grid_;
  std::vector<double> samples_;
};

inline void require_same_grid(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid() == g.grid())) throw Error(ErrorCode::GridMismatch, "grid functions live on different grids");
}

/// Rectangle rule over all nodes: sqrt(dx * sum f_i^2).
inline double grid_norm(const GridFunction& f) {
  double s = 0;
  for (double v : f.samples()) s += v * v;
  return std::sqrt(f.spacing() * s);
}

inline double grid_inner(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) s += f[i] * g[i];
  return f.spacing() * s;
}

inline double grid_distance(const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  double s = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double d = f[i] - g[i];
    s += d * d;
  }
  return std::sqrt(f.spacing() * s);
}

/// alpha f + g
inline GridFunction grid_axpy(double alpha, const GridFunction& f, const GridFunction& g) {
  require_same_grid(f, g);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = alpha * f[i] + g[i];
  return GridFunction(f.grid(), std::move(out));
}

inline GridFunction grid_scale(double alpha, const GridFunction& f) {
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = alpha * f[i];
  return GridFunction(f.grid(), std::move(out));
}

/// Relative mass loss above which a grid map reports POINT_ESCAPED.
inline constexpr double kMassLossThreshold = 1e-6;

namespace detail {
inline void check_mass_loss(double dropped, const GridFunction& f, double threshold, const char* what) {
  const double total = grid_norm(f);
  if (dropped > threshold * total && dropped > 0.0) {
    std::ostringstream os;
    os << what << " pushed L2 mass " << dropped << " (of " << total << ") beyond the grid boundary";
    throw Error(ErrorCode::PointEscaped, os.str());
  }
}
}  // namespace detail

/**
 * Samples of x -> f(x + t). Integer multiples of dx shift indices exactly;
 * otherwise linear interpolation with zero extension. Mass shifted past the
 * boundary beyond the threshold raises POINT_ESCAPED.
 */
inline GridFunction grid_shift(const GridFunction& f, double t, double threshold = kMassLossThreshold) {
  if (t == 0.0) return f;
  if (!(std::abs(t) < f.half_width())) {
    throw Error(ErrorCode::PointEscaped, "shift " + std::to_string(t) + " is not inside (-L, L)");
  }
  const long n = static_cast<long>(f.size());
  const double o = t / f.spacing();
  long k = static_cast<long>(std::floor(o));
  double th = o - static_cast<double>(k);
  if (std::abs(o - std::round(o)) <= 1e-9) {
    k = std::lround(o);
    th = 0.0;
  }
  const auto& s = f.samples();
  std::vector<double> out(f.size(), 0.0);
  for (long i = 0; i < n; ++i) {
    const long j = i + k;
    double v = 0.0;
    if (j >= 0 && j < n) v += (1.0 - th) * s[j];
    if (th != 0.0 && j + 1 >= 0 && j + 1 < n) v += th * s[j + 1];
    out[i] = v;
  }
  // Source indices that feed no output node.
  const long used_lo = k;
  const long used_hi = n - 1 + k + (th != 0.0 ? 1 : 0);
  double lost = 0.0;
  for (long j = 0; j < n; ++j) {
    if (j < used_lo || j > used_hi) lost += s[j] * s[j];
  }
  detail::check_mass_loss(std::sqrt(f.spacing() * lost), f, threshold, "grid_shift");
  return GridFunction(f.grid(), std::move(out));
}

/// Samples of x -> f(e^t x), linear interpolation, zero extension.
inline GridFunction grid_dilate_arg(const GridFunction& f, double t, double threshold = kMassLossThreshold) {
  if (t == 0.0) return f;
  const double e = std::exp(t);
  std::vector<double> out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = f.at(e * f.x(i));
  if (t < 0.0) {
    // f on |y| > L e^t would land outside [-L, L]; its L2 weight there is e^{-t} times larger.
    const double cut = f.half_width() * e;
    double lost = 0.0;
    for (std::size_t j = 0; j < f.size(); ++j) {
      if (std::abs(f.x(j)) > cut) lost += f[j] * f[j];
    }
    detail::check_mass_loss(std::sqrt(f.spacing() * lost / e), f, threshold, "grid_dilate_arg");
  }
  return GridFunction(f.grid(), std::move(out));
}

/// `# L=<L> dx=<dx>` then `x,value` rows, one per node.
inline void write_grid_csv(std::ostream& os, const GridFunction& f) {
  os << std::setprecision(17);
  os << "# L=" << f.half_width() << " dx=" << f.spacing() << "\n";
  os << "x,value\n";
  for (std::size_t i = 0; i < f.size(); ++i) os << f.x(i) << ',' << f[i] << '\n';
}

inline void write_grid_csv(const std::string& path, const GridFunction& f) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  write_grid_csv(os, f);
}

inline GridFunction read_grid_csv(std::istream& is) {
  std::string line;
  double L = -1, dx = -1;
  bool header = false;
  std::vector<double> values;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream ls(line.substr(1));
      std::string tok;
      while (ls >> tok) {
        if (tok.rfind("L=", 0) == 0) L = std::stod(tok.substr(2));
        if (tok.rfind("dx=", 0) == 0) dx = std::stod(tok.substr(3));
      }
      continue;
    }
    if (!header) {
      if (line != "x,value") throw Error(ErrorCode::ParseError, "expected header 'x,value', got '" + line + "'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(ErrorCode::ParseError, "malformed row '" + line + "'");
    values.push_back(std::stod(line.substr(comma + 1)));
  }
  if (L <= 0 || dx <= 0) throw Error(ErrorCode::ParseError, "missing '# L=<L> dx=<dx>' metadata line");
  return GridFunction(GridSpec{L, dx}, std::move(values));
}

inline GridFunction read_grid_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::InvalidArgument, "cannot read " + path);
  return read_grid_csv(is);
}

/**
 * L^2 metric on grid functions. Samples are center + r u^{1/2} phi / |phi|, with
 * phi a random sum of three Gaussian bumps inside [-3, 3].
 */
inline MetricSpace<GridFunction> l2_space() {
  MetricSpace<GridFunction> s;
  s.name = "l2";
  s.distance = [](const GridFunction& a, const GridFunction& b) { return grid_distance(a, b); };
  s.sample = [](std::uint64_t seed, const Region<GridFunction>& r) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<GridFunction> out;
    out.reserve(r.count);
    for (std::size_t k = 0; k < r.count; ++k) {
      double m[3], w[3], sg[3];
      for (int j = 0; j < 3; ++j) {
        m[j] = -3.0 + 6.0 * unit(rng);
        sg[j] = 0.3 + 1.2 * unit(rng);
        w[j] = gauss(rng);
      }
      auto phi = GridFunction::sample(r.center.grid(), [&](double x) {
        double v = 0;
        for (int j = 0; j < 3; ++j) v += w[j] * std::exp(-(x - m[j]) * (x - m[j]) / (sg[j] * sg[j]));
        return v;
      });
      const double nrm = grid_norm(phi);
      const double rad = r.radius * std::sqrt(unit(rng));
      out.push_back(nrm > 0 ? grid_axpy(rad / nrm, phi, r.center) : r.center);
    }
    return out;
  };
  s.describe = [](const GridFunction& f) {
    std::ostringstream os;
    os.precision(10);
    os << "GridFunction(L=" << f.half_width() << ",dx=" << f.spacing() << ",norm=" << grid_norm(f) << ")";
    return os.str();
  };
  s.magnitude = [](const GridFunction& f) { return grid_norm(f); };
  return s;
}

}  // namespace arcflow
