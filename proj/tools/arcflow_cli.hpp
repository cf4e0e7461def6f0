#pragma once

#include <algorithm>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "arcflow/arcflow.hpp"
#include "arcflow/json.hpp"

namespace arcflow::cli {

enum ExitCode { kOk = 0, kError = 1, kMismatch = 2 };

using Config = std::map<std::string, std::string>;

struct OptSpec {
  std::string key;
  std::string value;
  std::string help;
};

// ---------------------------------------------------------------- parsing

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

inline double to_double(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorCode::ParseError, "option '" + key + "': expected a number, got '" + s + "'");
}

inline long to_long(const std::string& key, const std::string& s) {
  try {
    std::size_t used = 0;
    const long v = std::stol(s, &used);
    if (used == s.size()) return v;
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorCode::ParseError, "option '" + key + "': expected an integer, got '" + s + "'");
}

inline std::vector<double> to_doubles(const std::string& key, const std::string& s) {
  std::vector<double> v;
  for (const auto& tok : split(s, ',')) v.push_back(to_double(key, tok));
  return v;
}

/// "k1:k2" gives the dyadic grid 2^-k1 .. 2^-k2; otherwise a comma list.
inline std::vector<double> parse_t_grid(const std::string& s) {
  const auto colon = s.find(':');
  if (colon != std::string::npos) {
    return dyadic_grid(static_cast<int>(to_long("t-grid", s.substr(0, colon))),
                       static_cast<int>(to_long("t-grid", s.substr(colon + 1))));
  }
  auto g = to_doubles("t-grid", s);
  std::sort(g.begin(), g.end(), std::greater<>());
  return g;
}

inline Config read_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::InvalidArgument, "cannot read config " + path);
  Config cfg;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::ParseError, "config line without '=': '" + line + "'");
    cfg[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return cfg;
}

// ---------------------------------------------------------------- fixtures

template <class P>
struct SpaceContext {
  MetricSpace<P> space;
  std::map<std::string, ArcField<P>> fields;
  std::function<P(const std::string&)> point;
  std::function<std::vector<P>(const std::string&)> points;

  ArcField<P> expr(const std::string& text) const { return parse_expression(text, fields); }

  /// Closed-form flow when the field is its own flow, else an Euler flow.
  Flow<P> flow(const std::string& text, int euler_steps) const {
    const ArcField<P> f = expr(text);
    if (f.is_exact_flow()) {
      return Flow<P>::closed_form(f, [f](const P& x, double t) { return f(x, t); }, f.name());
    }
    return Flow<P>::euler(f, euler_steps);
  }
};

inline SpaceContext<EuclideanPoint> euclidean_context(std::size_t dim) {
  SpaceContext<EuclideanPoint> c;
  c.space = euclidean_space(dim);
  auto& f = c.fields;
  const EuclideanPoint origin(dim, 0.0);
  for (std::size_t i = 0; i < dim; ++i) {
    EuclideanPoint e(dim, 0.0);
    e[i] = 1.0;
    f["trans" + std::to_string(i + 1)] = make_translation(e, "trans" + std::to_string(i + 1));
  }
  f["dil0"] = dilation_flow(origin, "dil0").as_arc_field();
  f["dil0_arc"] = make_dilation(origin, "dil0_arc");
  if (dim == 1) {
    f["sin"] = vector_field_arc([](const EuclideanPoint& x) { return EuclideanPoint{std::sin(x[0])}; }, 1, "sin");
    f["cos"] = vector_field_arc([](const EuclideanPoint& x) { return EuclideanPoint{std::cos(x[0])}; }, 1, "cos");
  }
  if (dim == 2) {
    const EuclideanPoint u{0.0, 0.0}, v{1.0, 0.0};
    f["dilU"] = dilation_flow(u, "dilU").as_arc_field();
    f["dilV"] = dilation_flow(v, "dilV").as_arc_field();
    f["dilU_arc"] = make_dilation(u, "dilU_arc");
    f["dilV_arc"] = make_dilation(v, "dilV_arc");
    f["transU"] = make_translation({1.0, 0.0}, "transU");
    f["transV"] = make_translation({0.0, 1.0}, "transV");
    f["transVU"] = make_translation(euclid::axpy(-1.0, u, v), "transVU");
    f["rot"] = rotation_field();
  }
  if (dim == 3) f["heis"] = heisenberg_field();
  c.point = [dim](const std::string& s) {
    if (s.empty() || s == "origin") return EuclideanPoint(dim, 0.0);
    auto p = to_doubles("point", s);
    if (p.size() != dim) {
      throw Error(ErrorCode::ParseError, "point '" + s + "' has " + std::to_string(p.size()) + " coordinates, space has " +
                                             std::to_string(dim));
    }
    return p;
  };
  c.points = [pt = c.point](const std::string& s) {
    std::vector<EuclideanPoint> out;
    for (const auto& item : split(s, ';')) out.push_back(pt(item));
    return out;
  };
  return c;
}

inline SpaceContext<GridFunction> l2_context(const GridSpec& grid) {
  SpaceContext<GridFunction> c;
  c.space = l2_space();
  const GridFunction h = l2::gaussian(grid);
  c.fields["X"] = l2::l2_X(h);
  c.fields["Y"] = l2::l2_Y();
  c.fields["V"] = l2::l2_V();
  c.fields["W"] = l2::l2_W();
  c.fields["Z"] = l2::l2_X(GridFunction::sample(grid, [](double x) { return l2::gaussian_derivative(1, x); }), "Z");
  c.point = [grid, h](const std::string& s) {
    if (s.empty() || s == "zero" || s == "origin") return GridFunction::zero(grid);
    if (s == "h") return h;
    if (s == "chi01") return l2::indicator(0.0, 1.0, grid);
    if (s.rfind("csv:", 0) == 0) {
      GridFunction f = read_grid_csv(s.substr(4));
      if (!(f.grid() == grid)) throw Error(ErrorCode::GridMismatch, "csv grid differs from --L/--dx");
      return f;
    }
    throw Error(ErrorCode::ParseError, "unknown L2 point '" + s + "' (zero, h, chi01, csv:<path>)");
  };
  c.points = [pt = c.point](const std::string& s) {
    std::vector<GridFunction> out;
    for (const auto& item : split(s, ';')) out.push_back(pt(item));
    return out;
  };
  return c;
}

inline SpaceContext<CompactSet> hausdorff_context() {
  SpaceContext<CompactSet> c;
  c.space = hausdorff_space();
  const Point2 u{0.0, 0.0}, v{1.0, 0.0};
  c.fields["setTransU"] = set_translation(u, "setTransU");
  c.fields["setTransV"] = set_translation(v, "setTransV");
  c.fields["setDilU"] = set_dilation_flow(u, "setDilU").as_arc_field();
  c.fields["setDilV"] = set_dilation_flow(v, "setDilV").as_arc_field();
  c.fields["setDilU_arc"] = set_dilation(u, "setDilU_arc");
  c.fields["setDilV_arc"] = set_dilation(v, "setDilV_arc");
  c.point = [](const std::string& s) {
    if (s.empty() || s == "origin") return CompactSet({Point2{0.0, 0.0}});
    std::vector<Point2> pts;
    for (const auto& item : split(s, ';')) {
      auto xy = to_doubles("point", item);
      if (xy.size() != 2) throw Error(ErrorCode::ParseError, "set member '" + item + "' is not a planar point");
      pts.push_back({xy[0], xy[1]});
    }
    return CompactSet(std::move(pts));
  };
  // Sets are separated by '|'.
  c.points = [pt = c.point](const std::string& s) {
    std::vector<CompactSet> out;
    for (const auto& item : split(s, '|')) out.push_back(pt(item));
    return out;
  };
  return c;
}

// ---------------------------------------------------------------- commands

struct Outcome {
  Json result;
  std::string verdict;
};

struct Command {
  std::string name;
  std::string help;
  std::vector<OptSpec> options;
  std::function<Outcome(const Config&)> run;
};

inline std::string get(const Config& c, const std::string& k) {
  auto it = c.find(k);
  return it == c.end() ? std::string() : it->second;
}

inline GridSpec grid_of(const Config& c) { return GridSpec{to_double("L", get(c, "L")), to_double("dx", get(c, "dx"))}; }

/// Runs `body(ctx)` with the context matching --space.
template <class Body>
Outcome with_space(const Config& c, Body&& body) {
  const std::string id = get(c, "space");
  if (id == "l2") return body(l2_context(grid_of(c)));
  if (id == "hausdorff") return body(hausdorff_context());
  if (id.size() >= 2 && id[0] == 'r') {
    const long dim = to_long("space", id.substr(1));
    if (dim >= 1 && dim <= 16) return body(euclidean_context(static_cast<std::size_t>(dim)));
  }
  throw Error(ErrorCode::ParseError, "unknown space '" + id + "' (r<n>, l2, hausdorff)");
}

inline void write_csv(const std::string& path, const std::string& header, const std::vector<std::vector<double>>& cols) {
  if (path.empty()) return;
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::InvalidArgument, "cannot write " + path);
  os << std::setprecision(17) << header << "\n";
  for (std::size_t i = 0; i < cols.front().size(); ++i) {
    for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k][i];
    os << "\n";
  }
}

inline std::vector<OptSpec> space_opts(std::string space = "r2") {
  return {{"space", std::move(space), "space id: r<n>, l2, hausdorff"},
          {"L", "8", "L2 grid half width"},
          {"dx", "0.00390625", "L2 grid spacing"}};
}

inline Command tangency_command() {
  auto opts = space_opts();
  opts.insert(opts.end(), {{"a", "", "first arc-field expression"},
                           {"b", "", "second arc-field expression"},
                           {"point", "", "base point"},
                           {"t-grid", "4:12", "k1:k2 (dyadic) or comma list"},
                           {"floor", "-1", "zero floor (negative: 1e-11 (1 + |x|))"},
                           {"csv", "", "write t,gap"}});
  return {"tangency", "fit the order of d(A_t x, B_t x)", opts, [](const Config& c) {
            return with_space(c, [&](const auto& ctx) {
              const auto A = ctx.expr(get(c, "a"));
              const auto B = ctx.expr(get(c, "b"));
              const auto x = ctx.point(get(c, "point"));
              const auto ts = parse_t_grid(get(c, "t-grid"));
              const auto gaps = curve_gap(
                  ctx.space, [&](double t) { return A(x, t); }, [&](double t) { return B(x, t); }, ts);
              OrderFitOptions o;
              o.scale = ctx.space.magnitude(x);
              o.floor = to_double("floor", get(c, "floor"));
              const TangencyReport r = estimate_order(ts, gaps, o);
              write_csv(get(c, "csv"), "t,gap", {r.t_grid, r.gaps});
              Json j = r;
              j["a"] = A.name();
              j["b"] = B.name();
              return Outcome{j, std::string(to_string(r.verdict))};
            });
          }};
}

inline Command euler_command() {
  auto opts = space_opts();
  opts.insert(opts.end(), {{"expr", "", "arc-field expression"},
                           {"point", "", "initial point"},
                           {"t", "1", "time"},
                           {"n", "0", "fixed Euler steps (0: adaptive with --tol)"},
                           {"tol", "1e-6", "Richardson tolerance"},
                           {"n-max", "4096", "largest step count"},
                           {"csv", "", "write n,error_estimate"}});
  return {"euler", "Euler curve / Richardson solve", opts, [](const Config& c) {
            return with_space(c, [&](const auto& ctx) {
              using P = std::decay_t<decltype(ctx.point(""))>;
              const auto X = ctx.expr(get(c, "expr"));
              const P x = ctx.point(get(c, "point"));
              const double t = to_double("t", get(c, "t"));
              const long n = to_long("n", get(c, "n"));
              SolveResult<P> r;
              if (n > 0) {
                r.endpoint = euler_curve(X, x, t, static_cast<int>(n));
                r.steps_used = static_cast<int>(n);
              } else {
                SolveOptions so;
                so.n_max = static_cast<int>(to_long("n-max", get(c, "n-max")));
                r = solve(ctx.space, X, x, t, to_double("tol", get(c, "tol")), so);
              }
              std::vector<double> ns, es;
              for (const auto& [k, e] : r.trace) {
                ns.push_back(k);
                es.push_back(e);
              }
              if (!ns.empty()) write_csv(get(c, "csv"), "n,error_estimate", {ns, es});
              return Outcome{solve_result_json(ctx.space, r), r.escaped ? "ESCAPED" : "SOLVED"};
            });
          }};
}

inline Command bracket_command() {
  auto opts = space_opts();
  opts.insert(opts.end(), {{"a", "", "first expression"},
                           {"b", "", "second expression"},
                           {"point", "", "base point"},
                           {"t-grid", "0.01,-0.01", "times"}});
  return {"bracket", "evaluate [A,B]_t(x) on a time grid", opts, [](const Config& c) {
            return with_space(c, [&](const auto& ctx) {
              const auto br = bracket(ctx.expr(get(c, "a")), ctx.expr(get(c, "b")));
              const auto x = ctx.point(get(c, "point"));
              Json rows = Json::array();
              for (double t : to_doubles("t-grid", get(c, "t-grid"))) {
                const auto y = br(x, t);
                rows.push_back({{"t", t}, {"value", ctx.space.describe(y)}, {"distance_from_x", ctx.space.distance(x, y)}});
              }
              return Outcome{Json{{"bracket", br.name()}, {"rows", rows}}, "EVALUATED"};
            });
          }};
}

inline std::vector<OptSpec> sampler_opts() {
  return {{"point", "", "sampler center"},  {"radius", "0.1", "sampler radius"}, {"count", "32", "samples"},
          {"delta", "0.5", "largest |t|"},  {"levels", "6", "time levels"},      {"seed", "1", "RNG seed"}};
}

template <class P>
RegionSampler<P> sampler_of(const SpaceContext<P>& ctx, const Config& c) {
  RegionSampler<P> s;
  s.center = ctx.point(get(c, "point"));
  s.radius = to_double("radius", get(c, "radius"));
  s.count = static_cast<std::size_t>(to_long("count", get(c, "count")));
  s.delta = to_double("delta", get(c, "delta"));
  s.time_levels = static_cast<int>(to_long("levels", get(c, "levels")));
  s.seed = static_cast<std::uint64_t>(to_long("seed", get(c, "seed")));
  return s;
}

inline Command diagnose_command() {
  auto opts = space_opts();
  auto so = sampler_opts();
  opts.insert(opts.end(), so.begin(), so.end());
  opts.insert(opts.end(), {{"estimator", "E1", "E1|E2|close|transverse|speed"},
                           {"a", "", "field X"},
                           {"b", "", "field Y (close, transverse)"},
                           {"radii", "0.5,1,1.5,2", "radii for speed"}});
  return {"diagnose", "sampled constants of arc-field conditions", opts, [](const Config& c) {
            return with_space(c, [&](const auto& ctx) {
              const std::string est = get(c, "estimator");
              const auto X = ctx.expr(get(c, "a"));
              const auto s = sampler_of(ctx, c);
              if (est == "speed") {
                const auto r = estimate_speed_growth(ctx.space, X, s.center, to_doubles("radii", get(c, "radii")),
                                                     s.count, s.seed, s.time_levels);
                return Outcome{Json(r), "FITTED"};
              }
              ConstantEstimate e;
              if (est == "E1") {
                e = estimate_E1(ctx.space, X, s);
              } else if (est == "E2") {
                e = estimate_E2(ctx.space, X, s);
              } else if (est == "close") {
                e = estimate_closeness(ctx.space, X, ctx.expr(get(c, "b")), s);
              } else if (est == "transverse") {
                e = estimate_transversality(ctx.space, X, ctx.expr(get(c, "b")), s);
                return Outcome{Json(e), is_transverse(e) ? "TRANSVERSE" : "NOT_TRANSVERSE"};
              } else {
                throw Error(ErrorCode::ParseError, "unknown estimator '" + est + "'");
              }
              return Outcome{Json(e), e.diverging ? "DIVERGING" : "STABLE"};
            });
          }};
}

inline Command commute_command() {
  auto opts = space_opts();
  auto so = sampler_opts();
  opts.insert(opts.end(), so.begin(), so.end());
  opts.insert(opts.end(), {{"f", "", "first flow (expression)"},
                           {"g", "", "second flow (expression)"},
                           {"euler-steps", "256", "steps for non-exact fields"},
                           {"floor", "1e-12", "gap counted as zero"}});
  return {"commute", "sup of d(F_t G_s x, G_s F_t x)", opts, [](const Config& c) {
            return with_space(c, [&](const auto& ctx) {
              const int steps = static_cast<int>(to_long("euler-steps", get(c, "euler-steps")));
              const auto F = ctx.flow(get(c, "f"), steps);
              const auto G = ctx.flow(get(c, "g"), steps);
              const auto e = commutation_gap(ctx.space, F, G, sampler_of(ctx, c));
              const double floor = to_double("floor", get(c, "floor"));
              return Outcome{Json(e), e.value <= floor ? "COMMUTE" : "NOT_COMMUTE"};
            });
          }};
}

inline Command surface_command() {
  auto opts = space_opts("r3");
  opts.insert(opts.end(), {{"f", "", "flow F (expression)"},
                           {"g", "", "flow G (expression)"},
                           {"x0", "", "surface origin"},
                           {"extent", "1", "parameter half width"},
                           {"m", "10", "grid points per half width"},
                           {"combo", "", "expression to test for tangency"},
                           {"base", "0,0", "base parameters s,t;s,t"},
                           {"t-grid", "4:12", "tangency times"},
                           {"euler-steps", "256", "steps for non-exact fields"}});
  return {"surface", "sample F_t G_s(x0) and test a combination for tangency", opts, [](const Config& c) {
            return with_space(c, [&](const auto& ctx) {
              using P = std::decay_t<decltype(ctx.point(""))>;
              const int steps = static_cast<int>(to_long("euler-steps", get(c, "euler-steps")));
              const auto grid =
                  symmetric_grid(to_double("extent", get(c, "extent")), static_cast<int>(to_long("m", get(c, "m"))));
              const auto S = sample_integral_surface(ctx.space, ctx.flow(get(c, "f"), steps),
                                                     ctx.flow(get(c, "g"), steps), ctx.point(get(c, "x0")), grid, grid);
              std::vector<P> base;
              for (const auto& item : split(get(c, "base"), ';')) {
                const auto st = to_doubles("base", item);
                if (st.size() != 2) throw Error(ErrorCode::ParseError, "base parameter '" + item + "' is not s,t");
                base.push_back(S.evaluate(st[0], st[1]));
              }
              const auto r = surface_tangency(ctx.space, S, ctx.expr(get(c, "combo")), base,
                                              parse_t_grid(get(c, "t-grid")));
              Json j = r;
              j["surface_points"] = S.points.size();
              j["resolution"] = S.resolution;
              return Outcome{j, std::string(to_string(r.verdict))};
            });
          }};
}

inline Command involutive_command() {
  auto opts = space_opts("r3");
  opts.insert(opts.end(), {{"f", "", "flow F"},
                           {"g", "", "flow G"},
                           {"points", "", "base points separated by ';'"},
                           {"coeff-bound", "2", "coefficient grid bound"},
                           {"coeff-step", "0.25", "coefficient grid step"},
                           {"t-grid", "4:12", "bracket times"},
                           {"euler-steps", "256", "steps for non-exact fields"}});
  return {"involutive", "fit [F,G] against aF + bG", opts, [](const Config& c) {
            return with_space(c, [&](const auto& ctx) {
              const int steps = static_cast<int>(to_long("euler-steps", get(c, "euler-steps")));
              const auto r = involutivity_check(
                  ctx.space, ctx.flow(get(c, "f"), steps), ctx.flow(get(c, "g"), steps),
                  coefficient_grid(to_double("coeff-bound", get(c, "coeff-bound")),
                                   to_double("coeff-step", get(c, "coeff-step"))),
                  ctx.points(get(c, "points")), parse_t_grid(get(c, "t-grid")));
              return Outcome{Json(r), r.involutive ? "INVOLUTIVE" : "NOT_INVOLUTIVE"};
            });
          }};
}

inline Command nagumo_command() {
  return {"nagumo",
          "distance of a solution to a sampled set against e^{Lambda|t|} d(x,S) (r2)",
          {{"field", "rot", "r2 field expression"},
           {"set", "circle", "circle (unit) or line (x axis, |x| <= 5)"},
           {"samples", "10000", "set samples"},
           {"point", "1.1,0", "initial point"},
           {"lambda", "1", "growth constant"},
           {"tol", "1e-5", "solver tolerance"},
           {"n-max", "65536", "largest Euler step count"},
           {"t-max", "1", "largest |t|"},
           {"t-count", "8", "times per sign"},
           {"slack", "0.05", "allowed ratio excess / drift"}},
          [](const Config& c) {
            const auto ctx = euclidean_context(2);
            const auto X = ctx.expr(get(c, "field"));
            const long m = to_long("samples", get(c, "samples"));
            if (m < 1) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
            SampledSet<EuclideanPoint> S;
            const std::string kind = get(c, "set");
            for (long k = 0; k < m; ++k) {
              if (kind == "circle") {
                const double a = 2.0 * M_PI * k / m;
                S.points.push_back({std::cos(a), std::sin(a)});
              } else if (kind == "line") {
                S.points.push_back({-5.0 + 10.0 * k / std::max(1L, m - 1), 0.0});
              } else {
                throw Error(ErrorCode::ParseError, "unknown set '" + kind + "'");
              }
            }
            S.provenance = kind;
            S.resolution = kind == "circle" ? M_PI / m : 5.0 / std::max(1L, m - 1);
            std::vector<double> ts;
            const double tmax = to_double("t-max", get(c, "t-max"));
            const long tc = to_long("t-count", get(c, "t-count"));
            for (long k = 1; k <= tc; ++k) {
              ts.push_back(tmax * k / tc);
              ts.push_back(-tmax * k / tc);
            }
            SolveOptions so;
            so.n_max = static_cast<int>(to_long("n-max", get(c, "n-max")));
            const auto r = nagumo_check(ctx.space, X, to_double("lambda", get(c, "lambda")), S,
                                        ctx.point(get(c, "point")), ts, to_double("tol", get(c, "tol")), so);
            const double slack = to_double("slack", get(c, "slack"));
            const bool ok = r.ratio_mode ? r.max_ratio <= 1.0 + slack : r.max_drift <= slack;
            return Outcome{Json(r), ok ? "BOUNDED" : "UNBOUNDED"};
          }};
}

inline Command reach_command() {
  return {"l2-reach",
          "Euler curve of the Hermite control field from the zero function",
          {{"target", "chi01", "chi01 or gaussian"},
           {"order", "3", "N"},
           {"steps", "256", "largest Euler step count"},
           {"L", "8", "grid half width"},
           {"dx", "0.00390625", "grid spacing"},
           {"csv", "", "write n,gap_oracle,gap_target"},
           {"target-csv", "", "write the target"},
           {"output-csv", "", "write the reach output"},
           {"oracle-csv", "", "write sum c_n h^[n]"}},
          [](const Config& c) {
            const GridSpec grid = grid_of(c);
            l2::ReachabilitySpec spec;
            spec.target_name = get(c, "target");
            if (spec.target_name == "chi01") {
              spec.target = l2::indicator(0.0, 1.0, grid);
            } else if (spec.target_name == "gaussian") {
              spec.target = l2::gaussian(grid);
              spec.closed_form = false;
            } else {
              throw Error(ErrorCode::ParseError, "unknown target '" + spec.target_name + "'");
            }
            spec.order = static_cast<int>(to_long("order", get(c, "order")));
            spec.steps = static_cast<int>(to_long("steps", get(c, "steps")));
            const auto r = l2::reach(spec);
            std::vector<double> ns(r.n_values.begin(), r.n_values.end());
            write_csv(get(c, "csv"), "n,gap_oracle,gap_target", {ns, r.trace_gap_oracle, r.trace_gap_target});
            if (!get(c, "target-csv").empty()) write_grid_csv(get(c, "target-csv"), spec.target);
            if (!get(c, "output-csv").empty()) write_grid_csv(get(c, "output-csv"), r.output);
            if (!get(c, "oracle-csv").empty()) write_grid_csv(get(c, "oracle-csv"), r.oracle);
            Json j = l2::reach_trace_json(r);
            j["coefficients"] = r.coefficients;
            j["oracle_target_gap"] = r.oracle_target_gap;
            const bool monotone =
                std::is_sorted(r.trace_gap_oracle.rbegin(), r.trace_gap_oracle.rend());
            return Outcome{j, monotone ? "MONOTONE" : "NOT_MONOTONE"};
          }};
}

inline Command hermite_command() {
  return {"hermite",
          "coefficient and orthogonality tables",
          {{"table", "coeffs", "coeffs or orthogonality"},
           {"order", "8", "largest degree"},
           {"L", "8", "grid half width"},
           {"dx", "0.00390625", "grid spacing"}},
          [](const Config& c) {
            const GridSpec grid = grid_of(c);
            const int N = static_cast<int>(to_long("order", get(c, "order")));
            const std::string table = get(c, "table");
            if (table == "coeffs") {
              const auto closed = l2::coefficients_chi01(N);
              const auto quad = l2::coefficients_general(l2::indicator(0.0, 1.0, grid), N, "chi01");
              double worst = 0.0;
              for (int n = 0; n <= N; ++n) worst = std::max(worst, std::abs(closed.values[n] - quad.values[n]));
              return Outcome{Json{{"closed_form", closed}, {"quadrature", quad}, {"max_difference", worst}},
                             worst <= 2.0 * grid.spacing ? "AGREE" : "DISAGREE"};
            }
            if (table == "orthogonality") {
              Json rows = Json::array();
              double worst = 0.0;
              for (int m = 0; m <= N; ++m) {
                std::vector<double> row;
                for (int n = 0; n <= N; ++n) {
                  const double v = l2::hermite_orthogonality(m, n, grid);
                  row.push_back(v);
                  const double expect = m == n ? l2::hermite_norm_squared(n) : 0.0;
                  worst = std::max(worst, std::abs(v - expect) / l2::hermite_norm_squared(std::max(m, n)));
                }
                rows.push_back(row);
              }
              return Outcome{Json{{"matrix", rows}, {"max_relative_error", worst}},
                             worst <= 1e-5 ? "ORTHOGONAL" : "NOT_ORTHOGONAL"};
            }
            throw Error(ErrorCode::ParseError, "unknown table '" + table + "'");
          }};
}

inline Command metric_check_command() {
  auto opts = space_opts("hausdorff");
  opts.insert(opts.end(), {{"triples", "1000", "sampled triples"},
                           {"seed", "7", "RNG seed"},
                           {"point", "", "region center"},
                           {"radius", "1", "region radius"},
                           {"expect", "PASS", ""}});
  return {"metric-check", "sampled metric axioms", opts, [](const Config& c) {
            return with_space(c, [&](const auto& ctx) {
              using P = std::decay_t<decltype(ctx.point(""))>;
              const auto r = verify_metric_axioms(
                  ctx.space, Region<P>{ctx.point(get(c, "point")), to_double("radius", get(c, "radius")), 1},
                  static_cast<std::size_t>(to_long("triples", get(c, "triples"))),
                  static_cast<std::uint64_t>(to_long("seed", get(c, "seed"))));
              return Outcome{Json(r), r.pass ? "PASS" : "FAIL"};
            });
          }};
}

inline std::vector<Command> commands() {
  return {tangency_command(), euler_command(),  bracket_command(), diagnose_command(),
          commute_command(),  surface_command(), involutive_command(), nagumo_command(),
          reach_command(),    hermite_command(), metric_check_command()};
}

// ---------------------------------------------------------------- driver

/**
 * Runs one subcommand. JSON goes to `out`, messages to `err`. Exit code 0 when
 * the verdict matches --expect (or none is given), 2 on mismatch, 1 on error.
 */
inline int run_command(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  const auto cmds = commands();
  try {
    // A config file may name the command; it applies only when argv does not.
    std::string config_path;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
      if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
    }
    Config file_cfg;
    if (!config_path.empty()) file_cfg = read_config_file(config_path);
    const bool has_command =
        !args.empty() && std::any_of(cmds.begin(), cmds.end(), [&](const Command& c) { return c.name == args[0]; });
    if (!has_command && file_cfg.count("command")) args.insert(args.begin(), file_cfg["command"]);

    CLI::App app{"arcflow: arc fields, flows and brackets on metric spaces", "arcflow"};
    app.require_subcommand(1);
    std::vector<Config> values(cmds.size());
    std::vector<CLI::App*> subs;
    std::string dummy_config;
    bool dump = false;
    std::string expect;
    for (std::size_t k = 0; k < cmds.size(); ++k) {
      CLI::App* sub = app.add_subcommand(cmds[k].name, cmds[k].help);
      for (const auto& o : cmds[k].options) {
        if (o.key == "expect") continue;
        values[k][o.key] = o.value;
        sub->add_option("--" + o.key, values[k][o.key], o.help);
      }
      sub->add_option("--config", dummy_config, "key=value file");
      sub->add_flag("--dump-config", dump, "print the effective config and exit");
      sub->add_option("--expect", expect, "expected verdict");
      subs.push_back(sub);
    }

    std::vector<const char*> argv{"arcflow"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
      app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
      out << app.help();
      return kOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n";
      return kError;
    }

    std::size_t k = 0;
    while (!subs[k]->parsed()) ++k;
    Config& cfg = values[k];
    for (const auto& [key, value] : file_cfg) {
      if (key == "command") continue;
      if (key == "expect") {
        if (subs[k]->get_option("--expect")->count() == 0) expect = value;
        continue;
      }
      if (!cfg.count(key)) throw Error(ErrorCode::ParseError, "config key '" + key + "' is not an option of " + cmds[k].name);
      if (subs[k]->get_option("--" + key)->count() == 0) cfg[key] = value;
    }
    if (expect.empty()) {
      for (const auto& o : cmds[k].options) {
        if (o.key == "expect") expect = o.value;
      }
    }

    if (dump) {
      out << "command=" << cmds[k].name << "\n";
      for (const auto& [key, value] : cfg) out << key << "=" << value << "\n";
      if (!expect.empty()) out << "expect=" << expect << "\n";
      return kOk;
    }

    const Outcome o = cmds[k].run(cfg);
    Json report{{"command", cmds[k].name}, {"config", cfg}, {"verdict", o.verdict}, {"result", o.result}};
    if (!expect.empty()) report["expected"] = expect;
    out << report.dump(2) << "\n";
    if (!expect.empty() && expect != o.verdict) {
      err << "verdict " << o.verdict << " does not match expected " << expect << "\n";
      return kMismatch;
    }
    return kOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kError;
  }
}

}  // namespace arcflow::cli
