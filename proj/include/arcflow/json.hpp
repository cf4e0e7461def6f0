#pragma once

#include <string>

#include <json.hpp>

#include "arcflow/diagnostics.hpp"
#include "arcflow/flow.hpp"
#include "arcflow/l2/control.hpp"
#include "arcflow/metric.hpp"
#include "arcflow/surface.hpp"
#include "arcflow/tangency.hpp"

namespace arcflow {

using Json = nlohmann::ordered_json;

inline void to_json(Json& j, const TangencyReport& r) {
  j = Json{{"verdict", std::string(to_string(r.verdict))},
           {"order_p", r.order_p},
           {"constant_C", r.constant_C},
           {"fit_residual", r.fit_residual},
           {"floor", r.floor},
           {"t_grid", r.t_grid},
           {"gaps", r.gaps}};
}

inline void to_json(Json& j, const ConstantEstimate& e) {
  j = Json{{"estimator", e.estimator}, {"value", e.value},       {"witness", e.witness},
           {"diverging", e.diverging}, {"grid_spec", e.grid_spec}, {"seed", e.seed}};
}

inline void to_json(Json& j, const AxiomReport& r) {
  j = Json{{"pass", r.pass},
           {"triples", r.triples},
           {"worst_triangle", r.worst_triangle},
           {"worst_symmetry", r.worst_symmetry},
           {"worst_identity", r.worst_identity},
           {"slack", r.slack}};
}

/// `endpoint_ref` is the space's description of the endpoint.
template <class P>
Json solve_result_json(const MetricSpace<P>& space, const SolveResult<P>& r) {
  Json j{{"endpoint_ref", space.describe(r.endpoint)},
         {"steps_used", r.steps_used},
         {"error_estimate", r.error_estimate},
         {"escaped", r.escaped},
         {"escape_time", r.escape_time ? Json(*r.escape_time) : Json(nullptr)}};
  Json trace = Json::array();
  for (const auto& [n, est] : r.trace) trace.push_back({{"n", n}, {"error_estimate", est}});
  j["trace"] = trace;
  return j;
}

inline void to_json(Json& j, const InvolutivityReport& r) {
  j = Json{{"verdict", r.involutive ? "INVOLUTIVE" : "NOT_INVOLUTIVE"}, {"points", Json::array()}};
  for (const auto& p : r.points) j["points"].push_back({{"base", p.base}, {"a", p.a}, {"b", p.b}, {"fit", p.report}});
}

inline void to_json(Json& j, const NagumoReport& r) {
  j = Json{{"mode", r.ratio_mode ? "ratio" : "drift"},
           {"base_distance", r.base_distance},
           {"max_ratio", r.max_ratio},
           {"max_drift", r.max_drift},
           {"t_grid", r.t_grid},
           {"distances", r.distances}};
}

inline void to_json(Json& j, const SpeedGrowthReport& r) {
  j = Json{{"radii", r.radii}, {"rho", r.rho}, {"c1", r.c1}, {"c2", r.c2}};
}

namespace l2 {

inline void to_json(Json& j, const CoefficientVector& c) {
  j = Json{{"target", c.target}, {"values", c.values}, {"provenance", c.provenance}};
}

/// {N, n_values, gap_oracle, gap_target, cost_evals}
inline Json reach_trace_json(const ReachResult& r) {
  return Json{{"N", r.coefficients.order()},
              {"n_values", r.n_values},
              {"gap_oracle", r.trace_gap_oracle},
              {"gap_target", r.trace_gap_target},
              {"cost_evals", r.cost_evals}};
}

inline void to_json(Json& j, const BracketRelation& r) {
  j = Json{{"relation", r.name},     {"candidate", r.candidate},
           {"base", r.base},         {"expected", std::string(to_string(r.expected))},
           {"pass", r.pass},         {"fit", r.report}};
}

}  // namespace l2
}  // namespace arcflow
