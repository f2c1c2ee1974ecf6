#pragma once

#include <cmath>
#include <cstdio>
#include <string>

#include "json.hpp"
#include "quillen/cohomology.hpp"
#include "quillen/convergence.hpp"
#include "quillen/experiments.hpp"
#include "quillen/torsion.hpp"

namespace quillen {

using json = nlohmann::ordered_json;

/// Rounds to 15 significant digits so that output bytes do not depend on the
/// last bits of the computation.
inline double round15(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return std::strtod(buf, nullptr);
}

inline json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round15(x);
}

inline json numbers(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(number(x));
  return a;
}

inline json to_json(const std::vector<Component>& cs) {
  json o = json::object();
  for (const auto& c : cs) o[c.label] = number(c.value);
  return o;
}

inline json to_json(const TorsionResult& r) {
  return {{"value", number(r.value)},
          {"route", to_string(r.route)},
          {"components", to_json(r.components)},
          {"err", number(r.error)}};
}

inline json to_json(const AnomalyTerm& a) {
  return {{"kind", to_string(a.kind)},
          {"value", number(a.value)},
          {"contributions", to_json(a.contributions)},
          {"err", number(a.error)}};
}

inline json to_json(const GramData& g) {
  return {{"m", g.m},
          {"entries", numbers(g.entries)},
          {"det", number(g.det)},
          {"log_det", number(g.log_det)},
          {"err", number(g.error)}};
}

inline json to_json(const ConvergenceReport& r) {
  json o = {{"parameters", numbers(r.parameters)}};
  if (r.is_double()) o["column_parameters"] = numbers(r.column_parameters);
  o["values"] = numbers(r.values);
  o["limit"] = r.limit ? number(*r.limit) : json(nullptr);
  o["distances"] = numbers(r.distances);
  o["tail_gaps"] = numbers(r.tail_gaps);
  o["max_tail_gap"] = number(r.max_tail_gap);
  o["window"] = r.window;
  o["epsilon"] = number(r.epsilon);
  o["decay_rate"] = r.decay_rate ? number(*r.decay_rate) : json(nullptr);
  o["monotone_from"] = r.monotone_from ? json(*r.monotone_from) : json(nullptr);
  o["verdict"] = to_string(r.verdict);
  o["richardson"] = r.richardson ? number(*r.richardson) : json(nullptr);
  json series = json::object();
  for (const auto& [name, values] : r.series) series[name] = numbers(values);
  o["series"] = series;
  return o;
}

inline json to_json(const CounterexampleRow& r) {
  return {{"delta", number(r.delta)},
          {"sup_distance", number(r.sup_distance)},
          {"sup_bound", number(r.sup_bound)},
          {"torsion", number(r.torsion)},
          {"torsion_limit", number(r.torsion_limit)},
          {"gap", number(r.gap)},
          {"pairing_c1", number(r.pairing_c1)},
          {"m_delta", number(r.m_delta)},
          {"self_pairing", number(r.self_pairing)},
          {"energy", number(r.energy)},
          {"energy_oracle", number(r.energy_oracle)},
          {"remainder", number(r.remainder)},
          {"remainder_oracle", number(r.remainder_oracle)},
          {"g0", number(r.g0)},
          {"g0_limit", number(r.g0_limit)},
          {"bound_printed", number(r.bound_printed)},
          {"bound_consistent", number(r.bound_consistent)}};
}

inline json to_json(const CounterexampleStudy& s) {
  json rows = json::array();
  for (const auto& r : s.rows) rows.push_back(to_json(r));
  return {{"c", number(s.c)},
          {"measured_M", number(s.measured_m)},
          {"rows", rows},
          {"verdicts",
           {{"sup_distance_to_zero", s.sup_to_zero},
            {"printed_bound", s.printed_bound},
            {"consistent_bound", s.consistent_bound},
            {"torsion_not_converging", s.torsion_not_converging},
            {"bounded", s.bounded},
            {"energy_identity", s.energy_identity},
            {"l2_converges", s.l2_converges}}},
          {"gap_report", to_json(s.gap_report)},
          {"l2_report", to_json(s.l2_report)}};
}

inline json to_json(const ClosedFormRow& r) {
  return {{"m", r.m},
          {"printed", number(r.printed)},
          {"consistent", number(r.consistent)},
          {"direct", number(r.direct)},
          {"transfer", number(r.transfer)},
          {"limit", number(r.limit)},
          {"limit_verdict", to_string(r.limit_verdict)},
          {"spread", number(r.spread)},
          {"diff_printed", number(r.diff_printed)},
          {"diff_consistent", number(r.diff_consistent)}};
}

inline json to_json(const LimitResult& r) { return {{"value", number(r.value)}, {"report", to_json(r.report)}}; }

inline json to_json(const DoubleLimitStudy& s) {
  return {{"a", to_json(s.a)},
          {"b", to_json(s.b)},
          {"difference", number(s.difference)},
          {"agree", s.agree},
          {"expected", s.expected ? number(*s.expected) : json(nullptr)}};
}

inline json to_json(const BedfordTaylorCase& c) {
  return {{"family", c.family}, {"test_function", c.test_function}, {"passed", c.passed}, {"report", to_json(c.report)}};
}

}  // namespace quillen
