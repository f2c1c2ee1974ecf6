#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "quillen/quillen.hpp"

using namespace quillen;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Settings {
  std::string format = "json";
  std::string output;
  bool no_meta = false;
  bool verify = false;
  unsigned jobs = 0;
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  double epsilon = 1e-6;
  std::size_t window = 4;

  QuadratureOptions quadrature() const {
    QuadratureOptions q;
    q.absolute_tolerance = abs_tol;
    q.tolerance = rel_tol;
    return q;
  }
  ConvergenceOptions convergence() const {
    ConvergenceOptions c;
    c.epsilon = epsilon;
    c.window = window;
    return c;
  }
  LimitOptions limit() const { return {convergence(), quadrature(), jobs}; }
};

struct Check {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
};

Check near(std::string name, double value, double expected, double tol) {
  return {std::move(name), std::abs(value - expected) < tol, value, expected, tol};
}

Check at_most(std::string name, double value, double bound) { return {std::move(name), value <= bound, value, bound, 0.0}; }

Check flag(std::string name, bool ok) { return {std::move(name), ok, ok ? 1.0 : 0.0, 1.0, 0.0}; }

struct Output {
  json result;
  std::vector<std::string> csv_header;
  std::vector<std::vector<std::string>> csv_rows;
  std::vector<Check> checks;
};

std::string fmt(double x) {
  if (!std::isfinite(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json checks_json(const std::vector<Check>& checks) {
  json a = json::array();
  for (const auto& c : checks)
    a.push_back({{"name", c.name},
                 {"passed", c.passed},
                 {"value", number(c.value)},
                 {"expected", number(c.expected)},
                 {"tolerance", number(c.tolerance)}});
  return a;
}

std::string render(const std::string& command, const Output& out, const Settings& s) {
  std::ostringstream os;
  if (s.format == "csv") {
    for (std::size_t i = 0; i < out.csv_header.size(); ++i) os << (i ? "," : "") << out.csv_header[i];
    os << '\n';
    for (const auto& row : out.csv_rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
      os << '\n';
    }
    return os.str();
  }
  json doc = {{"command", command}, {"result", out.result}};
  if (s.verify) doc["checks"] = checks_json(out.checks);
  if (!s.no_meta)
    doc["meta"] = {{"version", kVersion}, {"timestamp", utc_timestamp()}, {"jobs", s.jobs}};
  return doc.dump(2) + "\n";
}

void emit(const std::string& text, const Settings& s) {
  if (s.output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(s.output, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot open output file '" + s.output + "'");
  f << text;
}

std::vector<std::string> component_row(const std::string& label, double value, double error) {
  return {label, fmt(value), fmt(error)};
}

/// Parses "canonical:m" into m, or returns -1.
int canonical_degree(const std::string& spec) {
  const auto p = parse_family(spec);
  return p.tag == FamilyTag::canonical ? p.degree : -1;
}

/// Positive approximants for one slot of the generalized limit: Zhang
/// iterates for the canonical metrics, a constant sequence for a positive
/// smooth metric.
DecomposedSequence limit_slot(const RadialPotential& p, bool canonical_target, int levels) {
  if (canonical_target) {
    const auto base = p.degree() == 2 ? omega_fs().potential() : fubini_study(p.degree());
    DecomposedSequence s;
    s.positive = zhang_sequence(base, levels);
    for (int n = 0; n < levels; ++n) s.parameters.push_back(n);
    return s;
  }
  if (!p.positive() || p.regularity() != Regularity::smooth)
    throw std::invalid_argument("route limit: '" + p.label() +
                                "' is neither canonical nor positive smooth; no positive approximation is known");
  DecomposedSequence s;
  s.positive = {p};
  s.parameters = {0.0};
  return s;
}

// ---- commands ----

struct TorsionArgs {
  std::string bundle = "canonical:1";
  std::string volume = "canonical";
  std::string route = "auto";
  int levels = 30;
};

Output cmd_torsion(const TorsionArgs& a, const Settings& s) {
  const auto p = parse_potential(a.bundle);
  const auto w = parse_volume(a.volume);
  Output out;
  TorsionResult r;
  std::optional<ConvergenceReport> report;
  if (a.route != "auto" && parse_route(a.route) == Route::generalized_limit) {
    const int m = canonical_degree(a.bundle);
    const bool vol_canonical = a.volume == "canonical" || a.volume == "inf";
    auto lim = generalized_torsion_curve(limit_slot(p, m >= 0, a.levels), limit_slot(w.potential(), vol_canonical, a.levels),
                                         s.limit());
    r.value = lim.value;
    r.route = Route::generalized_limit;
    r.error = lim.report.max_tail_gap;
    r.components = {{"grid_corner", lim.value, lim.report.max_tail_gap}};
    if (lim.report.richardson) r.components.push_back({"richardson", *lim.report.richardson, 0.0});
    report = lim.report;
  } else {
    r = torsion(p, w, a.route == "auto" ? std::nullopt : std::optional<Route>(parse_route(a.route)), s.quadrature());
  }
  out.result = to_json(r);
  if (report) out.result["report"] = to_json(*report);
  out.csv_header = {"component", "value", "err"};
  for (const auto& c : r.components) out.csv_rows.push_back(component_row(c.label, c.value, c.error));
  out.csv_rows.push_back(component_row("total", r.value, r.error));

  out.checks.push_back(at_most("error_estimate", r.error, 1e-6));
  if (const int m = canonical_degree(a.bundle); m >= 0 && (a.volume == "canonical" || a.volume == "inf")) {
    out.checks.push_back(near("closed_form_printed", r.value, closed_form_printed(m), 1e-6));
    out.checks.push_back(near("closed_form_consistent", r.value, closed_form_consistent(m), 1e-6));
  }
  if (report) out.checks.push_back(flag("limit_converged", report->verdict == Verdict::converged));
  return out;
}

struct PairArgs {
  std::string bundle = "fs:1";
  std::string volume = "fs";
};

Output cmd_quillen(const PairArgs& a, const Settings& s) {
  const auto p = parse_potential(a.bundle);
  const auto w = parse_volume(a.volume);
  const auto q = s.quadrature();
  const auto v = quillen_detailed(p, w, q);
  Output out;
  out.result = {{"value", number(v.log_quillen)},
                {"log_l2", number(v.log_l2)},
                {"torsion", number(v.log_quillen - v.log_l2)},
                {"components",
                 {{"reference_log_quillen", number(v.ref.log_quillen())},
                  {"volume_anomaly", number(-v.volume.value)},
                  {"bundle_anomaly", number(-v.bundle.value)}}},
                {"err", number(v.error)}};
  out.csv_header = {"quantity", "value", "err"};
  out.csv_rows = {component_row("log_quillen", v.log_quillen, v.error),
                  component_row("log_l2", v.log_l2, v.gram.error),
                  component_row("torsion", v.log_quillen - v.log_l2, v.error + v.gram.error)};
  // Same metric reached through an intermediate Zhang iterate.
  if (p.degree() >= 0) {
    const double via = quillen_via(p, {zhang_iterate(fubini_study(p.degree()), 2, 3)}, w, q);
    out.checks.push_back(near("intermediate_chain", via, v.log_quillen, 1e-8));
  }
  out.checks.push_back(at_most("error_estimate", v.error, 1e-6));
  return out;
}

Output cmd_gram(const PairArgs& a, const Settings& s) {
  const auto p = parse_potential(a.bundle);
  const auto w = parse_volume(a.volume);
  const auto g = gram(p, w, s.quadrature());
  Output out;
  out.result = to_json(g);
  out.csv_header = {"k", "entry", "err"};
  for (std::size_t k = 0; k < g.entries.size(); ++k)
    out.csv_rows.push_back({std::to_string(k), fmt(g.entries[k]), fmt(g.errors[k])});
  for (std::size_t k = 0; k < g.entries.size(); ++k)
    out.checks.push_back(flag("entry_positive_" + std::to_string(k), g.entries[k] > 0.0));
  if (const int m = canonical_degree(a.bundle); m >= 0 && (a.volume == "canonical" || a.volume == "inf")) {
    for (int k = 0; k <= m; ++k)
      out.checks.push_back(near("canonical_entry_" + std::to_string(k), g.entries[k],
                                (m + 2.0) / ((k + 1.0) * (m + 1.0 - k)), 1e-9));
    out.checks.push_back(near("canonical_det", g.det, std::exp(canonical_log_gram(m)), 1e-8));
  }
  return out;
}

struct AnomalyArgs {
  std::string kind = "bundle";
  std::string bundle = "fs:1";
  std::string bundle2;
  std::string volume = "fs";
  std::string volume2 = "fs-unit";
};

Output cmd_anomaly(const AnomalyArgs& a, const Settings& s) {
  const auto q = s.quadrature();
  const auto p = parse_potential(a.bundle);
  const auto w = parse_volume(a.volume);
  Output out;
  AnomalyTerm t;
  if (a.kind == "bundle") {
    const auto p2 = a.bundle2.empty() ? fubini_study(p.degree()) : parse_potential(a.bundle2);
    t = bundle_anomaly(p, p2, w, q);
    const auto back = bundle_anomaly(p2, p, w, q);
    out.checks.push_back(near("antisymmetry", t.value + back.value, 0.0, 1e-10));
    if (p.degree() >= 0 && p2.degree() == p.degree()) {
      const double diff = log_quillen(p, w, q) - log_quillen(p2, w, q);
      out.checks.push_back(near("quillen_difference", diff, -t.value, 1e-8));
    }
  } else if (a.kind == "volume") {
    const auto w2 = parse_volume(a.volume2);
    t = volume_anomaly(p, w, w2, q);
    const auto back = volume_anomaly(p, w2, w, q);
    out.checks.push_back(near("antisymmetry", t.value + back.value, 0.0, 1e-10));
    if (p.degree() >= 0) {
      const double diff = log_quillen(p, w, q) - log_quillen(p, w2, q);
      out.checks.push_back(near("quillen_difference", diff, -t.value, 1e-8));
    }
  } else {
    throw std::invalid_argument("--kind must be bundle or volume");
  }
  out.result = to_json(t);
  out.csv_header = {"contribution", "value", "err"};
  for (const auto& c : t.contributions) out.csv_rows.push_back(component_row(c.label, c.value, c.error));
  out.csv_rows.push_back(component_row("total", t.value, t.error));
  return out;
}

struct ZhangArgs {
  std::string base = "fs:1";
  int p = 2;
  int n = 8;
  std::string report = "sup";
  int samples = 41;
};

Output cmd_zhang(const ZhangArgs& a, const Settings&) {
  const auto base = parse_potential(a.base);
  const auto it = zhang_iterate(base, a.p, a.n);
  const auto lim = canonical(base.degree());
  const double sup = sup_distance(it, lim);
  const double base_sup = sup_distance(base, lim);
  const double bound = base_sup / std::pow(static_cast<double>(a.p), a.n);
  Output out;
  out.result = {{"base", a.base},
                {"p", a.p},
                {"n", a.n},
                {"label", it.label()},
                {"sup_distance", number(sup)},
                {"base_sup_distance", number(base_sup)},
                {"bound", number(bound)},
                {"err", number(1e-15 * (1.0 + base_sup))}};
  if (a.report == "sup") {
    out.csv_header = {"p", "n", "sup_distance", "bound"};
    out.csv_rows = {{std::to_string(a.p), std::to_string(a.n), fmt(sup), fmt(bound)}};
  } else if (a.report == "grid") {
    if (a.samples < 2) throw std::invalid_argument("--samples must be at least 2");
    json grid = json::array();
    out.csv_header = {"t", "phi", "canonical"};
    for (int i = 0; i < a.samples; ++i) {
      const double t = -10.0 + 20.0 * i / (a.samples - 1);
      grid.push_back({{"t", number(t)}, {"phi", number(it.value(t))}, {"canonical", number(lim.value(t))}});
      out.csv_rows.push_back({fmt(t), fmt(it.value(t)), fmt(lim.value(t))});
    }
    out.result["grid"] = grid;
  } else {
    throw std::invalid_argument("--report must be sup or grid");
  }
  out.checks.push_back(at_most("contraction", sup, bound * (1.0 + 1e-9) + 1e-15));
  return out;
}

struct CounterexampleArgs {
  double c = 1.0;
  std::vector<double> deltas{1e-2, 1e-3, 1e-4};
  std::string volume = "fs";
  double eps = 0.2;
  double gamma = 0.0;
  double glue = 0.0;
};

Output cmd_counterexample(const CounterexampleArgs& a, const Settings& s) {
  CounterexampleOptions o;
  o.eps = a.eps;
  o.gamma = a.gamma;
  o.glue = a.glue;
  o.convergence = s.convergence();
  o.quadrature = s.quadrature();
  o.jobs = s.jobs;
  const auto st = run_counterexample(a.c, a.deltas, parse_volume(a.volume), o);
  Output out;
  out.result = to_json(st);
  out.csv_header = {"delta",  "sup_distance",  "sup_bound",        "torsion", "torsion_limit", "gap",
                    "m_delta", "bound_printed", "bound_consistent", "energy",  "energy_oracle", "remainder",
                    "g0",      "g0_limit"};
  for (const auto& r : st.rows)
    out.csv_rows.push_back({fmt(r.delta), fmt(r.sup_distance), fmt(r.sup_bound), fmt(r.torsion), fmt(r.torsion_limit),
                            fmt(r.gap), fmt(r.m_delta), fmt(r.bound_printed), fmt(r.bound_consistent), fmt(r.energy),
                            fmt(r.energy_oracle), fmt(r.remainder), fmt(r.g0), fmt(r.g0_limit)});
  out.checks = {flag("sup_distance_to_zero", st.sup_to_zero),
                flag("printed_bound", st.printed_bound),
                flag("consistent_bound", st.consistent_bound),
                flag("torsion_not_converging", st.torsion_not_converging),
                flag("bounded", st.bounded),
                flag("energy_identity", st.energy_identity),
                flag("l2_converges", st.l2_converges)};
  return out;
}

struct ClosedFormArgs {
  std::vector<int> ms{0, 1, 2, 3, 4, 5};
  int levels = 30;
};

Output cmd_closed_form(const ClosedFormArgs& a, const Settings& s) {
  ClosedFormOptions o;
  o.levels = a.levels;
  o.limit = s.limit();
  const auto rows = run_closed_form(a.ms, o);
  Output out;
  out.result = {{"zeta_prime_minus_one", number(zeta_prime_minus_one())}, {"rows", json::array()}};
  out.csv_header = {"m",     "printed", "consistent", "direct",       "transfer", "limit", "limit_verdict",
                    "spread", "diff_printed", "diff_consistent"};
  for (const auto& r : rows) {
    out.result["rows"].push_back(to_json(r));
    out.csv_rows.push_back({std::to_string(r.m), fmt(r.printed), fmt(r.consistent), fmt(r.direct), fmt(r.transfer),
                            fmt(r.limit), to_string(r.limit_verdict), fmt(r.spread), fmt(r.diff_printed),
                            fmt(r.diff_consistent)});
    const auto m = std::to_string(r.m);
    out.checks.push_back(near("printed_m" + m, r.direct, r.printed, 1e-6));
    out.checks.push_back(near("consistent_m" + m, r.direct, r.consistent, 1e-6));
    out.checks.push_back(at_most("route_spread_m" + m, r.spread, 1e-6));
    if (a.levels > 0) out.checks.push_back(flag("limit_converged_m" + m, r.limit_verdict == Verdict::converged));
  }
  return out;
}

struct DoubleLimitArgs {
  DoubleLimitSpec spec;
};

Output cmd_double_limit(DoubleLimitArgs a, const Settings& s) {
  a.spec.limit = s.limit();
  a.spec.agreement = s.epsilon;
  const auto st = run_double_limit_study(a.spec);
  Output out;
  out.result = to_json(st);
  out.csv_header = {"scheme", "row", "col", "value"};
  auto dump = [&](const char* name, const LimitResult& r) {
    const auto& rep = r.report;
    const std::size_t nc = rep.column_parameters.size();
    for (std::size_t i = 0; i < rep.parameters.size(); ++i)
      for (std::size_t j = 0; j < nc; ++j)
        out.csv_rows.push_back({name, fmt(rep.parameters[i]), fmt(rep.column_parameters[j]), fmt(rep.at(i, j))});
  };
  dump("a", st.a);
  dump("b", st.b);
  out.checks.push_back(flag("a_converged", st.a.report.verdict == Verdict::converged));
  out.checks.push_back(flag("b_converged", st.b.report.verdict == Verdict::converged));
  out.checks.push_back(near("a_b_agreement", st.a.value, st.b.value, a.spec.agreement));
  if (st.expected) out.checks.push_back(near("closed_form_consistent", st.a.value, *st.expected, 1e-6));
  return out;
}

struct BtArgs {
  std::string family = "all";
  std::string test = "all";
  int m = 1;
  double threshold = 1e-7;
};

Output cmd_bt(const BtArgs& a, const Settings& s) {
  const auto cases = run_bedford_taylor_suite(a.m, a.threshold, s.quadrature(), s.jobs);
  Output out;
  out.result = {{"m", a.m}, {"threshold", number(a.threshold)}, {"cases", json::array()}};
  out.csv_header = {"family", "test_function", "parameter", "value", "distance", "sup_distance"};
  std::size_t kept = 0;
  for (const auto& c : cases) {
    if ((a.family != "all" && c.family != a.family) || (a.test != "all" && c.test_function != a.test)) continue;
    ++kept;
    out.result["cases"].push_back(to_json(c));
    const auto& rep = c.report;
    const std::vector<double>* sups = nullptr;
    for (const auto& [name, v] : rep.series)
      if (name == "sup_distance") sups = &v;
    for (std::size_t i = 0; i < rep.values.size(); ++i)
      out.csv_rows.push_back({c.family, c.test_function, fmt(rep.parameters[i]), fmt(rep.values[i]),
                              fmt(rep.distances[i]), sups ? fmt((*sups)[i]) : "nan"});
    out.checks.push_back(flag(c.family + "/" + c.test_function, c.passed));
  }
  if (kept == 0) throw std::invalid_argument("no Bedford-Taylor case matches --family/--test");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Quillen metrics and holomorphic analytic torsion on P^1 for S^1-invariant metrics.\n"
      "Option precedence: command-line flags > config file (--config or $QUILLEN_CONFIG, TOML) > defaults.\n"
      "Exit codes: 0 ok, 1 a --verify check failed, 2 usage error, 3 numerical failure."};
  app.fallthrough();
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; global keys at top level, command keys under [command]")
      ->envname("QUILLEN_CONFIG");

  Settings s;
  app.add_option("--format", s.format, "Output format")->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--output,-o", s.output, "Write output to this file instead of stdout");
  app.add_flag("--no-meta", s.no_meta, "Omit the meta block (timestamp, version) from JSON");
  app.add_flag("--verify", s.verify, "Run the acceptance checks for the command; exit 1 if any fails");
  app.add_option("--jobs,-j", s.jobs, "Worker threads for grid evaluations (0 = all cores)");
  app.add_option("--abs-tol", s.abs_tol, "Quadrature absolute tolerance")->check(CLI::PositiveNumber);
  app.add_option("--rel-tol", s.rel_tol, "Quadrature relative tolerance")->check(CLI::PositiveNumber);
  app.add_option("--epsilon", s.epsilon, "Convergence threshold on tail gaps")->check(CLI::PositiveNumber);
  app.add_option("--window", s.window, "Tail window K for convergence verdicts")->check(CLI::Range(2, 1000));

  std::function<Output()> run;
  std::string command;
  auto bind = [&](CLI::App* sub, std::function<Output()> f) {
    sub->callback([&, sub, f] {
      command = sub->get_name();
      run = f;
    });
  };

  TorsionArgs ta;
  auto* torsion_cmd = app.add_subcommand("torsion", "Holomorphic analytic torsion T((P^1, volume); (O(m), bundle))");
  torsion_cmd->add_option("--bundle", ta.bundle, "Metric family spec on O(m)");
  torsion_cmd->add_option("--volume", ta.volume, "Volume form: canonical, fs, fs-unit or a degree-2 family spec");
  torsion_cmd->add_option("--route", ta.route, "auto, spectral, anomaly-transfer, direct-integrable or limit");
  torsion_cmd->add_option("--levels", ta.levels, "Zhang levels per slot for the limit route")->check(CLI::Range(1, 60));
  bind(torsion_cmd, [&] { return cmd_torsion(ta, s); });

  PairArgs qa;
  auto* quillen_cmd = app.add_subcommand("quillen", "log of the Quillen metric of the monomial section wedge");
  quillen_cmd->add_option("--bundle", qa.bundle, "Metric family spec on O(m)");
  quillen_cmd->add_option("--volume", qa.volume, "Volume form spec");
  bind(quillen_cmd, [&] { return cmd_quillen(qa, s); });

  PairArgs ga{"canonical:1", "canonical"};
  auto* gram_cmd = app.add_subcommand("gram", "L2 Gram matrix of the monomial basis of H^0(O(m))");
  gram_cmd->add_option("--bundle", ga.bundle, "Metric family spec on O(m)");
  gram_cmd->add_option("--volume", ga.volume, "Volume form spec");
  bind(gram_cmd, [&] { return cmd_gram(ga, s); });

  AnomalyArgs aa;
  auto* anomaly_cmd = app.add_subcommand("anomaly", "Bundle or volume anomaly term");
  anomaly_cmd->add_option("--kind", aa.kind, "bundle or volume")->check(CLI::IsMember({"bundle", "volume"}));
  anomaly_cmd->add_option("--bundle", aa.bundle, "Metric on O(m)");
  anomaly_cmd->add_option("--bundle2", aa.bundle2, "Second metric on O(m) (default fs:m)");
  anomaly_cmd->add_option("--volume", aa.volume, "Volume form");
  anomaly_cmd->add_option("--volume2", aa.volume2, "Second volume form (volume kind)");
  bind(anomaly_cmd, [&] { return cmd_anomaly(aa, s); });

  ZhangArgs za;
  auto* zhang_cmd = app.add_subcommand("zhang", "Zhang iterate of a positive metric and its distance to the canonical one");
  zhang_cmd->add_option("--base", za.base, "Positive base metric spec");
  zhang_cmd->add_option("--p", za.p, "Zhang power")->check(CLI::Range(2, 64));
  zhang_cmd->add_option("--n", za.n, "Number of iterations")->check(CLI::Range(0, 60));
  zhang_cmd->add_option("--report", za.report, "sup or grid")->check(CLI::IsMember({"sup", "grid"}));
  zhang_cmd->add_option("--samples", za.samples, "Grid points on [-10, 10] for --report grid");
  bind(zhang_cmd, [&] { return cmd_zhang(za, s); });

  CounterexampleArgs ca;
  auto* cex_cmd = app.add_subcommand("counterexample", "Torsion gap for the non-positive family h_{c,delta}");
  cex_cmd->add_option("--c", ca.c, "Amplitude c")->check(CLI::PositiveNumber);
  cex_cmd->add_option("--deltas", ca.deltas, "Decreasing list of delta values")->delimiter(',');
  cex_cmd->add_option("--volume", ca.volume, "Volume form spec");
  cex_cmd->add_option("--eps", ca.eps, "Outer radius eps");
  cex_cmd->add_option("--gamma", ca.gamma, "Dip width gamma (0 = min(0.01, (eps - delta)/8))");
  cex_cmd->add_option("--glue", ca.glue, "Smoothing width (0 = min(delta, (eps - delta - gamma)/2))");
  bind(cex_cmd, [&] { return cmd_counterexample(ca, s); });

  ClosedFormArgs fa;
  auto* cf_cmd = app.add_subcommand("closed-form", "Canonical-metric torsion sweep against the closed form");
  cf_cmd->add_option("--ms", fa.ms, "Degrees m >= 0")->delimiter(',');
  cf_cmd->add_option("--levels", fa.levels, "Zhang levels for the limit route (0 skips it)")->check(CLI::Range(0, 60));
  bind(cf_cmd, [&] { return cmd_closed_form(fa, s); });

  DoubleLimitArgs da;
  auto* dl_cmd = app.add_subcommand("double-limit", "Generalized torsion limit for two choices of approximations");
  dl_cmd->add_option("--m", da.spec.m, "Degree of the bundle")->check(CLI::Range(0, 32));
  dl_cmd->add_option("--bundle-a", da.spec.bundle_a, "Scheme A for O(m)");
  dl_cmd->add_option("--volume-a", da.spec.volume_a, "Scheme A for TP^1");
  dl_cmd->add_option("--bundle-b", da.spec.bundle_b, "Scheme B for O(m)");
  dl_cmd->add_option("--volume-b", da.spec.volume_b, "Scheme B for TP^1");
  dl_cmd->add_option("--levels", da.spec.levels, "Indices per slot")->check(CLI::Range(1, 60));
  bind(dl_cmd, [&] { return cmd_double_limit(da, s); });

  BtArgs ba;
  auto* bt_cmd = app.add_subcommand("bt-check", "Weak convergence of c1 measures along positive families");
  bt_cmd->add_option("--family", ba.family, "all, zhang, mollified or lse");
  bt_cmd->add_option("--test", ba.test, "all, gaussian, bump or lorentzian");
  bt_cmd->add_option("--m", ba.m, "Degree")->check(CLI::Range(1, 32));
  bt_cmd->add_option("--threshold", ba.threshold, "Final distance threshold")->check(CLI::PositiveNumber);
  bind(bt_cmd, [&] { return cmd_bt(ba, s); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const Output out = run();
    emit(render(command, out, s), s);
    if (s.verify) {
      bool ok = true;
      for (const auto& c : out.checks) {
        if (!c.passed) {
          ok = false;
          std::cerr << "verify: FAIL " << c.name << " value=" << fmt(c.value) << " expected=" << fmt(c.expected)
                    << " tol=" << fmt(c.tolerance) << "\n";
        }
      }
      return ok ? 0 : 1;
    }
    return 0;
  } catch (const NumericalError& e) {
    json diag = {{"command", command}, {"error", {{"kind", "numerical"}, {"message", e.what()}}}};
    std::cout << diag.dump(2) << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
