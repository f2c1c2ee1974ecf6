#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "quillen/cohomology.hpp"
#include "quillen/convergence.hpp"
#include "quillen/metrics.hpp"
#include "quillen/parallel.hpp"
#include "quillen/torsion.hpp"

namespace quillen {

// ---- closed forms ----

/// log((m+2)^(m+1) / ((m+1)!)^2), the Gram determinant of canonical(m) on omega_inf.
inline double canonical_log_gram(int m) {
  return (m + 1) * std::log(m + 2.0) - 2.0 * std::lgamma(m + 2.0);
}

/// The closed form as printed: 4 zeta'(-1) - 1/6 + log((m+2)^(m+1)/((m+1)!)^2).
inline double closed_form_printed(int m, double zeta_prime_m1 = zeta_prime_minus_one()) {
  return 4.0 * zeta_prime_m1 - 1.0 / 6.0 + canonical_log_gram(m);
}

/// The value the anomaly formulas give: the same constant with the opposite
/// sign on the logarithm, i.e. log h_Q(canonical(m), omega_inf) = 4 zeta'(-1) - 1/6
/// for every m.
inline double closed_form_consistent(int m, double zeta_prime_m1 = zeta_prime_minus_one()) {
  return 4.0 * zeta_prime_m1 - 1.0 / 6.0 - canonical_log_gram(m);
}

// ---- counterexample ----

/// -int_0^inf r f'(r)^2 dr for f_{c,delta}, exactly: the ramps give 2 c^2 and
/// each quintic glue piece gives s^2 w (r_a * 8/35 +- w * 13/210).
struct EnergyOracle {
  double ramps = 0.0;
  double remainder = 0.0;
  double energy() const { return -ramps - remainder; }
};

inline EnergyOracle counterexample_energy_oracle(CounterexampleParams p) {
  p = with_defaults(p);
  validate(p);
  const shape::Counterexample cx(p);
  const double s = p.c / std::sqrt(p.delta);
  const double w = p.glue;
  const auto& k = cx.knots;
  constexpr double h2 = 8.0 / 35.0, xh2 = 13.0 / 210.0;
  EnergyOracle o;
  // r dr integrated over the two ramps, times the squared slope
  o.ramps = s * s * 0.5 * ((k[2] * k[2] - k[1] * k[1]) + (k[6] * k[6] - k[5] * k[5]));
  o.remainder = s * s * w * ((k[1] * h2 - w * xh2) + (k[2] * h2 + w * xh2) + (k[5] * h2 - w * xh2) + (k[6] * h2 + w * xh2));
  return o;
}

struct CounterexampleRow {
  double delta = 0.0;
  double sup_distance = 0.0;
  double sup_bound = 0.0;
  double torsion = 0.0;
  double torsion_limit = 0.0;
  /// T(h_inf) - T(h_{c,delta}), the gap the bound is about.
  double gap = 0.0;
  double pairing_c1 = 0.0;   ///< int f c1(TP^1)
  double m_delta = 0.0;      ///< |int f c1(TP^1)| / (c sqrt(delta))
  double self_pairing = 0.0; ///< int f dd^c f
  double energy = 0.0;       ///< -int r f'^2 dr (quadrature)
  double energy_oracle = 0.0;
  double remainder = 0.0;    ///< -energy - 2 c^2 (quadrature)
  double remainder_oracle = 0.0;
  double g0 = 0.0;
  double g0_limit = 0.0;
  double bound_printed = 0.0;    ///< -2 c^2 + M sqrt(delta) c
  double bound_consistent = 0.0; ///< -c^2/2 + (M/2) sqrt(delta) c + sup(-f)
};

struct CounterexampleStudy {
  double c = 1.0;
  double measured_m = 0.0;
  std::vector<CounterexampleRow> rows;
  bool sup_to_zero = false;       ///< (a)
  bool printed_bound = false;     ///< (b) as printed
  bool consistent_bound = false;  ///< (b) with the calibrated coefficients
  bool torsion_not_converging = false;  ///< (c)
  bool bounded = false;           ///< -T(h_{c,delta}) <= M^2/8 - T(h_inf)
  bool energy_identity = false;   ///< energy = -2c^2 - remainder against the oracle
  bool l2_converges = false;
  ConvergenceReport gap_report;
  ConvergenceReport l2_report;
};

struct CounterexampleOptions {
  double eps = 0.2;
  double gamma = 0.0;  ///< 0: default min(0.01, (eps - delta)/8)
  double glue = 0.0;   ///< 0: default min(delta, (eps - delta - gamma)/2)
  double energy_tolerance = 1e-6;
  ConvergenceOptions convergence;
  QuadratureOptions quadrature;
  unsigned jobs = 0;
};

inline CounterexampleStudy run_counterexample(double c, const std::vector<double>& deltas, const VolumeForm& w,
                                              const CounterexampleOptions& opts = {}) {
  if (deltas.empty()) throw std::invalid_argument("run_counterexample: no deltas");
  for (std::size_t i = 1; i < deltas.size(); ++i)
    if (!(deltas[i] < deltas[i - 1])) throw std::invalid_argument("run_counterexample: deltas must decrease");
  std::vector<CounterexampleParams> params;
  for (double d : deltas) {
    CounterexampleParams p{c, d, opts.eps, opts.gamma, opts.glue};
    p = with_defaults(p);
    validate(p);
    params.push_back(p);
  }
  const auto& q = opts.quadrature;
  const auto h_inf = zero_potential();
  const auto limit = torsion(h_inf, w, Route::direct_integrable, q);
  const double g0_inf = gram(h_inf, w, q).entries[0];

  CounterexampleStudy study;
  study.c = c;
  study.rows = parallel_map(params.size(), opts.jobs, [&](std::size_t i) {
    const auto& p = params[i];
    const auto f = counterexample_potential(p);
    const auto fl = LineFunction::of(f);
    CounterexampleRow row;
    row.delta = p.delta;
    row.sup_distance = sup_distance(f, h_inf);
    row.sup_bound = 2.0 * c * std::sqrt(p.delta);
    row.torsion = torsion(f, w, Route::direct_integrable, q).value;
    row.torsion_limit = limit.value;
    row.gap = limit.value - row.torsion;
    row.pairing_c1 = pair(fl, w.potential(), q).value;
    row.m_delta = std::abs(row.pairing_c1) / (c * std::sqrt(p.delta));
    row.self_pairing = pair(fl, f, q).value;
    row.energy = radial_dirichlet_energy(f, q).value;
    const auto oracle = counterexample_energy_oracle(p);
    row.energy_oracle = oracle.energy();
    row.remainder = -row.energy - 2.0 * c * c;
    row.remainder_oracle = oracle.remainder;
    row.g0 = gram(f, w, q).entries[0];
    row.g0_limit = g0_inf;
    return row;
  });

  for (const auto& r : study.rows) study.measured_m = std::max(study.measured_m, r.m_delta);
  const double M = study.measured_m;
  study.sup_to_zero = study.printed_bound = study.consistent_bound = study.bounded = study.energy_identity = true;
  study.torsion_not_converging = true;
  std::vector<double> idx, gaps, g0s;
  for (std::size_t i = 0; i < study.rows.size(); ++i) {
    auto& r = study.rows[i];
    const auto& p = params[i];
    const double sd = std::sqrt(r.delta);
    const double dip = c / sd * p.glue * shape::GlueQuintic::max_value;  // sup of -f
    r.bound_printed = -2.0 * c * c + M * sd * c;
    r.bound_consistent = -0.5 * c * c + 0.5 * M * sd * c + dip;
    study.sup_to_zero = study.sup_to_zero && r.sup_distance <= r.sup_bound &&
                        (i == 0 || r.sup_distance < study.rows[i - 1].sup_distance);
    study.printed_bound = study.printed_bound && r.gap <= r.bound_printed;
    study.consistent_bound = study.consistent_bound && r.gap <= r.bound_consistent;
    study.bounded = study.bounded && r.gap <= M * M / 8.0;
    study.energy_identity = study.energy_identity && std::abs(r.energy - r.energy_oracle) <= opts.energy_tolerance &&
                            r.remainder > 0.0;
    // a gap bounded away from 0 by c^2/4 for every delta
    study.torsion_not_converging = study.torsion_not_converging && r.gap <= -0.25 * c * c;
    idx.push_back(static_cast<double>(i));
    gaps.push_back(r.gap);
    g0s.push_back(r.g0);
  }
  auto conv = opts.convergence;
  conv.window = std::max<std::size_t>(2, std::min(conv.window, study.rows.size()));
  study.gap_report = single_sequence_report(idx, gaps, 0.0, conv);
  study.torsion_not_converging = study.torsion_not_converging && study.gap_report.verdict != Verdict::converged;
  study.l2_report = single_sequence_report(idx, g0s, g0_inf, conv);
  // |g0 - g0_inf| <= g0_inf (e^{sup|f|} - 1) -> 0
  study.l2_converges = true;
  for (const auto& r : study.rows)
    study.l2_converges = study.l2_converges && std::abs(r.g0 - g0_inf) <= g0_inf * std::expm1(r.sup_distance) + 1e-12;
  return study;
}

// ---- closed-form sweep ----

struct ClosedFormRow {
  int m = 0;
  double printed = 0.0;
  double consistent = 0.0;
  double direct = 0.0;           ///< direct-integrable route
  double transfer = 0.0;         ///< anomaly transfer through an intermediate Zhang iterate
  double limit = 0.0;            ///< generalized limit (Zhang in both slots)
  Verdict limit_verdict = Verdict::inconclusive;
  double spread = 0.0;           ///< max - min over the three routes
  double diff_printed = 0.0;     ///< direct - printed
  double diff_consistent = 0.0;  ///< direct - consistent
};

struct ClosedFormOptions {
  /// Zhang indices 0..levels-1 in both slots of the generalized limit; 0 skips that route.
  int levels = 30;
  LimitOptions limit;
};

/// Zhang iterates (p = 2) of a base potential for n = 0..levels-1.
inline std::vector<RadialPotential> zhang_sequence(const RadialPotential& base, int levels) {
  std::vector<RadialPotential> out;
  for (int n = 0; n < levels; ++n) out.push_back(zhang_iterate(base, 2, n));
  return out;
}

inline std::vector<ClosedFormRow> run_closed_form(const std::vector<int>& ms, const ClosedFormOptions& opts = {}) {
  const double zp = zeta_prime_minus_one();
  const auto w = omega_inf();
  const auto& q = opts.limit.quadrature;
  std::vector<ClosedFormRow> rows;
  for (int m : ms) {
    if (m < 0) throw std::invalid_argument("run_closed_form: m must be >= 0");
    ClosedFormRow r;
    r.m = m;
    r.printed = closed_form_printed(m, zp);
    r.consistent = closed_form_consistent(m, zp);
    const auto can = canonical(m);
    r.direct = torsion(can, w, Route::direct_integrable, q).value;
    const double log_l2 = gram(can, w, q).log_det;
    r.transfer = quillen_via(can, {zhang_iterate(fubini_study(m), 2, 3)}, w, q) - log_l2;
    double lo = std::min(r.direct, r.transfer), hi = std::max(r.direct, r.transfer);
    if (opts.levels > 0) {
      DecomposedSequence bundle{zhang_sequence(fubini_study(m), opts.levels), {}, {}};
      DecomposedSequence volume{zhang_sequence(omega_fs().potential(), opts.levels), {}, {}};
      const auto lim = generalized_torsion_curve(bundle, volume, opts.limit);
      r.limit = lim.value;
      r.limit_verdict = lim.report.verdict;
      lo = std::min(lo, r.limit);
      hi = std::max(hi, r.limit);
    }
    r.spread = hi - lo;
    r.diff_printed = r.direct - r.printed;
    r.diff_consistent = r.direct - r.consistent;
    rows.push_back(r);
  }
  return rows;
}

// ---- double-limit study ----

/// Named approximation schemes for one slot of a double limit:
///   constant        the Fubini-Study metric for every index
///   zhang           Zhang iterates of Fubini-Study, n = index
///   zhang-split:k   E1 = O(d+k), E2 = O(k), both Zhang iterates of Fubini-Study
///   mollified       Gaussian-mollified max with eps = 3^-index
///   lse             log-sum-exp (slopes 0, 1/2, 1) with eps = 1/(index+1)^2
inline DecomposedSequence approximation_scheme(const std::string& name, int degree, int levels) {
  if (levels < 1) throw std::invalid_argument("approximation scheme needs at least one level");
  DecomposedSequence s;
  for (int n = 0; n < levels; ++n) s.parameters.push_back(n);
  // Fubini-Study base with the area-2 normalization on TP^1
  auto fs = [&](int d) { return d == 2 && degree == 2 ? omega_fs().potential() : fubini_study(d); };
  if (name == "constant") {
    s.positive.assign(levels, fs(degree));
  } else if (name == "zhang") {
    s.positive = zhang_sequence(fs(degree), levels);
  } else if (name.rfind("zhang-split:", 0) == 0) {
    const int k = std::stoi(name.substr(12));
    if (k < 1) throw std::invalid_argument("zhang-split needs k >= 1");
    s.positive = zhang_sequence(fubini_study(degree + k), levels);
    s.negative = zhang_sequence(fubini_study(k), levels);
  } else if (name == "mollified") {
    for (int n = 0; n < levels; ++n) s.positive.push_back(mollified_max(degree, std::pow(3.0, -n)));
  } else if (name == "lse") {
    for (int n = 0; n < levels; ++n) s.positive.push_back(log_sum_exp(degree, 1.0 / ((n + 1.0) * (n + 1.0))));
  } else {
    throw std::invalid_argument("unknown approximation scheme '" + name + "'");
  }
  return s;
}

struct DoubleLimitSpec {
  int m = 1;
  std::string bundle_a = "zhang";
  std::string volume_a = "zhang";
  std::string bundle_b = "zhang-split:1";
  std::string volume_b = "zhang-split:1";
  int levels = 28;
  LimitOptions limit;
  double agreement = 1e-6;
};

struct DoubleLimitStudy {
  LimitResult a;
  LimitResult b;
  double difference = 0.0;
  bool agree = false;
  /// Closed-form value when both schemes converge to (omega_inf, canonical(m)).
  std::optional<double> expected;
};

inline DoubleLimitStudy run_double_limit_study(const DoubleLimitSpec& spec) {
  auto run = [&](const std::string& bundle, const std::string& volume) {
    return generalized_torsion_curve(approximation_scheme(bundle, spec.m, spec.levels),
                                     approximation_scheme(volume, 2, spec.levels), spec.limit);
  };
  DoubleLimitStudy out;
  out.a = run(spec.bundle_a, spec.volume_a);
  out.b = run(spec.bundle_b, spec.volume_b);
  out.difference = out.a.value - out.b.value;
  out.agree = std::abs(out.difference) < spec.agreement && out.a.report.verdict == Verdict::converged &&
              out.b.report.verdict == Verdict::converged;
  auto to_canonical = [](const std::string& s) { return s != "constant"; };
  if (to_canonical(spec.bundle_a) && to_canonical(spec.volume_a) && to_canonical(spec.bundle_b) &&
      to_canonical(spec.volume_b))
    out.expected = closed_form_consistent(spec.m);
  return out;
}

// ---- Bedford-Taylor suite ----

struct NamedFunction {
  std::string name;
  LineFunction fn;
};

inline std::vector<NamedFunction> bedford_taylor_test_functions() {
  return {
      {"gaussian", {[](double t) { return std::exp(-t * t); }, {-6.0, -3.0, -1.0, 0.0, 1.0, 3.0, 6.0}}},
      {"bump",
       {[](double t) { return std::abs(t) < 1.0 ? std::exp(-1.0 / (1.0 - t * t)) : 0.0; },
        {-1.0, -0.9, -0.5, 0.0, 0.5, 0.9, 1.0}}},
      {"lorentzian",
       {[](double t) { return 1.0 / (1.0 + (t - 0.3) * (t - 0.3)); }, {-10.0, -2.0, -0.7, 0.3, 1.3, 2.3, 10.0}}},
  };
}

struct NamedSequence {
  std::string name;
  std::vector<RadialPotential> seq;
  std::vector<double> parameters;
};

/// Positive families converging uniformly to canonical(m).
inline std::vector<NamedSequence> bedford_taylor_families(int m) {
  std::vector<NamedSequence> out;
  NamedSequence z{"zhang", {}, {}}, g{"mollified", {}, {}}, l{"lse", {}, {}};
  for (int n = 0; n <= 16; ++n) {
    z.seq.push_back(zhang_iterate(fubini_study(m), 2, n));
    z.parameters.push_back(n);
  }
  for (int k = 0; k <= 12; ++k) {
    g.seq.push_back(mollified_max(m, std::pow(3.0, -k)));
    g.parameters.push_back(k);
  }
  for (int k = 0; k <= 160; k += 4) {
    l.seq.push_back(log_sum_exp(m, 1.0 / ((k + 1.0) * (k + 1.0))));
    l.parameters.push_back(k);
  }
  out.push_back(std::move(z));
  out.push_back(std::move(g));
  out.push_back(std::move(l));
  return out;
}

struct BedfordTaylorCase {
  std::string family;
  std::string test_function;
  ConvergenceReport report;
  /// Distances eventually non-increasing and the last one below the threshold.
  bool passed = false;
};

inline std::vector<BedfordTaylorCase> run_bedford_taylor_suite(int m = 1, double threshold = 1e-7,
                                                               const QuadratureOptions& q = {}, unsigned jobs = 0) {
  const auto families = bedford_taylor_families(m);
  const auto tests = bedford_taylor_test_functions();
  const auto lim = canonical(m);
  ConvergenceOptions conv;
  conv.epsilon = threshold;
  return parallel_map(families.size() * tests.size(), jobs, [&](std::size_t i) {
    const auto& fam = families[i / tests.size()];
    const auto& tf = tests[i % tests.size()];
    BedfordTaylorCase c;
    c.family = fam.name;
    c.test_function = tf.name;
    c.report = bedford_taylor_check(fam.seq, tf.fn, lim, conv, q, fam.parameters);
    const auto& d = c.report.distances;
    c.passed = c.report.monotone_from.has_value() && *c.report.monotone_from + 1 < d.size() && d.back() < threshold;
    return c;
  });
}

}  // namespace quillen
