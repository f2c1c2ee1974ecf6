#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "quillen/cohomology.hpp"
#include "quillen/convergence.hpp"
#include "quillen/metrics.hpp"
#include "quillen/parallel.hpp"
#include "quillen/radial_geometry.hpp"
#include "quillen/special_functions.hpp"

namespace quillen {

enum class Route { spectral, anomaly_transfer, generalized_limit, direct_integrable };

inline const char* to_string(Route r) {
  switch (r) {
    case Route::spectral: return "spectral";
    case Route::anomaly_transfer: return "anomaly-transfer";
    case Route::generalized_limit: return "generalized-limit";
    case Route::direct_integrable: return "direct-integrable";
  }
  return "?";
}

inline Route parse_route(const std::string& s) {
  if (s == "spectral") return Route::spectral;
  if (s == "anomaly-transfer" || s == "anomaly") return Route::anomaly_transfer;
  if (s == "generalized-limit" || s == "limit") return Route::generalized_limit;
  if (s == "direct-integrable" || s == "direct") return Route::direct_integrable;
  throw std::invalid_argument("unknown route '" + s + "'");
}

struct Component {
  std::string label;
  double value = 0.0;
  double error = 0.0;
};

struct TorsionResult {
  double value = 0.0;
  Route route = Route::anomaly_transfer;
  /// Signed contributions; value is their sum.
  std::vector<Component> components;
  double error = 0.0;
};

enum class AnomalyKind { bundle, volume };

inline const char* to_string(AnomalyKind k) { return k == AnomalyKind::bundle ? "bundle" : "volume"; }

struct AnomalyTerm {
  AnomalyKind kind = AnomalyKind::bundle;
  double value = 0.0;
  double error = 0.0;
  /// "todd": the part paired with c1(TX) (or Td~), "chern": the part paired
  /// with c1 of the line bundle metrics.
  std::vector<Component> contributions;
};

// ---- reference torsion ----

/// zeta(0) of the Fubini-Study spectrum on O(m); T shifts by log(a) zeta(0)
/// when the Kahler form is multiplied by a.
inline double fs_spectral_zeta_at_zero(int m) { return -(m + 1) / 2.0 - 1.0 / 6.0; }

/// zeta'(0) of the (0,1)-form Laplacian of O(m) with the Fubini-Study metric
/// over P^1 with the area-1 Fubini-Study form: eigenvalues q(q+m+1) with
/// multiplicity 2q+m+1, q >= 1.
///
/// With b = (m+1)/2 and nu = q + b the eigenvalues are nu^2 - b^2; the
/// continuation is 4 zeta'(-1, 1+b) - 2 b^2 psi(1+b) plus the convergent sum
/// 2 sum_q nu (-log(1 - b^2/nu^2) - b^2/nu^2), whose tail is a Hurwitz series.
inline double fs_reference_torsion(int m) {
  if (m < 0) throw std::invalid_argument("fs_reference_torsion: m must be >= 0");
  const double b = (m + 1) / 2.0;
  const double b2 = b * b;
  double value = 4.0 * hurwitz_zeta_prime_minus_one(1.0 + b) - 2.0 * b2 * digamma_half_integer(1.0 + b);
  const int cutoff = 64 + 8 * (m + 1);
  double head = 0.0;
  for (int q = cutoff; q >= 1; --q) {
    const double nu = q + b;
    const double x = b2 / (nu * nu);
    head += 2.0 * nu * (-std::log1p(-x) - x);
  }
  double tail = 0.0;
  double bpow = b2;
  for (int j = 2; j <= 60; ++j) {
    bpow *= b2;
    const double term = 2.0 * bpow / j * hurwitz_zeta(2.0 * j - 1.0, cutoff + 1.0 + b);
    tail += term;
    if (std::abs(term) < 1e-18 * (1.0 + std::abs(tail))) break;
  }
  value += head + tail;
  if (!std::isfinite(value)) throw NumericalError("fs_reference_torsion: continuation failed");
  return value;
}

/// Reference data for O(m): Fubini-Study on both the bundle and P^1 (area 1).
struct Reference {
  int m = 0;
  double torsion = 0.0;
  GramData gram;
  double log_quillen() const { return torsion + gram.log_det; }
};

inline Reference reference(int m, const QuadratureOptions& q = {}) {
  return {m, fs_reference_torsion(m), gram(fubini_study(m), omega_reference(), q)};
}

// ---- anomalies ----

/// int ch~(L, h, h') Td(TX) on P^1 for h = exp(-phi), h' = exp(-phi2):
/// with f = log(h'/h) = phi - phi2,
///   f (1/2) c1(TX) + f (1/2) (c1(h) + c1(h')).
/// log h_Q(h) - log h_Q(h') = -bundle_anomaly(h, h').
inline AnomalyTerm bundle_anomaly(const RadialPotential& p, const RadialPotential& p2, const VolumeForm& w,
                                  const QuadratureOptions& q = {}) {
  if (p.degree() != p2.degree())
    throw std::invalid_argument("bundle_anomaly: degree mismatch (" + std::to_string(p.degree()) + " vs " +
                                std::to_string(p2.degree()) + ")");
  const auto f = LineFunction::difference(p, p2);
  const auto todd = 0.5 * pair(f, w.potential(), q);
  const auto chern = 0.5 * (pair(f, p, q) + pair(f, p2, q));
  AnomalyTerm a;
  a.kind = AnomalyKind::bundle;
  a.value = todd.value + chern.value;
  a.error = todd.error + chern.error;
  a.contributions = {{"todd", todd.value, todd.error}, {"chern", chern.value, chern.error}};
  return a;
}

/// int ch(L, h) Td~(TX, omega, omega') on P^1: with g = psi - psi2,
///   g (1/12) (c1(omega) + c1(omega')) + g (1/2) c1(h).
/// log h_Q(omega) - log h_Q(omega') = -volume_anomaly(h, omega, omega').
inline AnomalyTerm volume_anomaly(const RadialPotential& p, const VolumeForm& w, const VolumeForm& w2,
                                  const QuadratureOptions& q = {}) {
  const auto g = LineFunction::difference(w.potential(), w2.potential());
  const auto todd = (1.0 / 12.0) * (pair(g, w.potential(), q) + pair(g, w2.potential(), q));
  const auto chern = 0.5 * pair(g, p, q);
  AnomalyTerm a;
  a.kind = AnomalyKind::volume;
  a.value = todd.value + chern.value;
  a.error = todd.error + chern.error;
  a.contributions = {{"todd", todd.value, todd.error}, {"chern", chern.value, chern.error}};
  return a;
}

// ---- Quillen metric and torsion ----

namespace detail {

inline bool is_reference(const RadialPotential& p, const VolumeForm& w) {
  return p.label() == fubini_study(p.degree()).label() && w.label() == "fs-unit";
}

inline void require_cohomology_vanishing(const RadialPotential& p) {
  if (p.degree() < 0)
    throw std::invalid_argument("torsion/Quillen metric need m >= 0 so that H^1(P^1, O(m)) = 0; got m = " +
                                std::to_string(p.degree()));
}

}  // namespace detail

/// log h_Q of the monomial wedge, with its pieces.
struct QuillenValue {
  double log_quillen = 0.0;
  double log_l2 = 0.0;
  double error = 0.0;
  Reference ref;
  AnomalyTerm volume;
  AnomalyTerm bundle;
  GramData gram;
};

/// Transports the reference value: from (FS_m, omega_ref) to (FS_m, w) with
/// the volume anomaly, then to (p, w) with the bundle anomaly.
inline QuillenValue quillen_detailed(const RadialPotential& p, const VolumeForm& w, const Reference& ref,
                                     const QuadratureOptions& q = {}) {
  detail::require_cohomology_vanishing(p);
  if (ref.m != p.degree()) throw std::invalid_argument("quillen: reference degree mismatch");
  QuillenValue out;
  out.ref = ref;
  const auto fs = fubini_study(p.degree());
  out.volume = volume_anomaly(fs, w, omega_reference(), q);
  out.bundle = bundle_anomaly(p, fs, w, q);
  out.gram = gram(p, w, q);
  out.log_quillen = ref.log_quillen() - out.volume.value - out.bundle.value;
  out.log_l2 = out.gram.log_det;
  out.error = ref.gram.error + out.volume.error + out.bundle.error;
  return out;
}

inline QuillenValue quillen_detailed(const RadialPotential& p, const VolumeForm& w, const QuadratureOptions& q = {}) {
  detail::require_cohomology_vanishing(p);
  return quillen_detailed(p, w, reference(p.degree(), q), q);
}

/// log h_Q = log det Gram + T for the monomial wedge.
inline double log_quillen(const RadialPotential& p, const VolumeForm& w, const QuadratureOptions& q = {}) {
  return quillen_detailed(p, w, q).log_quillen;
}

inline TorsionResult torsion_from(const QuillenValue& v, Route route) {
  TorsionResult r;
  r.route = route;
  r.components = {{"reference_torsion", v.ref.torsion, 0.0},
                  {"volume_anomaly", -v.volume.value, v.volume.error},
                  {"bundle_anomaly", -v.bundle.value, v.bundle.error},
                  {"log_l2_ratio", v.ref.gram.log_det - v.gram.log_det, v.ref.gram.error + v.gram.error}};
  r.value = v.log_quillen - v.log_l2;
  r.error = v.error + v.gram.error;
  return r;
}

/// T((P^1, w); (O(m), p)). Route::spectral only applies to the reference pair
/// (fs:m, fs-unit); Route::anomaly_transfer needs smooth data; the
/// direct-integrable route uses the same formula with atoms in the pairings.
inline TorsionResult torsion(const RadialPotential& p, const VolumeForm& w, std::optional<Route> route = std::nullopt,
                             const QuadratureOptions& q = {}) {
  detail::require_cohomology_vanishing(p);
  const bool smooth = p.regularity() == Regularity::smooth && w.potential().regularity() == Regularity::smooth;
  if (!route) route = detail::is_reference(p, w) ? Route::spectral : smooth ? Route::anomaly_transfer : Route::direct_integrable;
  switch (*route) {
    case Route::spectral: {
      if (!detail::is_reference(p, w))
        throw std::invalid_argument("spectral route needs the reference pair (fs:m, fs-unit)");
      TorsionResult r;
      r.route = Route::spectral;
      r.value = fs_reference_torsion(p.degree());
      r.components = {{"reference_torsion", r.value, 0.0}};
      return r;
    }
    case Route::anomaly_transfer:
      if (!smooth)
        throw std::invalid_argument("anomaly-transfer route needs smooth metrics; use direct-integrable for '" +
                                    p.label() + "' on '" + w.label() + "'");
      return torsion_from(quillen_detailed(p, w, q), Route::anomaly_transfer);
    case Route::direct_integrable:
      return torsion_from(quillen_detailed(p, w, q), Route::direct_integrable);
    case Route::generalized_limit:
      throw std::invalid_argument("the generalized-limit route needs approximating sequences; use "
                                  "generalized_quillen_limit or generalized_torsion_curve");
  }
  throw std::logic_error("unhandled route");
}

/// log h_Q(p, w) reached from Fubini-Study through a chain of intermediate
/// metrics fs = c_0, c_1, ..., c_k, p, summing the bundle anomalies of each step.
inline double quillen_via(const RadialPotential& p, const std::vector<RadialPotential>& chain, const VolumeForm& w,
                          const QuadratureOptions& q = {}) {
  detail::require_cohomology_vanishing(p);
  const auto fs = fubini_study(p.degree());
  const auto ref = reference(p.degree(), q);
  double value = ref.log_quillen() - volume_anomaly(fs, w, omega_reference(), q).value;
  const RadialPotential* prev = &fs;
  for (const auto& c : chain) {
    value -= bundle_anomaly(c, *prev, w, q).value;
    prev = &c;
  }
  value -= bundle_anomaly(p, *prev, w, q).value;
  return value;
}

// ---- generalized limits ----

struct LimitOptions {
  ConvergenceOptions convergence;
  QuadratureOptions quadrature;
  /// 0 = hardware concurrency.
  unsigned jobs = 0;
};

struct LimitResult {
  double value = 0.0;
  ConvergenceReport report;
};

/// A sequence of metrics on E1 (x) E2^-1 given by positive smooth approximants
/// of E1 and E2. An empty `negative` means E2 is trivial with the flat metric.
struct DecomposedSequence {
  std::vector<RadialPotential> positive;
  std::vector<RadialPotential> negative;
  std::vector<double> parameters;

  std::size_t size() const { return positive.size(); }

  RadialPotential at(std::size_t i) const {
    return negative.empty() ? positive.at(i) : tensor(positive.at(i), dual(negative.at(i)));
  }
};

namespace detail {

inline void require_positive_smooth(const std::vector<RadialPotential>& seq, const std::string& what) {
  if (seq.empty()) throw std::invalid_argument(what + ": empty sequence");
  for (const auto& p : seq) {
    if (!p.positive())
      throw std::invalid_argument(
          what + ": '" + p.label() +
          "' is not positive. Generalized Quillen limits need positive approximants; uniform convergence alone does "
          "not control torsion (the counterexample family cex:c,delta converges uniformly to the trivial metric while "
          "its torsion does not)");
    if (p.regularity() != Regularity::smooth)
      throw std::invalid_argument(what + ": '" + p.label() + "' is not smooth");
    if (p.degree() != seq.front().degree()) throw std::invalid_argument(what + ": degrees differ along the sequence");
  }
}

inline std::vector<double> default_parameters(std::size_t n, const std::vector<double>& given) {
  if (!given.empty()) {
    if (given.size() != n) throw std::invalid_argument("parameter list length mismatch");
    return given;
  }
  std::vector<double> out(n);
  std::iota(out.begin(), out.end(), 0.0);
  return out;
}

}  // namespace detail

/// log h_Q at e1[n] (x) e2[k]^-1 over the full index grid (n, k), with a
/// double-sequence Cauchy report. The value is the grid corner; the Aitken
/// extrapolation of the diagonal is reported separately.
inline LimitResult generalized_quillen_limit(const std::vector<RadialPotential>& e1,
                                             const std::vector<RadialPotential>& e2, const VolumeForm& w,
                                             const LimitOptions& opts = {}, std::vector<double> e1_parameters = {},
                                             std::vector<double> e2_parameters = {}) {
  detail::require_positive_smooth(e1, "generalized_quillen_limit (E1)");
  detail::require_positive_smooth(e2, "generalized_quillen_limit (E2)");
  const int m = e1.front().degree() - e2.front().degree();
  if (m < 0) throw std::invalid_argument("generalized_quillen_limit: deg E1 - deg E2 must be >= 0");
  const auto ref = reference(m, opts.quadrature);
  const std::size_t nr = e1.size(), nc = e2.size();
  auto values = parallel_map(nr * nc, opts.jobs, [&](std::size_t idx) {
    const auto p = tensor(e1[idx / nc], dual(e2[idx % nc]));
    return quillen_detailed(p, w, ref, opts.quadrature).log_quillen;
  });
  LimitResult out;
  out.report = double_sequence_report(detail::default_parameters(nr, e1_parameters),
                                      detail::default_parameters(nc, e2_parameters), std::move(values),
                                      opts.convergence);
  out.value = *out.report.limit;
  return out;
}

/// T((P^1, omega_i); (O(m), h_j)) over the grid of volume index i and bundle
/// index j; both slots are given as positive decompositions.
inline LimitResult generalized_torsion_curve(const DecomposedSequence& bundle, const DecomposedSequence& volume,
                                             const LimitOptions& opts = {}) {
  detail::require_positive_smooth(bundle.positive, "generalized_torsion_curve (bundle E1)");
  if (!bundle.negative.empty()) {
    detail::require_positive_smooth(bundle.negative, "generalized_torsion_curve (bundle E2)");
    if (bundle.negative.size() != bundle.positive.size())
      throw std::invalid_argument("generalized_torsion_curve: bundle decomposition lengths differ");
  }
  detail::require_positive_smooth(volume.positive, "generalized_torsion_curve (TX G1)");
  if (!volume.negative.empty()) {
    detail::require_positive_smooth(volume.negative, "generalized_torsion_curve (TX G2)");
    if (volume.negative.size() != volume.positive.size())
      throw std::invalid_argument("generalized_torsion_curve: volume decomposition lengths differ");
  }
  const int m = bundle.at(0).degree();
  if (m < 0) throw std::invalid_argument("generalized_torsion_curve: bundle degree must be >= 0");
  if (volume.at(0).degree() != 2) throw std::invalid_argument("generalized_torsion_curve: TX slot must have degree 2");
  const auto ref = reference(m, opts.quadrature);
  const std::size_t nr = volume.size(), nc = bundle.size();
  std::vector<VolumeForm> forms;
  for (std::size_t i = 0; i < nr; ++i) forms.emplace_back(volume.at(i));
  std::vector<RadialPotential> metrics;
  for (std::size_t j = 0; j < nc; ++j) metrics.push_back(bundle.at(j));
  auto values = parallel_map(nr * nc, opts.jobs, [&](std::size_t idx) {
    const auto v = quillen_detailed(metrics[idx % nc], forms[idx / nc], ref, opts.quadrature);
    return v.log_quillen - v.log_l2;
  });
  LimitResult out;
  out.report = double_sequence_report(detail::default_parameters(nr, volume.parameters),
                                      detail::default_parameters(nc, bundle.parameters), std::move(values),
                                      opts.convergence);
  out.value = *out.report.limit;
  return out;
}

}  // namespace quillen
