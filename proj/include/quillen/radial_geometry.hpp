#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "quillen/convergence.hpp"
#include "quillen/potential.hpp"
#include "quillen/quadrature.hpp"

namespace quillen {

/// A real function on the t-line together with the points where quadrature
/// should split (kinks, narrow features).
struct LineFunction {
  std::function<double(double)> f;
  std::vector<double> breakpoints;

  double operator()(double t) const { return f(t); }

  static LineFunction of(const RadialPotential& p) {
    return {[p](double t) { return p.value(t); }, p.breakpoints()};
  }

  /// phi_a - phi_b, i.e. log(h_b / h_a) for metrics h = exp(-phi).
  static LineFunction difference(const RadialPotential& a, const RadialPotential& b) {
    return {[a, b](double t) { return a.value(t) - b.value(t); },
            merge_breakpoints(a.breakpoints(), b.breakpoints())};
  }

  static LineFunction constant(double c) {
    return {[c](double) { return c; }, {}};
  }
};

inline LineFunction operator*(double a, const LineFunction& g) {
  return {[a, f = g.f](double t) { return a * f(t); }, g.breakpoints};
}

inline LineFunction operator+(const LineFunction& a, const LineFunction& b) {
  return {[fa = a.f, fb = b.f](double t) { return fa(t) + fb(t); },
          merge_breakpoints(a.breakpoints, b.breakpoints)};
}

/// dd^c of a radial potential pushed to the t-line: atoms at kinks plus the
/// density phi''. With dd^c = (i / 2 pi) d dbar, dd^c max(0, t) is the unit
/// Dirac at t = 0 and the total mass is the degree.
struct RadialMeasure {
  std::vector<Atom> atoms;
  std::function<double(double)> density;
  std::vector<double> breakpoints;
  double total_mass = 0.0;
  double total_mass_error = 0.0;
  /// Mass of the negative part (atoms and density).
  double negative_mass = 0.0;
};

inline RadialMeasure c1_measure(const RadialPotential& p, const QuadratureOptions& q = {}) {
  RadialMeasure mu;
  mu.atoms = p.atoms();
  mu.density = [p](double t) { return p.curvature(t); };
  mu.breakpoints = p.breakpoints();
  for (const auto& a : mu.atoms) {
    mu.total_mass += a.mass;
    if (a.mass < 0) mu.negative_mass -= a.mass;
  }
  if (!p.is_flat()) {
    const auto dens = integrate_line(mu.density, mu.breakpoints, q);
    const auto neg = integrate_line([&](double t) { return std::max(0.0, -mu.density(t)); },
                                    mu.breakpoints, q);
    mu.total_mass += dens.value;
    mu.total_mass_error = dens.error;
    mu.negative_mass += neg.value;
  }
  return mu;
}

/// Integral of f against a radial measure.
inline Integral pair(const LineFunction& f, const RadialMeasure& mu, const QuadratureOptions& q = {}) {
  Integral out = integrate_line([&](double t) { return f(t) * mu.density(t); },
                                merge_breakpoints(f.breakpoints, mu.breakpoints), q);
  for (const auto& a : mu.atoms) out.value += a.mass * f(a.location);
  return out;
}

/// int f dd^c phi over P^1, without materializing the measure.
inline Integral pair(const LineFunction& f, const RadialPotential& p, const QuadratureOptions& q = {}) {
  Integral out;
  if (!p.is_flat())
    out = integrate_line([&](double t) { return f(t) * p.curvature(t); },
                         merge_breakpoints(f.breakpoints, p.breakpoints()), q);
  for (const auto& a : p.atoms()) out.value += a.mass * f(a.location);
  return out;
}

/// Area form on P^1 given by a metric on TP^1 (a degree-2 potential psi).
/// On the t-line its area measure is exp(t - psi(t)) dt.
class VolumeForm {
 public:
  VolumeForm() = default;
  explicit VolumeForm(RadialPotential psi, std::string label = {}) : psi_(std::move(psi)), label_(std::move(label)) {
    if (psi_.degree() != 2)
      throw std::invalid_argument("a volume form needs a degree-2 potential (TP^1 has degree 2), got degree " +
                                  std::to_string(psi_.degree()));
    if (label_.empty()) label_ = psi_.label();
  }

  const RadialPotential& potential() const { return psi_; }
  const std::string& label() const { return label_; }

  double log_density(double t) const { return t - psi_.value(t); }
  double density(double t) const { return std::exp(log_density(t)); }

 private:
  RadialPotential psi_;
  std::string label_;
};

/// int_{P^1} g omega, as a one-dimensional integral on the t-line.
inline Integral integrate_volume(const LineFunction& g, const VolumeForm& w, const QuadratureOptions& q = {}) {
  return integrate_line([&](double t) { return g(t) * w.density(t); },
                        merge_breakpoints(g.breakpoints, w.potential().breakpoints()), q);
}

/// Polar Dirichlet functional -int_0^inf r (df/dr)^2 dr of a degree-0
/// potential f (as a function of r = |z|). Equals 2 * pair(f, f).
inline Integral radial_dirichlet_energy(const RadialPotential& f, const QuadratureOptions& q = {}) {
  if (f.degree() != 0) throw std::invalid_argument("radial_dirichlet_energy: degree-0 potential required");
  // In t: r (df/dr)^2 dr = 2 phi'(t)^2 dt.
  auto out = integrate_line([&](double t) { const double s = f.slope(t); return -2.0 * s * s; },
                            f.breakpoints(), q);
  return out;
}

/// sup_t |a(t) - b(t)|, the uniform distance between the metrics. Samples
/// densely between breakpoints and geometrically into both tails, then
/// refines the best candidates with Brent's method.
inline double sup_distance(const RadialPotential& a, const RadialPotential& b) {
  if (a.degree() != b.degree())
    throw std::invalid_argument("sup_distance: degree mismatch (" + std::to_string(a.degree()) + " vs " +
                                std::to_string(b.degree()) + ")");
  auto gap = [&](double t) { return std::abs(a.value(t) - b.value(t)); };
  auto cuts = merge_breakpoints(a.breakpoints(), b.breakpoints());
  if (cuts.empty()) cuts.push_back(0.0);
  std::vector<double> ts;
  constexpr int per_interval = 48;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    for (int k = 0; k < per_interval; ++k)
      ts.push_back(cuts[i] + (cuts[i + 1] - cuts[i]) * k / per_interval);
  ts.push_back(cuts.back());
  for (int k = -12; k <= 14; ++k) {
    ts.push_back(cuts.front() - std::ldexp(1.0, k));
    ts.push_back(cuts.back() + std::ldexp(1.0, k));
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());

  std::vector<double> gs(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) gs[i] = gap(ts[i]);
  std::vector<std::size_t> order(ts.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  const std::size_t keep = std::min<std::size_t>(4, order.size());
  std::partial_sort(order.begin(), order.begin() + keep, order.end(),
                    [&](std::size_t x, std::size_t y) { return gs[x] > gs[y]; });
  double best = gs[order[0]];
  for (std::size_t r = 0; r < keep; ++r) {
    const std::size_t i = order[r];
    const double lo = ts[i == 0 ? 0 : i - 1];
    const double hi = ts[std::min(i + 1, ts.size() - 1)];
    if (!(hi > lo)) continue;
    const auto found = boost::math::tools::brent_find_minima([&](double t) { return -gap(t); }, lo, hi, 52);
    best = std::max(best, -found.second);
  }
  return best;
}

/// Bedford-Taylor check: pairings of a fixed test function against a
/// sequence of potentials, compared with the pairing against the limit.
inline ConvergenceReport bedford_taylor_check(const std::vector<RadialPotential>& seq, const LineFunction& test_fn,
                                              const RadialPotential& limit, const ConvergenceOptions& opts = {},
                                              const QuadratureOptions& q = {},
                                              std::vector<double> parameters = {}) {
  if (parameters.empty())
    for (std::size_t i = 0; i < seq.size(); ++i) parameters.push_back(static_cast<double>(i));
  std::vector<double> values, sups;
  values.reserve(seq.size());
  for (const auto& p : seq) {
    values.push_back(pair(test_fn, p, q).value);
    sups.push_back(sup_distance(p, limit));
  }
  const double target = pair(test_fn, limit, q).value;
  auto rep = single_sequence_report(std::move(parameters), std::move(values), target, opts);
  rep.series.emplace_back("sup_distance", std::move(sups));
  return rep;
}

}  // namespace quillen
