#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "quillen/convergence.hpp"
#include "quillen/radial_geometry.hpp"

namespace quillen {

/// L^2 Gram data of the monomial basis 1, z, ..., z^m of H^0(P^1, O(m)).
/// Radial metrics make the basis orthogonal, so only the diagonal is kept.
struct GramData {
  int m = 0;
  std::vector<double> entries;
  std::vector<double> errors;
  double det = 1.0;
  double log_det = 0.0;
  /// Error estimate of log_det (sum of relative entry errors).
  double error = 0.0;
};

/// g_k = int |z^k|^2_h omega = int exp(k t - phi(t)) dnu_w(t).
inline GramData gram(const RadialPotential& p, const VolumeForm& w, const QuadratureOptions& q = {}) {
  if (p.degree() < 0)
    throw std::invalid_argument("gram: degree must be >= 0 (H^0(P^1, O(m)) = 0 for m < 0), got " +
                                std::to_string(p.degree()));
  GramData g;
  g.m = p.degree();
  const auto cuts = merge_breakpoints(p.breakpoints(), w.potential().breakpoints());
  for (int k = 0; k <= g.m; ++k) {
    const auto I = integrate_line(
        [&](double t) { return std::exp(k * t - p.value(t) + w.log_density(t)); }, cuts, q);
    if (!(I.value > 0.0)) throw NumericalError("gram: non-positive entry g_" + std::to_string(k));
    g.entries.push_back(I.value);
    g.errors.push_back(I.error);
    g.log_det += std::log(I.value);
    g.error += I.error / I.value;
  }
  g.det = std::exp(g.log_det);
  return g;
}

/// The L^2 metric of the monomial wedge z^0 ^ ... ^ z^m in det H^0.
inline double l2_det_metric(const GramData& g) {
  double det = 1.0;
  for (double e : g.entries) det *= e;
  return det;
}

/// Convergence of Gram determinants along a uniformly convergent sequence.
/// Adds the series `log_ratio`, `sandwich_bound` = (m+1) sup_distance and
/// `sandwich_ok` (1 when |log det_n - log det_inf| <= bound).
inline ConvergenceReport gram_convergence(const std::vector<RadialPotential>& seq, const RadialPotential& limit,
                                          const VolumeForm& w, const ConvergenceOptions& opts = {},
                                          const QuadratureOptions& q = {}, std::vector<double> parameters = {}) {
  if (parameters.empty())
    for (std::size_t i = 0; i < seq.size(); ++i) parameters.push_back(static_cast<double>(i));
  const GramData ginf = gram(limit, w, q);
  std::vector<double> dets, log_ratio, bound, ok;
  for (const auto& p : seq) {
    if (p.degree() != limit.degree()) throw std::invalid_argument("gram_convergence: degree mismatch");
    const GramData g = gram(p, w, q);
    dets.push_back(g.det);
    const double lr = g.log_det - ginf.log_det;
    const double b = (g.m + 1) * sup_distance(p, limit);
    log_ratio.push_back(lr);
    bound.push_back(b);
    ok.push_back(std::abs(lr) <= b + 1e-12 * (1 + std::abs(ginf.log_det)) ? 1.0 : 0.0);
  }
  auto rep = single_sequence_report(std::move(parameters), std::move(dets), ginf.det, opts);
  rep.series.emplace_back("log_ratio", std::move(log_ratio));
  rep.series.emplace_back("sandwich_bound", std::move(bound));
  rep.series.emplace_back("sandwich_ok", std::move(ok));
  return rep;
}

}  // namespace quillen
