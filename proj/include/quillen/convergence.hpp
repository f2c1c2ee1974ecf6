#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace quillen {

enum class Verdict { converged, diverged, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::converged: return "converged";
    case Verdict::diverged: return "diverged";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

struct ConvergenceOptions {
  /// Tail window: the verdict looks at the last `window` indices.
  std::size_t window = 4;
  /// Declared threshold on the tail gap.
  double epsilon = 1e-6;
  /// Differences below this are treated as quadrature noise when judging
  /// monotonicity.
  double noise_floor = 1e-13;

  void validate() const {
    if (window < 2) throw std::invalid_argument("tail window must be at least 2");
    if (!(epsilon > 0.0)) throw std::invalid_argument("convergence epsilon must be positive");
    if (!(noise_floor >= 0.0)) throw std::invalid_argument("noise floor must be non-negative");
  }
};

/// Diagnostics for a single sequence (column_parameters empty, values indexed
/// like parameters) or a double sequence (values row-major over
/// parameters x column_parameters).
struct ConvergenceReport {
  std::vector<double> parameters;
  std::vector<double> column_parameters;
  std::vector<double> values;
  std::optional<double> limit;
  /// |value - limit| when a limit is known, per parameter (diagonal for grids).
  std::vector<double> distances;
  /// tail_gaps[N] = max |v - v'| over all entries with indices >= N.
  std::vector<double> tail_gaps;
  double max_tail_gap = 0.0;
  std::size_t window = 4;
  double epsilon = 1e-6;
  /// Slope of log(distance) (or log(tail gap)) per index, from a least-squares fit.
  std::optional<double> decay_rate;
  /// First index from which distances no longer increase.
  std::optional<std::size_t> monotone_from;
  Verdict verdict = Verdict::inconclusive;
  /// Aitken/Richardson extrapolation of the (diagonal) sequence, reported
  /// separately from the verdict.
  std::optional<double> richardson;
  /// Extra named per-index columns (sup distances, bounds, ...).
  std::vector<std::pair<std::string, std::vector<double>>> series;

  bool is_double() const { return !column_parameters.empty(); }

  double at(std::size_t i, std::size_t j) const { return values.at(i * column_parameters.size() + j); }
};

namespace detail {

inline std::optional<double> log_linear_slope(const std::vector<double>& x, const std::vector<double>& y,
                                              double floor) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(y[i] > floor)) continue;
    const double ly = std::log(y[i]);
    sx += x[i];
    sy += ly;
    sxx += x[i] * x[i];
    sxy += x[i] * ly;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

inline std::optional<std::size_t> monotone_start(const std::vector<double>& d, double noise) {
  if (d.empty()) return std::nullopt;
  std::size_t start = d.size() - 1;
  while (start > 0 && d[start] <= d[start - 1] + noise) --start;
  return start;
}

inline std::optional<double> aitken(const std::vector<double>& v) {
  if (v.size() < 3) return std::nullopt;
  const double a = v[v.size() - 3], b = v[v.size() - 2], c = v.back();
  const double denom = (c - b) - (b - a);
  if (denom == 0.0 || !std::isfinite(denom)) return c;
  const double r = c - (c - b) * (c - b) / denom;
  return std::isfinite(r) ? std::optional<double>(r) : std::nullopt;
}

}  // namespace detail

/// Report for a single sequence. With a known limit the verdict uses the
/// distances; otherwise it uses the Cauchy gap over the tail window.
inline ConvergenceReport single_sequence_report(std::vector<double> parameters, std::vector<double> values,
                                                std::optional<double> limit,
                                                const ConvergenceOptions& opts = {}) {
  opts.validate();
  if (parameters.size() != values.size())
    throw std::invalid_argument("parameters and values differ in length");
  ConvergenceReport rep;
  rep.window = opts.window;
  rep.epsilon = opts.epsilon;
  rep.limit = limit;
  const std::size_t n = values.size();
  rep.tail_gaps.assign(n, 0.0);
  for (std::size_t s = n; s-- > 0;) {
    double lo = values[s], hi = values[s];
    for (std::size_t i = s; i < n; ++i) {
      lo = std::min(lo, values[i]);
      hi = std::max(hi, values[i]);
    }
    rep.tail_gaps[s] = hi - lo;
  }
  if (limit) {
    rep.distances.reserve(n);
    for (double v : values) rep.distances.push_back(std::abs(v - *limit));
  }
  const auto& decay_source = limit ? rep.distances : rep.tail_gaps;
  rep.decay_rate = detail::log_linear_slope(parameters, decay_source, opts.noise_floor);
  rep.monotone_from = detail::monotone_start(decay_source, opts.noise_floor);
  rep.richardson = detail::aitken(values);

  if (n >= opts.window) {
    const std::size_t tail = n - opts.window;
    rep.max_tail_gap = rep.tail_gaps[tail];
    double tail_distance = 0.0;
    if (limit)
      for (std::size_t i = tail; i < n; ++i) tail_distance = std::max(tail_distance, rep.distances[i]);
    const bool small = rep.max_tail_gap < opts.epsilon && (!limit || tail_distance < opts.epsilon);
    if (small) {
      rep.verdict = Verdict::converged;
    } else if (limit) {
      // Distances that do not shrink over the tail mean no convergence to the limit.
      double tail_min = INFINITY;
      for (std::size_t i = tail; i < n; ++i) tail_min = std::min(tail_min, rep.distances[i]);
      const bool stalled = tail_min > 0.5 * rep.distances[tail] || rep.distances.back() >= 0.5 * rep.distances.front();
      rep.verdict = stalled && tail_min >= opts.epsilon ? Verdict::diverged : Verdict::inconclusive;
    } else {
      rep.verdict = Verdict::inconclusive;
    }
  }
  rep.parameters = std::move(parameters);
  rep.values = std::move(values);
  return rep;
}

/// Report for a double sequence v(i, j) (row-major). tail_gaps[N] is the
/// Cauchy gap over all (i, j) with i, j >= N, which is the definition of
/// convergence of a double sequence. A side of length 1 is a constant
/// sequence and is not truncated.
inline ConvergenceReport double_sequence_report(std::vector<double> rows, std::vector<double> cols,
                                                std::vector<double> values,
                                                const ConvergenceOptions& opts = {}) {
  opts.validate();
  const std::size_t nr = rows.size(), nc = cols.size();
  if (nr == 0 || nc == 0 || values.size() != nr * nc) throw std::invalid_argument("grid size mismatch");
  ConvergenceReport rep;
  rep.window = opts.window;
  rep.epsilon = opts.epsilon;
  const std::size_t n = std::max(nr, nc);
  auto cell = [&](std::size_t s, std::size_t len) { return std::min(s, len - 1); };
  rep.tail_gaps.assign(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t i = cell(s, nr); i < nr; ++i)
      for (std::size_t j = cell(s, nc); j < nc; ++j) {
        lo = std::min(lo, values[i * nc + j]);
        hi = std::max(hi, values[i * nc + j]);
      }
    rep.tail_gaps[s] = hi - lo;
  }
  std::vector<double> diag_params, diagonal;
  for (std::size_t s = 0; s < n; ++s) {
    diag_params.push_back(static_cast<double>(s));
    diagonal.push_back(values[cell(s, nr) * nc + cell(s, nc)]);
  }
  rep.limit = values.back();
  for (double v : diagonal) rep.distances.push_back(std::abs(v - *rep.limit));
  rep.decay_rate = detail::log_linear_slope(diag_params, rep.tail_gaps, opts.noise_floor);
  rep.monotone_from = detail::monotone_start(rep.tail_gaps, opts.noise_floor);
  rep.richardson = detail::aitken(diagonal);
  if (n == 1) {
    rep.verdict = Verdict::converged;
  } else if (n >= opts.window) {
    rep.max_tail_gap = rep.tail_gaps[n - opts.window];
    rep.verdict = rep.max_tail_gap < opts.epsilon ? Verdict::converged : Verdict::inconclusive;
  }
  rep.parameters = std::move(rows);
  rep.column_parameters = std::move(cols);
  rep.values = std::move(values);
  return rep;
}

}  // namespace quillen
