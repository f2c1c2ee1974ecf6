#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace quillen {

/// Raised when a quadrature or series fails to reach a usable accuracy.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct QuadratureOptions {
  /// Relative tolerance on the summed error estimate (relative to the L1 norm).
  double tolerance = 1e-12;
  /// Summed error estimates below this are accepted regardless.
  double absolute_tolerance = 1e-14;
  /// Caps the number of bisections at 2^min(max_depth, 12).
  unsigned max_depth = 20;
  /// An error estimate above this (relative to L1, plus the absolute floor) is
  /// treated as a failed integration.
  double failure_threshold = 1e-6;
};

struct Integral {
  double value = 0.0;
  double error = 0.0;

  Integral& operator+=(const Integral& other) {
    value += other.value;
    error += other.error;
    return *this;
  }
};

inline Integral operator+(Integral a, const Integral& b) { return a += b; }
inline Integral operator*(double s, Integral a) {
  a.value *= s;
  a.error *= std::abs(s);
  return a;
}

namespace detail {

using Kronrod = boost::math::quadrature::gauss_kronrod<double, 31>;

template <class F>
auto guarded(const F& f) {
  return [&f](double x) {
    const double y = f(x);
    if (!std::isfinite(y)) {
      std::ostringstream msg;
      msg << "non-finite integrand value at x=" << x;
      throw NumericalError(msg.str());
    }
    return y;
  };
}

struct Panel {
  int kind;  // 0: finite, 1: upper tail in u, -1: lower tail in u
  double a, b;
  double value, error, l1;
};

/// Globally adaptive Gauss-Kronrod over a set of panels: the panel with the
/// largest error estimate is bisected until the summed estimate is below
/// max(absolute_tolerance, tolerance * L1).
template <class G>
Integral adaptive(const G& g, std::vector<Panel> panels, const QuadratureOptions& opts) {
  // The affine map to [-1, 1] is done here: Boost reports the error estimate
  // of a single rule without the Jacobian of its own map.
  auto eval = [&g](Panel& p) {
    const double mid = 0.5 * (p.a + p.b), half = 0.5 * (p.b - p.a);
    auto h = [&g, k = p.kind, mid, half](double x) { return half * g(k, mid + half * x); };
    p.value = Kronrod::integrate(h, -1.0, 1.0, 0, 0.0, &p.error, &p.l1);
  };
  for (auto& p : panels) eval(p);
  const std::size_t max_panels = panels.size() + (std::size_t{1} << std::min(opts.max_depth, 12u));
  auto cmp = [](const Panel& x, const Panel& y) { return x.error < y.error; };
  std::make_heap(panels.begin(), panels.end(), cmp);
  while (true) {
    double value = 0, error = 0, l1 = 0;
    for (const auto& p : panels) {
      value += p.value;
      error += p.error;
      l1 += p.l1;
    }
    const bool done = error <= std::max(opts.absolute_tolerance, opts.tolerance * l1);
    const Panel& worst = panels.front();
    const double mid = 0.5 * (worst.a + worst.b);
    const bool splittable = mid > worst.a && mid < worst.b &&
                            (worst.b - worst.a) > 1e-14 * (1.0 + std::abs(mid)) && worst.error > 0.0;
    if (done || !splittable || panels.size() >= max_panels) {
      if (!std::isfinite(value) || !std::isfinite(error) ||
          error > opts.failure_threshold * l1 + opts.absolute_tolerance) {
        std::ostringstream msg;
        msg << "quadrature failed: value=" << value << " error=" << error << " L1=" << l1;
        throw NumericalError(msg.str());
      }
      return {value, error};
    }
    std::pop_heap(panels.begin(), panels.end(), cmp);
    Panel left = panels.back();
    panels.pop_back();
    Panel right = left;
    left.b = mid;
    right.a = mid;
    eval(left);
    eval(right);
    panels.push_back(left);
    std::push_heap(panels.begin(), panels.end(), cmp);
    panels.push_back(right);
    std::push_heap(panels.begin(), panels.end(), cmp);
  }
}

/// Integrand on the panels: tails are mapped from u in [0, 1) through
/// t = c + u / (1 - u) (upper) or t = c - u / (1 - u) (lower).
template <class F>
auto panel_integrand(const F& f, double lower_cut, double upper_cut) {
  return [&f, lower_cut, upper_cut](int kind, double x) {
    if (kind == 0) return f(x);
    if (x >= 1.0) return 0.0;
    const double r = 1.0 / (1.0 - x);
    const double s = x * r;
    const double t = kind > 0 ? upper_cut + s : lower_cut - s;
    const double y = f(t);
    return y == 0.0 ? 0.0 : y * r * r;
  };
}

}  // namespace detail

/// Adaptive Gauss-Kronrod on a finite interval.
template <class F>
Integral integrate_interval(const F& f, double a, double b, const QuadratureOptions& opts = {}) {
  if (a == b) return {};
  const auto g = detail::guarded(f);
  const auto h = detail::panel_integrand(g, a, b);
  return detail::adaptive(h, {{0, a, b, 0, 0, 0}}, opts);
}

/// Integral over [a, +inf).
template <class F>
Integral integrate_upper_tail(const F& f, double a, const QuadratureOptions& opts = {}) {
  const auto g = detail::guarded(f);
  const auto h = detail::panel_integrand(g, a, a);
  return detail::adaptive(h, {{1, 0.0, 1.0, 0, 0, 0}}, opts);
}

/// Integral over (-inf, b].
template <class F>
Integral integrate_lower_tail(const F& f, double b, const QuadratureOptions& opts = {}) {
  const auto g = detail::guarded(f);
  const auto h = detail::panel_integrand(g, b, b);
  return detail::adaptive(h, {{-1, 0.0, 1.0, 0, 0, 0}}, opts);
}

/// Integral over the whole real line, split at the given breakpoints. The
/// integrand must decay at both ends; breakpoints are where it has kinks or
/// fine structure.
template <class F>
Integral integrate_line(const F& f, std::span<const double> breakpoints,
                        const QuadratureOptions& opts = {}) {
  std::vector<double> cuts(breakpoints.begin(), breakpoints.end());
  cuts.erase(std::remove_if(cuts.begin(), cuts.end(), [](double x) { return !std::isfinite(x); }),
             cuts.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.empty()) cuts.push_back(0.0);

  std::vector<detail::Panel> panels;
  panels.push_back({-1, 0.0, 1.0, 0, 0, 0});
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) panels.push_back({0, cuts[i], cuts[i + 1], 0, 0, 0});
  panels.push_back({1, 0.0, 1.0, 0, 0, 0});
  const auto g = detail::guarded(f);
  const auto h = detail::panel_integrand(g, cuts.front(), cuts.back());
  return detail::adaptive(h, std::move(panels), opts);
}

template <class F>
Integral integrate_line(const F& f, const std::vector<double>& breakpoints,
                        const QuadratureOptions& opts = {}) {
  return integrate_line(f, std::span<const double>(breakpoints), opts);
}

}  // namespace quillen
