#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <memory>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace quillen {

/// Regularity of a potential on the t = log|z|^2 line.
enum class Regularity { smooth, continuous_piecewise, continuous };

inline const char* to_string(Regularity r) {
  switch (r) {
    case Regularity::smooth: return "smooth";
    case Regularity::continuous_piecewise: return "continuous-piecewise";
    case Regularity::continuous: return "continuous";
  }
  return "?";
}

inline Regularity worst(Regularity a, Regularity b) { return std::max(a, b); }

/// A point mass of a measure on the t-line.
struct Atom {
  double location = 0.0;
  double mass = 0.0;
};

/// Parameters of the compactly supported, non-positive degree-0 family. The
/// profile is defined in r = |z| and has linear ramps of slope +-c/sqrt(delta)
/// on [1-eps, 1-eps+delta] and [1+eps-delta, 1+eps], a plateau c*sqrt(delta)
/// around r = 1, and C^2 quintic glue of width `glue` at the four ramp ends.
struct CounterexampleParams {
  double c = 1.0;
  double delta = 0.01;
  double eps = 0.2;
  double gamma = 0.01;
  /// Non-positive means "use the default": min(delta, (eps-delta-gamma)/2).
  double glue = 0.0;
};

namespace shape {

/// Quintic Hermite profile on [0, 1]: H(0)=0, H'(0)=1, H''(0)=0, H=H'=H''=0 at 1.
struct GlueQuintic {
  static double value(double x) { return x * (1.0 + x * x * (-6.0 + x * (8.0 - 3.0 * x))); }
  static double d1(double x) { return 1.0 + x * x * (-18.0 + x * (32.0 - 15.0 * x)); }
  static double d2(double x) { return x * (-36.0 + x * (96.0 - 60.0 * x)); }
  /// max of H on [0, 1], attained at x = 1/3.
  static constexpr double max_value = 16.0 / 81.0;
};

struct Softplus {};   ///< log(1 + e^x)
struct Relu {};       ///< max(0, x)
struct Constant {};   ///< 1
struct GaussianRelu {};  ///< max(0, x) convolved with the standard normal density

/// log sum_j exp(a_j x); convex for any slopes.
struct LogSumExp {
  std::vector<double> slopes;
};

struct Counterexample {
  CounterexampleParams params;
  std::array<double, 8> knots{};  // r-knots, increasing

  explicit Counterexample(const CounterexampleParams& p) : params(p) {
    const double w = p.glue;
    knots = {1.0 - p.eps - w,   1.0 - p.eps,         1.0 - p.eps + p.delta, 1.0 - p.eps + p.delta + w,
             1.0 + p.eps - p.delta - w, 1.0 + p.eps - p.delta, 1.0 + p.eps,  1.0 + p.eps + w};
  }

  /// Returns (f, f', f'') in the r variable.
  std::array<double, 3> profile(double r) const {
    const double s = params.c / std::sqrt(params.delta);
    const double plateau = params.c * std::sqrt(params.delta);
    const double w = params.glue;
    const auto& k = knots;
    using H = GlueQuintic;
    if (r <= k[0] || r >= k[7]) return {0.0, 0.0, 0.0};
    if (r <= k[1]) {
      const double x = (k[1] - r) / w;
      return {-s * w * H::value(x), s * H::d1(x), -s / w * H::d2(x)};
    }
    if (r <= k[2]) return {s * (r - k[1]), s, 0.0};
    if (r <= k[3]) {
      const double x = (r - k[2]) / w;
      return {plateau + s * w * H::value(x), s * H::d1(x), s / w * H::d2(x)};
    }
    if (r <= k[4]) return {plateau, 0.0, 0.0};
    if (r <= k[5]) {
      const double x = (k[5] - r) / w;
      return {plateau + s * w * H::value(x), -s * H::d1(x), s / w * H::d2(x)};
    }
    if (r <= k[6]) return {s * (k[6] - r), -s, 0.0};
    const double x = (r - k[6]) / w;
    return {-s * w * H::value(x), -s * H::d1(x), -s / w * H::d2(x)};
  }
};

/// Monotone piecewise-cubic Hermite data, extended linearly with slope 0 to the
/// left and slope `right_slope` to the right. Declared kinks are nodes where
/// the left and right derivatives differ.
struct GridData {
  std::vector<double> t;
  std::vector<double> phi;
  std::vector<double> left_slope;   // derivative approaching node i from the left
  std::vector<double> right_slope;  // derivative leaving node i to the right
  std::vector<std::size_t> kink_nodes;
  double right_extension = 0.0;

  /// Returns (value, d1, d2).
  std::array<double, 3> eval(double x) const {
    const std::size_t n = t.size();
    if (x <= t.front()) return {phi.front(), 0.0, 0.0};
    if (x >= t.back()) return {phi.back() + right_extension * (x - t.back()), right_extension, 0.0};
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - t.begin()) - 1;
    const std::size_t j = std::min(i + 1, n - 1);
    const double h = t[j] - t[i];
    const double u = (x - t[i]) / h;
    const double y0 = phi[i], y1 = phi[j];
    const double m0 = right_slope[i] * h, m1 = left_slope[j] * h;
    const double u2 = u * u, u3 = u2 * u;
    const double value = (2 * u3 - 3 * u2 + 1) * y0 + (u3 - 2 * u2 + u) * m0 +
                         (-2 * u3 + 3 * u2) * y1 + (u3 - u2) * m1;
    const double d1 = ((6 * u2 - 6 * u) * y0 + (3 * u2 - 4 * u + 1) * m0 +
                       (-6 * u2 + 6 * u) * y1 + (3 * u2 - 2 * u) * m1) / h;
    const double d2 = ((12 * u - 6) * y0 + (6 * u - 4) * m0 + (-12 * u + 6) * y1 +
                       (6 * u - 2) * m1) / (h * h);
    return {value, d1, d2};
  }
};

struct Grid {
  std::shared_ptr<const GridData> data;
};

}  // namespace shape

using Shape = std::variant<shape::Softplus, shape::Relu, shape::Constant, shape::GaussianRelu,
                           shape::LogSumExp, shape::Counterexample, shape::Grid>;

namespace detail {

inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }
inline double logistic(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
inline double normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

struct ShapeJet {
  double value, d1, d2;
};

inline ShapeJet jet(const Shape& s, double x) {
  struct Visitor {
    double x;
    ShapeJet operator()(const shape::Softplus&) const {
      const double p = logistic(x);
      const double q = logistic(-x);
      return {softplus(x), p, p * q};
    }
    ShapeJet operator()(const shape::Relu&) const {
      return {std::max(0.0, x), x > 0 ? 1.0 : 0.0, 0.0};
    }
    ShapeJet operator()(const shape::Constant&) const { return {1.0, 0.0, 0.0}; }
    ShapeJet operator()(const shape::GaussianRelu&) const {
      const double cdf = normal_cdf(x);
      const double pdf = normal_pdf(x);
      return {x * cdf + pdf, cdf, pdf};
    }
    ShapeJet operator()(const shape::LogSumExp& l) const {
      double top = -INFINITY;
      for (double a : l.slopes) top = std::max(top, a * x);
      double z = 0.0, m1 = 0.0, m2 = 0.0;
      for (double a : l.slopes) {
        const double w = std::exp(a * x - top);
        z += w;
        m1 += a * w;
        m2 += a * a * w;
      }
      m1 /= z;
      m2 /= z;
      return {top + std::log(z), m1, std::max(0.0, m2 - m1 * m1)};
    }
    ShapeJet operator()(const shape::Counterexample& c) const {
      const double r = std::exp(0.5 * x);
      const auto [f, f1, f2] = c.profile(r);
      if (f1 == 0.0 && f2 == 0.0) return {f, 0.0, 0.0};  // r may be inf out here
      return {f, 0.5 * r * f1, 0.25 * r * r * f2 + 0.25 * r * f1};
    }
    ShapeJet operator()(const shape::Grid& g) const {
      const auto [v, d1, d2] = g.data->eval(x);
      return {v, d1, d2};
    }
  };
  return std::visit(Visitor{x}, s);
}

/// Slope jumps (kinks) of a shape in its own variable.
inline std::vector<Atom> shape_kinks(const Shape& s) {
  if (std::holds_alternative<shape::Relu>(s)) return {{0.0, 1.0}};
  if (const auto* g = std::get_if<shape::Grid>(&s)) {
    const auto& d = *g->data;
    std::vector<Atom> out;
    out.push_back({d.t.front(), d.right_slope.front()});
    for (std::size_t i : d.kink_nodes) out.push_back({d.t[i], d.right_slope[i] - d.left_slope[i]});
    out.push_back({d.t.back(), d.right_extension - d.left_slope.back()});
    return out;
  }
  return {};
}

/// Points in the shape's own variable where quadrature should split.
inline std::vector<double> shape_breakpoints(const Shape& s) {
  struct Visitor {
    std::vector<double> operator()(const shape::Softplus&) const {
      return {-36.0, -12.0, -4.0, -1.0, 0.0, 1.0, 4.0, 12.0, 36.0};
    }
    std::vector<double> operator()(const shape::Relu&) const { return {0.0}; }
    std::vector<double> operator()(const shape::Constant&) const { return {}; }
    std::vector<double> operator()(const shape::GaussianRelu&) const {
      return {-9.0, -4.0, -1.5, 0.0, 1.5, 4.0, 9.0};
    }
    std::vector<double> operator()(const shape::LogSumExp& l) const {
      // crossover points a_i x = a_j x only at 0; spread by the slope gaps
      std::vector<double> out{0.0};
      double gap = INFINITY;
      for (std::size_t i = 0; i < l.slopes.size(); ++i)
        for (std::size_t j = i + 1; j < l.slopes.size(); ++j)
          if (l.slopes[i] != l.slopes[j]) gap = std::min(gap, std::abs(l.slopes[i] - l.slopes[j]));
      if (std::isfinite(gap))
        for (double k : {1.0, 4.0, 12.0, 36.0}) {
          out.push_back(k / gap);
          out.push_back(-k / gap);
        }
      return out;
    }
    std::vector<double> operator()(const shape::Counterexample& c) const {
      std::vector<double> out;
      for (double r : c.knots) out.push_back(2.0 * std::log(r));
      return out;
    }
    std::vector<double> operator()(const shape::Grid& g) const { return g.data->t; }
  };
  return std::visit(Visitor{}, s);
}

}  // namespace detail

/// One summand of a potential: coef * S(scale * (t - shift)) / scale.
///
/// Rescaling t -> p t, phi -> phi / p (the Zhang step) multiplies `scale` by p
/// and divides `shift` by p; slopes, hence atom masses, are unchanged.
struct Term {
  double coef = 1.0;
  double scale = 1.0;
  double shift = 0.0;
  Shape shape = shape::Constant{};
};

/// S^1-invariant metric on O(m) over P^1, encoded by phi(t) = -log|1|^2_h,
/// t = log|z|^2, so that |z^k|^2_h = exp(k t - phi(t)).
class RadialPotential {
 public:
  RadialPotential() = default;
  RadialPotential(int degree, Regularity regularity, bool positive, std::vector<Term> terms,
                  std::string label = {})
      : degree_(degree),
        regularity_(regularity),
        positive_(positive),
        terms_(std::move(terms)),
        label_(std::move(label)) {}

  int degree() const { return degree_; }
  Regularity regularity() const { return regularity_; }
  bool positive() const { return positive_; }
  const std::vector<Term>& terms() const { return terms_; }
  const std::string& label() const { return label_; }

  double operator()(double t) const { return value(t); }

  double value(double t) const {
    double v = 0.0;
    for (const auto& term : terms_)
      v += term.coef * detail::jet(term.shape, term.scale * (t - term.shift)).value / term.scale;
    return v;
  }

  /// phi'(t); one-sided (right) at kinks.
  double slope(double t) const {
    double v = 0.0;
    for (const auto& term : terms_)
      v += term.coef * detail::jet(term.shape, term.scale * (t - term.shift)).d1;
    return v;
  }

  /// Absolutely continuous part of phi''(t).
  double curvature(double t) const {
    double v = 0.0;
    for (const auto& term : terms_)
      v += term.coef * term.scale * detail::jet(term.shape, term.scale * (t - term.shift)).d2;
    return v;
  }

  /// Slope jumps, merged by location.
  std::vector<Atom> atoms() const {
    std::vector<Atom> out;
    for (const auto& term : terms_) {
      for (const auto& k : detail::shape_kinks(term.shape)) {
        const double loc = k.location / term.scale + term.shift;
        auto it = std::find_if(out.begin(), out.end(),
                               [loc](const Atom& a) { return std::abs(a.location - loc) <= 1e-15 * (1 + std::abs(loc)); });
        if (it == out.end()) {
          out.push_back({loc, term.coef * k.mass});
        } else {
          it->mass += term.coef * k.mass;
        }
      }
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const Atom& a) { return a.mass == 0.0; }),
              out.end());
    std::sort(out.begin(), out.end(), [](const Atom& a, const Atom& b) { return a.location < b.location; });
    return out;
  }

  std::vector<double> breakpoints() const {
    std::vector<double> out;
    for (const auto& term : terms_)
      for (double x : detail::shape_breakpoints(term.shape)) out.push_back(x / term.scale + term.shift);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  bool is_flat() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const Term& t) {
      return std::holds_alternative<shape::Constant>(t.shape) || t.coef == 0.0;
    });
  }

 private:
  int degree_ = 0;
  Regularity regularity_ = Regularity::smooth;
  bool positive_ = true;
  std::vector<Term> terms_;
  std::string label_;
};

inline std::vector<double> merge_breakpoints(std::vector<double> a, const std::vector<double>& b) {
  a.insert(a.end(), b.begin(), b.end());
  std::sort(a.begin(), a.end());
  a.erase(std::unique(a.begin(), a.end()), a.end());
  return a;
}

}  // namespace quillen
