#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "quillen/potential.hpp"
#include "quillen/radial_geometry.hpp"

namespace quillen {

inline RadialPotential zero_potential() { return RadialPotential(0, Regularity::smooth, true, {}, "zero"); }

/// phi(t) = m log(1 + e^t).
inline RadialPotential fubini_study(int m) {
  std::vector<Term> terms;
  if (m != 0) terms.push_back({static_cast<double>(m), 1.0, 0.0, shape::Softplus{}});
  return RadialPotential(m, Regularity::smooth, m >= 0, std::move(terms), "fs:" + std::to_string(m));
}

/// phi(t) = m max(0, t); |s|_inf = |s| / max(|x0|, |x1|)^m.
inline RadialPotential canonical(int m) {
  std::vector<Term> terms;
  if (m != 0) terms.push_back({static_cast<double>(m), 1.0, 0.0, shape::Relu{}});
  return RadialPotential(m, m == 0 ? Regularity::smooth : Regularity::continuous_piecewise, m >= 0,
                         std::move(terms), "canonical:" + std::to_string(m));
}

/// Zhang's iteration phi_n(t) = p^-n phi(p^n t).
inline RadialPotential zhang_iterate(const RadialPotential& base, int p, int n) {
  if (p < 2) throw std::invalid_argument("zhang_iterate: p must be >= 2");
  if (n < 0) throw std::invalid_argument("zhang_iterate: n must be >= 0");
  if (!base.positive()) throw std::invalid_argument("zhang_iterate: base potential must be positive");
  const double factor = std::pow(static_cast<double>(p), n);
  if (!std::isfinite(factor) || factor > 1e300) throw std::invalid_argument("zhang_iterate: p^n overflows");
  std::vector<Term> terms = base.terms();
  for (auto& t : terms) {
    t.scale *= factor;
    t.shift /= factor;
  }
  return RadialPotential(base.degree(), base.regularity(), true, std::move(terms),
                         "zhang:base=" + base.label() + ",p=" + std::to_string(p) + ",n=" + std::to_string(n));
}

/// m eps G(t / eps), with G(x) = E[max(0, x + N(0,1))]: a smooth convex
/// approximation of m max(0, t) within m eps / sqrt(2 pi).
inline RadialPotential mollified_max(int m, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("mollified_max: eps must be positive");
  std::vector<Term> terms;
  if (m != 0) terms.push_back({static_cast<double>(m), 1.0 / eps, 0.0, shape::GaussianRelu{}});
  std::ostringstream label;
  label << "mollified:m=" << m << ",eps=" << eps;
  return RadialPotential(m, Regularity::smooth, m >= 0, std::move(terms), label.str());
}

/// m eps log sum_j exp(a_j t / eps) with slopes a_j spanning [0, 1].
inline RadialPotential log_sum_exp(int m, double eps, std::vector<double> slopes = {0.0, 0.5, 1.0}) {
  if (!(eps > 0.0)) throw std::invalid_argument("log_sum_exp: eps must be positive");
  if (slopes.empty()) throw std::invalid_argument("log_sum_exp: need at least one slope");
  const auto [lo, hi] = std::minmax_element(slopes.begin(), slopes.end());
  if (*lo != 0.0 || *hi != 1.0) throw std::invalid_argument("log_sum_exp: slopes must span exactly [0, 1]");
  std::vector<Term> terms;
  if (m != 0) terms.push_back({static_cast<double>(m), 1.0 / eps, 0.0, shape::LogSumExp{std::move(slopes)}});
  std::ostringstream label;
  label << "lse:m=" << m << ",eps=" << eps;
  return RadialPotential(m, Regularity::smooth, m >= 0, std::move(terms), label.str());
}

inline void validate(const CounterexampleParams& p) {
  if (!(p.c > 0.0)) throw std::invalid_argument("counterexample: c must be > 0");
  if (!(p.eps > 0.0 && p.eps < 0.5)) throw std::invalid_argument("counterexample: need 0 < eps < 0.5");
  if (!(p.delta > 0.0 && p.delta < p.eps / 4.0)) throw std::invalid_argument("counterexample: need 0 < delta < eps/4");
  if (!(p.gamma > 0.0 && p.gamma < (p.eps - p.delta) / 4.0))
    throw std::invalid_argument("counterexample: need 0 < gamma < (eps - delta)/4");
  if (p.glue > 0.0) {
    if (p.glue > p.eps - p.delta - p.gamma)
      throw std::invalid_argument("counterexample: glue width must not reach the plateau [1-gamma, 1+gamma]");
    if (p.glue > p.delta / shape::GlueQuintic::max_value)
      throw std::invalid_argument("counterexample: glue width too large for the 2 c sqrt(delta) sup bound");
    if (p.glue >= 1.0 - p.eps) throw std::invalid_argument("counterexample: glue width reaches r = 0");
  }
}

inline CounterexampleParams with_defaults(CounterexampleParams p) {
  if (p.gamma <= 0.0) p.gamma = std::min(0.01, (p.eps - p.delta) / 8.0);
  if (p.glue <= 0.0) p.glue = std::min(p.delta, (p.eps - p.delta - p.gamma) / 2.0);
  return p;
}

/// The degree-0, non-positive family f_{c,delta}: ramps of slope
/// +-c/sqrt(delta) in r, plateau c sqrt(delta) around |z| = 1, compact support.
inline RadialPotential counterexample_potential(CounterexampleParams params) {
  params = with_defaults(params);
  validate(params);
  std::ostringstream label;
  label << "cex:c=" << params.c << ",delta=" << params.delta << ",eps=" << params.eps << ",gamma=" << params.gamma;
  return RadialPotential(0, Regularity::smooth, false, {{1.0, 1.0, 0.0, shape::Counterexample(params)}},
                         label.str());
}

/// Tensor product of metrics: potentials and degrees add.
inline RadialPotential tensor(const RadialPotential& a, const RadialPotential& b) {
  std::vector<Term> terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return RadialPotential(a.degree() + b.degree(), worst(a.regularity(), b.regularity()),
                         a.positive() && b.positive(), std::move(terms), a.label() + "*" + b.label());
}

inline RadialPotential dual(const RadialPotential& a) {
  std::vector<Term> terms = a.terms();
  for (auto& t : terms) t.coef = -t.coef;
  const bool positive = a.degree() == 0 && a.is_flat();
  return RadialPotential(-a.degree(), a.regularity(), positive, std::move(terms), "dual(" + a.label() + ")");
}

/// phi + c, i.e. the metric multiplied by exp(-c).
inline RadialPotential shifted(const RadialPotential& a, double c) {
  std::vector<Term> terms = a.terms();
  terms.push_back({c, 1.0, 0.0, shape::Constant{}});
  std::ostringstream label;
  label << a.label() << "+" << c;
  return RadialPotential(a.degree(), a.regularity(), a.positive(), std::move(terms), label.str());
}

/// t -> phi(t + l): the pull-back under z -> lambda z with l = log |lambda|^2,
/// up to the frame change of z^k.
inline RadialPotential translated(const RadialPotential& a, double l) {
  std::vector<Term> terms = a.terms();
  for (auto& t : terms) t.shift -= l;
  std::ostringstream label;
  label << a.label() << "@" << l;
  return RadialPotential(a.degree(), a.regularity(), a.positive(), std::move(terms), label.str());
}

/// Volume form of z -> lambda z pulled back: psi(t + l) - l.
inline VolumeForm translated(const VolumeForm& w, double l) {
  return VolumeForm(shifted(translated(w.potential(), l), -l), w.label() + "@" + std::to_string(l));
}

// ---- volume forms ----

/// omega_inf = (i/2pi) dz dzbar / max(1, |z|^4), area 2.
inline VolumeForm omega_inf() { return VolumeForm(canonical(2), "canonical"); }

/// Fubini-Study form of total area 2 (the degree of TP^1).
inline VolumeForm omega_fs() { return VolumeForm(shifted(fubini_study(2), -std::log(2.0)), "fs"); }

/// Fubini-Study form of total area 1, (i/2pi) d dbar log(1 + |z|^2); the
/// reference spectrum lives here.
inline VolumeForm omega_reference() { return VolumeForm(fubini_study(2), "fs-unit"); }

// ---- sampled potentials ----

struct GridMetadata {
  int degree = 0;
  Regularity regularity = Regularity::continuous_piecewise;
  bool positive = false;
  std::vector<double> kinks;
};

namespace detail {

inline std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  std::vector<double> d(n, 0.0);
  if (n == 2) {
    d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
    return d;
  }
  std::vector<double> h(n - 1), del(n - 1);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = x[k + 1] - x[k];
    del[k] = (y[k + 1] - y[k]) / h[k];
  }
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (del[k - 1] * del[k] <= 0.0) continue;
    const double w1 = 2.0 * h[k] + h[k - 1], w2 = h[k] + 2.0 * h[k - 1];
    d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
  }
  auto end_slope = [](double h0, double h1, double m0, double m1) {
    double e = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if (std::signbit(e) != std::signbit(m0) || m0 == 0.0) return 0.0;
    if (std::signbit(m0) != std::signbit(m1) && std::abs(e) > 3.0 * std::abs(m0)) return 3.0 * m0;
    return e;
  };
  d[0] = end_slope(h[0], h[1], del[0], del[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
  return d;
}

}  // namespace detail

/// Monotone cubic (PCHIP) interpolant of (t, phi), split at declared kinks,
/// extended with slope 0 on the left and slope `degree` on the right.
inline RadialPotential grid_potential(std::vector<double> t, std::vector<double> phi, const GridMetadata& meta,
                                      std::string label = "grid") {
  if (t.size() != phi.size()) throw std::invalid_argument("grid: t and phi differ in length");
  if (t.size() < 3) throw std::invalid_argument("grid: need at least 3 points");
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (!std::isfinite(t[i]) || !std::isfinite(phi[i])) throw std::invalid_argument("grid: non-finite sample");
    if (i > 0 && !(t[i] > t[i - 1])) throw std::invalid_argument("grid: t must be strictly increasing");
  }
  auto data = std::make_shared<shape::GridData>();
  data->t = t;
  data->phi = phi;
  data->right_extension = meta.degree;
  data->left_slope.assign(t.size(), 0.0);
  data->right_slope.assign(t.size(), 0.0);
  for (double k : meta.kinks) {
    auto it = std::find_if(t.begin(), t.end(), [k](double x) { return std::abs(x - k) <= 1e-12 * (1 + std::abs(k)); });
    if (it == t.end()) throw std::invalid_argument("grid: declared kink is not a grid node");
    const auto idx = static_cast<std::size_t>(it - t.begin());
    if (idx > 0 && idx + 1 < t.size()) data->kink_nodes.push_back(idx);
  }
  std::sort(data->kink_nodes.begin(), data->kink_nodes.end());
  data->kink_nodes.erase(std::unique(data->kink_nodes.begin(), data->kink_nodes.end()), data->kink_nodes.end());

  std::vector<std::size_t> bounds{0};
  bounds.insert(bounds.end(), data->kink_nodes.begin(), data->kink_nodes.end());
  bounds.push_back(t.size() - 1);
  for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
    const std::size_t a = bounds[s], b = bounds[s + 1];
    std::vector<double> xs(t.begin() + a, t.begin() + b + 1), ys(phi.begin() + a, phi.begin() + b + 1);
    const auto d = detail::pchip_slopes(xs, ys);
    for (std::size_t i = a; i <= b; ++i) {
      if (i > a) data->left_slope[i] = d[i - a];
      if (i < b) data->right_slope[i] = d[i - a];
    }
  }
  data->left_slope.front() = 0.0;
  data->right_slope.back() = meta.degree;

  RadialPotential p(meta.degree, meta.regularity, meta.positive, {{1.0, 1.0, 0.0, shape::Grid{data}}},
                    std::move(label));
  if (meta.positive) {
    for (const auto& a : p.atoms())
      if (a.mass < -1e-12) throw std::invalid_argument("grid: declared positive but a slope jump is negative");
    for (std::size_t i = 0; i + 1 < t.size(); ++i)
      for (int k = 0; k <= 16; ++k) {
        const double x = t[i] + (t[i + 1] - t[i]) * k / 16.0;
        const auto [v, d1, d2] = data->eval(std::min(x, std::nextafter(t[i + 1], t[i])));
        if (d2 < -1e-9 * (1.0 + std::abs(d1)))
          throw std::invalid_argument("grid: declared positive but the interpolant is not convex near t=" +
                                      std::to_string(x));
      }
  }
  return p;
}

inline Regularity parse_regularity(const std::string& s) {
  if (s == "smooth") return Regularity::smooth;
  if (s == "continuous-piecewise") return Regularity::continuous_piecewise;
  if (s == "continuous") return Regularity::continuous;
  throw std::invalid_argument("unknown regularity '" + s + "'");
}

/// Reads `path` (CSV with header t,phi) and its sidecar `path` with extension
/// .json holding {degree, regularity, positive, kinks}.
inline RadialPotential load_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("grid: cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("grid: empty file " + path.string());
  line.erase(std::remove_if(line.begin(), line.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
             line.end());
  if (line != "t,phi") throw std::invalid_argument("grid: header must be 't,phi'");
  std::vector<double> t, phi;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream row(line);
    std::string a, b;
    if (!std::getline(row, a, ',') || !std::getline(row, b))
      throw std::invalid_argument("grid: malformed row '" + line + "'");
    try {
      t.push_back(std::stod(a));
      phi.push_back(std::stod(b));
    } catch (const std::exception&) {
      throw std::invalid_argument("grid: non-numeric row '" + line + "'");
    }
  }
  auto sidecar = path;
  sidecar.replace_extension(".json");
  std::ifstream js(sidecar);
  if (!js) throw std::invalid_argument("grid: missing sidecar " + sidecar.string());
  GridMetadata meta;
  try {
    const auto j = nlohmann::json::parse(js);
    meta.degree = j.at("degree").get<int>();
    meta.regularity = parse_regularity(j.value("regularity", std::string("continuous-piecewise")));
    meta.positive = j.value("positive", false);
    meta.kinks = j.value("kinks", std::vector<double>{});
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("grid: bad sidecar " + sidecar.string() + ": " + e.what());
  }
  return grid_potential(std::move(t), std::move(phi), meta, "grid:" + path.string());
}

// ---- family mini-language ----

enum class FamilyTag { zero, fs, canonical, zhang, counterexample, mollified, lse, grid };

struct MetricFamilyParams {
  FamilyTag tag = FamilyTag::fs;
  int degree = 0;
  std::string base;  // zhang: base family spec
  int p = 2;
  int n = 0;
  double eps = 0.0;  // mollified / lse width
  CounterexampleParams cex;
  std::string path;
};

namespace detail {

inline std::map<std::string, std::string> parse_kv(const std::string& body, const std::string& spec) {
  std::map<std::string, std::string> kv;
  std::size_t start = 0;
  while (start < body.size()) {
    const auto comma = body.find(',', start);
    const auto item = body.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("family spec '" + spec + "': expected key=value, got '" + item + "'");
    kv[item.substr(0, eq)] = item.substr(eq + 1);
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return kv;
}

inline double to_double(const std::string& s, const std::string& spec) {
  // strtod rather than stod: subnormal inputs are accepted, not out_of_range
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  const auto used = static_cast<std::size_t>(end - s.c_str());
  if (used != s.size() || s.empty() || !std::isfinite(v)) throw std::invalid_argument("family spec '" + spec + "': bad number '" + s + "'");
  return v;
}

inline int to_int(const std::string& s, const std::string& spec) {
  const double v = to_double(s, spec);
  if (v != std::round(v)) throw std::invalid_argument("family spec '" + spec + "': expected an integer, got '" + s + "'");
  return static_cast<int>(v);
}

}  // namespace detail

/// Parses `fs:m`, `canonical:m`, `zhang:base=fs:m,p=2,n=5`,
/// `cex:c=1,delta=0.01,eps=0.2,gamma=0.01[,glue=w]`, `mollified:m=1,eps=0.01`,
/// `lse:m=1,eps=0.1`, `grid:path.csv`, `zero`.
inline MetricFamilyParams parse_family(const std::string& spec) {
  MetricFamilyParams out;
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string body = colon == std::string::npos ? "" : spec.substr(colon + 1);
  auto need_body = [&] {
    if (body.empty()) throw std::invalid_argument("family spec '" + spec + "': missing parameters");
  };
  if (head == "zero") {
    out.tag = FamilyTag::zero;
  } else if (head == "fs" || head == "canonical") {
    need_body();
    out.tag = head == "fs" ? FamilyTag::fs : FamilyTag::canonical;
    out.degree = detail::to_int(body, spec);
  } else if (head == "zhang") {
    need_body();
    out.tag = FamilyTag::zhang;
    auto kv = detail::parse_kv(body, spec);
    if (!kv.count("base")) throw std::invalid_argument("family spec '" + spec + "': zhang needs base=");
    out.base = kv["base"];
    if (out.base.rfind("zhang", 0) == 0) throw std::invalid_argument("family spec '" + spec + "': nested zhang base");
    if (kv.count("p")) out.p = detail::to_int(kv["p"], spec);
    if (kv.count("n")) out.n = detail::to_int(kv["n"], spec);
    for (const auto& [k, v] : kv)
      if (k != "base" && k != "p" && k != "n") throw std::invalid_argument("family spec '" + spec + "': unknown key " + k);
  } else if (head == "cex") {
    out.tag = FamilyTag::counterexample;
    auto kv = detail::parse_kv(body, spec);
    out.cex.gamma = 0.0;
    for (const auto& [k, v] : kv) {
      const double x = detail::to_double(v, spec);
      if (k == "c") out.cex.c = x;
      else if (k == "delta") out.cex.delta = x;
      else if (k == "eps") out.cex.eps = x;
      else if (k == "gamma") out.cex.gamma = x;
      else if (k == "glue") out.cex.glue = x;
      else throw std::invalid_argument("family spec '" + spec + "': unknown key " + k);
    }
  } else if (head == "mollified" || head == "lse") {
    need_body();
    out.tag = head == "lse" ? FamilyTag::lse : FamilyTag::mollified;
    auto kv = detail::parse_kv(body, spec);
    if (!kv.count("m") || !kv.count("eps")) throw std::invalid_argument("family spec '" + spec + "': needs m= and eps=");
    out.degree = detail::to_int(kv["m"], spec);
    out.eps = detail::to_double(kv["eps"], spec);
  } else if (head == "grid") {
    need_body();
    out.tag = FamilyTag::grid;
    out.path = body;
  } else {
    throw std::invalid_argument("unknown metric family '" + head + "' in spec '" + spec + "'");
  }
  return out;
}

inline RadialPotential make_potential(const MetricFamilyParams& p) {
  switch (p.tag) {
    case FamilyTag::zero: return zero_potential();
    case FamilyTag::fs: return fubini_study(p.degree);
    case FamilyTag::canonical: return canonical(p.degree);
    case FamilyTag::zhang: return zhang_iterate(make_potential(parse_family(p.base)), p.p, p.n);
    case FamilyTag::counterexample: return counterexample_potential(p.cex);
    case FamilyTag::mollified: return mollified_max(p.degree, p.eps);
    case FamilyTag::lse: return log_sum_exp(p.degree, p.eps);
    case FamilyTag::grid: return load_grid(p.path);
  }
  throw std::logic_error("unhandled family tag");
}

inline RadialPotential parse_potential(const std::string& spec) { return make_potential(parse_family(spec)); }

/// `canonical` / `inf` (omega_inf), `fs` (area 2), `fs-unit` (area 1), or
/// any degree-2 family spec.
inline VolumeForm parse_volume(const std::string& spec) {
  if (spec == "canonical" || spec == "inf") return omega_inf();
  if (spec == "fs") return omega_fs();
  if (spec == "fs-unit") return omega_reference();
  auto psi = parse_potential(spec);
  if (psi.degree() != 2)
    throw std::invalid_argument("volume spec '" + spec + "' has degree " + std::to_string(psi.degree()) + ", need 2");
  return VolumeForm(std::move(psi), spec);
}

}  // namespace quillen
