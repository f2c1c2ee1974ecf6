#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace quillen {

/// Glaisher-Kinkelin constant A, log A = 1/12 - zeta'(-1).
inline constexpr double glaisher_constant = 1.28242712910062263687534256886979172776768892732500;

namespace detail {

// B_2, B_4, ..., B_20
inline constexpr std::array<double, 10> bernoulli_even = {
    1.0 / 6.0,          -1.0 / 30.0,   1.0 / 42.0,        -1.0 / 30.0,       5.0 / 66.0,
    -691.0 / 2730.0,    7.0 / 6.0,     -3617.0 / 510.0,   43867.0 / 798.0,   -174611.0 / 330.0};

inline bool is_half_integer_or_integer(double a) {
  return std::abs(2.0 * a - std::round(2.0 * a)) < 1e-12;
}

}  // namespace detail

/// zeta'(-1) from the Euler-Maclaurin expansion of sum_{k<=N} k log k.
inline double zeta_prime_minus_one() {
  constexpr int n = 8;
  double sum = 0.0;
  for (int k = 2; k <= n; ++k) sum += k * std::log(static_cast<double>(k));
  const double nn = n;
  double log_a = sum - (nn * nn / 2.0 + nn / 2.0 + 1.0 / 12.0) * std::log(nn) + nn * nn / 4.0;
  // f(k) = k log k has f^{(2j-1)}(N) = -(2j-3)! / N^{2j-2} for j >= 2.
  double factorial_2j = 24.0;      // (2j)!
  double factorial_2j_m3 = 1.0;    // (2j-3)!
  double power = nn * nn;          // N^{2j-2}
  for (int j = 2; j <= 10; ++j) {
    log_a += detail::bernoulli_even[j - 1] * factorial_2j_m3 / (factorial_2j * power);
    factorial_2j *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    factorial_2j_m3 *= (2.0 * j - 2.0) * (2.0 * j - 1.0);
    power *= nn * nn;
  }
  return 1.0 / 12.0 - log_a;
}

/// Hurwitz zeta(s, a) for real s > 1, a > 0 (Euler-Maclaurin after shifting a).
inline double hurwitz_zeta(double s, double a) {
  if (!(s > 1.0) || !(a > 0.0)) throw std::domain_error("hurwitz_zeta: need s > 1 and a > 0");
  constexpr int shift = 24;
  double sum = 0.0;
  double x = a;
  int k = 0;
  for (; x < shift + s; ++k, x = a + k) sum += std::pow(x, -s);
  // tail from x = a + k
  sum += std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
  double rising = s;                 // s (s+1) ... (s+2j-2)
  double factorial = 2.0;            // (2j)!
  double xpow = std::pow(x, -s - 1.0);
  for (int j = 1; j <= 10; ++j) {
    const double term = detail::bernoulli_even[j - 1] / factorial * rising * xpow;
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    rising *= (s + 2.0 * j - 1.0) * (s + 2.0 * j);
    factorial *= (2.0 * j + 1.0) * (2.0 * j + 2.0);
    xpow /= x * x;
  }
  return sum;
}

/// Digamma at a positive integer or half-integer.
inline double digamma_half_integer(double a) {
  if (!(a > 0.0) || !detail::is_half_integer_or_integer(a))
    throw std::domain_error("digamma_half_integer: argument must be a positive (half-)integer");
  const bool half = std::abs(a - std::round(a)) > 0.25;
  double x = half ? 0.5 : 1.0;
  double value = half ? -std::numbers::egamma - 2.0 * std::numbers::ln2 : -std::numbers::egamma;
  for (; x < a - 0.25; x += 1.0) value += 1.0 / x;
  return value;
}

/// d/ds zeta(s, a) at s = -1, for a positive integer or half-integer; reduced
/// to zeta'(-1) through zeta'(-1, a+1) = zeta'(-1, a) + a log a.
inline double hurwitz_zeta_prime_minus_one(double a, double zeta_prime_m1 = zeta_prime_minus_one()) {
  if (!(a > 0.0) || !detail::is_half_integer_or_integer(a))
    throw std::domain_error("hurwitz_zeta_prime_minus_one: argument must be a positive (half-)integer");
  const bool half = std::abs(a - std::round(a)) > 0.25;
  double x = half ? 0.5 : 1.0;
  // zeta(s, 1/2) = (2^s - 1) zeta(s)
  double value = half ? -0.5 * zeta_prime_m1 - std::numbers::ln2 / 24.0 : zeta_prime_m1;
  for (; x < a - 0.25; x += 1.0) value += x * std::log(x);
  return value;
}

}  // namespace quillen
