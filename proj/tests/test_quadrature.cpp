#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "quillen/quadrature.hpp"

using namespace quillen;

TEST(Quadrature, GaussianOverTheLine) {
  const auto I = integrate_line([](double t) { return std::exp(-t * t); }, std::vector<double>{0.0});
  EXPECT_NEAR(I.value, std::sqrt(std::numbers::pi), 1e-13);
  EXPECT_LT(I.error, 1e-10);
}

TEST(Quadrature, KinkAtBreakpoint) {
  const auto I = integrate_line([](double t) { return std::abs(t) * std::exp(-t * t); }, std::vector<double>{0.0});
  EXPECT_NEAR(I.value, 1.0, 1e-13);
}

TEST(Quadrature, EndpointSingularity) {
  const auto I = integrate_interval([](double x) { return std::sqrt(x); }, 0.0, 1.0);
  EXPECT_NEAR(I.value, 2.0 / 3.0, 1e-10);
}

TEST(Quadrature, Tails) {
  EXPECT_NEAR(integrate_upper_tail([](double t) { return std::exp(-t); }, 0.0).value, 1.0, 1e-13);
  EXPECT_NEAR(integrate_lower_tail([](double t) { return std::exp(2 * t); }, 1.0).value, std::exp(2.0) / 2, 1e-12);
  // slowly decaying Cauchy tail
  EXPECT_NEAR(integrate_upper_tail([](double t) { return 1.0 / (1 + t * t); }, 0.0).value, std::numbers::pi / 2, 1e-10);
}

TEST(Quadrature, NarrowFeatureNeedsBreakpoints) {
  const double w = 1e-6;
  auto f = [w](double t) { return std::exp(-0.5 * (t - 3) * (t - 3) / (w * w)) / (w * std::sqrt(2 * std::numbers::pi)); };
  const auto I = integrate_line(f, std::vector<double>{3 - 10 * w, 3, 3 + 10 * w});
  // doubles near t = 3 resolve the width only to ~4e-10
  EXPECT_NEAR(I.value, 1.0, 1e-9);
  // without them the spike falls between nodes and is missed
  EXPECT_LT(integrate_line(f, std::vector<double>{0.0}).value, 0.5);
}

TEST(Quadrature, NonFiniteIntegrandIsANumericalError) {
  EXPECT_THROW(integrate_interval([](double x) { return 1.0 / (x - 0.5) + NAN; }, 0.0, 1.0), NumericalError);
  EXPECT_THROW(integrate_interval([](double x) { return std::log(x - 0.5); }, 0.0, 1.0), NumericalError);
}

TEST(Quadrature, OscillationBeyondBudgetFails) {
  QuadratureOptions q;
  q.max_depth = 2;
  q.failure_threshold = 1e-12;
  EXPECT_THROW(integrate_interval([](double x) { return std::sin(1e4 * x); }, 0.0, 1.0, q), NumericalError);
}

TEST(Quadrature, AbsoluteToleranceAcceptsTinyIntegrals) {
  const auto I = integrate_interval([](double x) { return 1e-30 * x; }, 0.0, 1.0);
  EXPECT_NEAR(I.value, 0.5e-30, 1e-40);
}

TEST(Quadrature, IntegralArithmetic) {
  Integral a{1.0, 0.1}, b{2.0, 0.2};
  const auto c = 2.0 * (a + b);
  EXPECT_DOUBLE_EQ(c.value, 6.0);
  EXPECT_NEAR(c.error, 0.6, 1e-15);
}

TEST(Quadrature, DeterministicAcrossCalls) {
  auto f = [](double t) { return std::exp(-std::abs(t)) * std::cos(t); };
  const auto a = integrate_line(f, std::vector<double>{0.0});
  const auto b = integrate_line(f, std::vector<double>{0.0});
  EXPECT_EQ(a.value, b.value);
  EXPECT_NEAR(a.value, 1.0, 1e-12);
}
