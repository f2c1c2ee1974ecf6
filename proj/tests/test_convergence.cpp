#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "quillen/convergence.hpp"

using namespace quillen;

namespace {

std::vector<double> indices(std::size_t n) {
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<double>(i);
  return p;
}

}  // namespace

TEST(Convergence, GeometricSequenceConverges) {
  std::vector<double> v;
  for (int n = 0; n < 30; ++n) v.push_back(1.0 + std::ldexp(1.0, -n));
  const auto rep = single_sequence_report(indices(30), v, 1.0);
  EXPECT_EQ(rep.verdict, Verdict::converged);
  ASSERT_TRUE(rep.decay_rate.has_value());
  EXPECT_NEAR(*rep.decay_rate, -std::log(2.0), 1e-9);
  EXPECT_EQ(rep.monotone_from.value(), 0u);
  EXPECT_NEAR(rep.richardson.value(), 1.0, 1e-12);
}

TEST(Convergence, StalledSequenceDiverges) {
  std::vector<double> v;
  for (int n = 0; n < 20; ++n) v.push_back(2.0 + (n % 2 ? 1e-3 : -1e-3));
  const auto rep = single_sequence_report(indices(20), v, 1.0);
  EXPECT_EQ(rep.verdict, Verdict::diverged);
}

TEST(Convergence, SlowSequenceIsInconclusiveWithoutLimit) {
  std::vector<double> v;
  for (int n = 1; n <= 20; ++n) v.push_back(1.0 / n);
  const auto rep = single_sequence_report(indices(20), v, std::nullopt);
  EXPECT_EQ(rep.verdict, Verdict::inconclusive);
}

TEST(Convergence, ConstantDoubleSequenceConvergesImmediately) {
  const auto rep = double_sequence_report({0, 1, 2, 3}, {0, 1, 2, 3}, std::vector<double>(16, 0.25));
  EXPECT_EQ(rep.verdict, Verdict::converged);
  EXPECT_EQ(rep.limit.value(), 0.25);
  const auto one = double_sequence_report({0}, {0}, {0.5});
  EXPECT_EQ(one.verdict, Verdict::converged);
}

TEST(Convergence, DoubleSequenceWithDegenerateSide) {
  std::vector<double> vals;
  for (int j = 0; j < 12; ++j) vals.push_back(3.0 + std::ldexp(1.0, -4 * j));
  const auto rep = double_sequence_report({0}, indices(12), vals);
  EXPECT_EQ(rep.verdict, Verdict::converged);
  EXPECT_EQ(rep.limit.value(), vals.back());
}

TEST(Convergence, DoubleSequenceNeedsJointTail) {
  // v(i, j) = 1/(1 + i) only in rows: the column direction is constant, rows do not settle.
  std::vector<double> vals;
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) vals.push_back(1.0 / (1.0 + i));
  const auto rep = double_sequence_report(indices(8), indices(8), vals);
  EXPECT_NE(rep.verdict, Verdict::converged);
}

TEST(Convergence, ConvergedImpliesTailGapBelowEpsilon) {
  std::mt19937 rng(12345);
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double rate = 0.2 + 0.1 * (trial % 10);
    const double amp = std::pow(10.0, -(trial % 9));
    std::vector<double> v;
    for (int n = 0; n < 16; ++n) v.push_back(amp * std::exp(-rate * n) * noise(rng));
    ConvergenceOptions o;
    o.epsilon = 1e-6;
    const auto rep = single_sequence_report(indices(16), v, std::nullopt, o);
    if (rep.verdict == Verdict::converged) {
      EXPECT_LT(rep.max_tail_gap, o.epsilon);
    }
  }
}

TEST(Convergence, InvalidOptionsRejected) {
  ConvergenceOptions o;
  o.window = 1;
  EXPECT_THROW(single_sequence_report({0, 1}, {0, 1}, std::nullopt, o), std::invalid_argument);
  o.window = 4;
  o.epsilon = 0.0;
  EXPECT_THROW(single_sequence_report({0, 1}, {0, 1}, std::nullopt, o), std::invalid_argument);
  EXPECT_THROW(single_sequence_report({0, 1}, {0}, std::nullopt), std::invalid_argument);
  EXPECT_THROW(double_sequence_report({0, 1}, {0, 1}, {1.0}), std::invalid_argument);
}
