#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "quillen/experiments.hpp"

using namespace quillen;

TEST(ClosedForm, PrintedAndConsistentForms) {
  const double zp = oracle::zeta_prime_m1();
  EXPECT_NEAR(closed_form_printed(1), 4 * zp - 1.0 / 6.0 + std::log(9.0 / 4.0), 1e-14);
  EXPECT_NEAR(closed_form_printed(0), 4 * zp - 1.0 / 6.0 + std::log(2.0), 1e-14);
  EXPECT_NEAR(closed_form_consistent(1), 4 * zp - 1.0 / 6.0 - std::log(9.0 / 4.0), 1e-14);
  EXPECT_NEAR(canonical_log_gram(3), std::log(std::pow(5.0, 4) / (24.0 * 24.0)), 1e-14);
}

TEST(ClosedForm, SweepWithoutLimitRoute) {
  ClosedFormOptions o;
  o.levels = 0;
  const auto rows = run_closed_form({0, 1, 2}, o);
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) {
    EXPECT_LT(std::abs(r.diff_consistent), 1e-9);
    EXPECT_LT(r.spread, 1e-8);
    EXPECT_NEAR(r.diff_printed, -2.0 * canonical_log_gram(r.m), 1e-9);
  }
  EXPECT_THROW(run_closed_form({-1}, o), std::invalid_argument);
}

TEST(Counterexample, EnergyOracleAgreesWithPolynomialMoments) {
  for (double delta : {1e-2, 1e-3, 1e-4}) {
    const auto p = with_defaults({1.0, delta, 0.2, 0.0, 0.0});
    const auto lib = counterexample_energy_oracle(p);
    const auto [ramps, glues] = oracle::counterexample_energy(p.c, p.delta, p.eps, p.glue);
    EXPECT_NEAR(lib.ramps, ramps, 1e-12);
    EXPECT_NEAR(lib.remainder, glues, 1e-12);
  }
}

TEST(Counterexample, StudyVerdicts) {
  CounterexampleOptions o;
  const auto st = run_counterexample(1.0, {1e-2, 1e-3, 1e-4}, omega_fs(), o);
  ASSERT_EQ(st.rows.size(), 3u);
  EXPECT_TRUE(st.sup_to_zero);
  EXPECT_TRUE(st.consistent_bound);
  EXPECT_TRUE(st.torsion_not_converging);
  EXPECT_TRUE(st.bounded);
  EXPECT_TRUE(st.energy_identity);
  EXPECT_TRUE(st.l2_converges);
  EXPECT_GT(st.measured_m, 0.0);
  for (const auto& r : st.rows) {
    EXPECT_LE(r.sup_distance, r.sup_bound);
    EXPECT_LE(r.gap, r.bound_consistent);
    EXPECT_NEAR(r.energy, r.energy_oracle, 1e-6);
    EXPECT_NEAR(r.energy, -2.0 - r.remainder_oracle, 1e-6);
    EXPECT_GT(r.remainder, 0.0);
  }
  EXPECT_THROW(run_counterexample(1.0, {1e-3, 1e-2}, omega_fs()), std::invalid_argument);
  EXPECT_THROW(run_counterexample(1.0, {}, omega_fs()), std::invalid_argument);
}

TEST(DoubleLimit, ConstantConstantConvergesImmediately) {
  DoubleLimitSpec s;
  s.bundle_a = s.volume_a = s.bundle_b = s.volume_b = "constant";
  s.levels = 4;
  const auto st = run_double_limit_study(s);
  EXPECT_EQ(st.a.report.verdict, Verdict::converged);
  EXPECT_EQ(st.a.report.max_tail_gap, 0.0);
  EXPECT_TRUE(st.agree);
  EXPECT_FALSE(st.expected.has_value());
}

TEST(DoubleLimit, SchemesAreRecognized) {
  EXPECT_EQ(approximation_scheme("zhang-split:2", 1, 3).negative.size(), 3u);
  EXPECT_EQ(approximation_scheme("zhang-split:2", 1, 3).at(0).degree(), 1);
  EXPECT_EQ(approximation_scheme("mollified", 2, 5).size(), 5u);
  EXPECT_THROW(approximation_scheme("nope", 1, 3), std::invalid_argument);
  EXPECT_THROW(approximation_scheme("zhang", 1, 0), std::invalid_argument);
}

TEST(BedfordTaylor, FamiliesAreUniformlyConvergentAndPositive) {
  for (const auto& fam : bedford_taylor_families(1)) {
    double prev = INFINITY;
    for (const auto& p : fam.seq) {
      EXPECT_TRUE(p.positive()) << fam.name;
      const double d = sup_distance(p, canonical(1));
      EXPECT_LE(d, prev + 1e-15) << fam.name;
      prev = d;
    }
    EXPECT_LT(prev, 1e-3) << fam.name;
  }
}
