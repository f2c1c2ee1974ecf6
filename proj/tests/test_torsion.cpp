#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "quillen/experiments.hpp"
#include "quillen/torsion.hpp"

using namespace quillen;

namespace {

std::vector<RadialPotential> smooth_catalog(int m) {
  return {fubini_study(m), mollified_max(m, 0.3), log_sum_exp(m, 0.2), zhang_iterate(fubini_study(m), 2, 3),
          shifted(translated(fubini_study(m), 0.5), 0.2)};
}

std::vector<VolumeForm> smooth_volumes() {
  return {omega_fs(), omega_reference(), VolumeForm(mollified_max(2, 0.4), "mollified"),
          translated(omega_fs(), -0.7)};
}

}  // namespace

TEST(Torsion, SpectralRouteOnReference) {
  for (int m = 0; m < 7; ++m) {
    const auto r = torsion(fubini_study(m), omega_reference());
    EXPECT_EQ(r.route, Route::spectral);
    EXPECT_NEAR(r.value, oracle::fs_zeta_prime_zero[m], 1e-10);
    const auto direct = torsion(fubini_study(m), omega_reference(), Route::direct_integrable);
    EXPECT_NEAR(direct.value, r.value, 1e-12);
  }
  EXPECT_THROW(torsion(fubini_study(1), omega_fs(), Route::spectral), std::invalid_argument);
}

TEST(Torsion, RouteSelectionAndErrors) {
  EXPECT_EQ(torsion(mollified_max(1, 0.2), omega_fs()).route, Route::anomaly_transfer);
  EXPECT_EQ(torsion(canonical(1), omega_fs()).route, Route::direct_integrable);
  EXPECT_THROW(torsion(canonical(1), omega_fs(), Route::anomaly_transfer), std::invalid_argument);
  EXPECT_THROW(torsion(canonical(1), omega_fs(), Route::generalized_limit), std::invalid_argument);
  EXPECT_THROW(torsion(dual(fubini_study(1)), omega_fs()), std::invalid_argument);
  EXPECT_EQ(parse_route("limit"), Route::generalized_limit);
  EXPECT_EQ(parse_route("direct"), Route::direct_integrable);
  EXPECT_EQ(parse_route("anomaly"), Route::anomaly_transfer);
  EXPECT_THROW(parse_route("fast"), std::invalid_argument);
}

TEST(Torsion, ComponentsSumToValue) {
  const auto r = torsion(mollified_max(2, 0.1), omega_fs());
  double sum = 0.0;
  for (const auto& c : r.components) sum += c.value;
  EXPECT_NEAR(sum, r.value, 1e-12);
  EXPECT_GE(r.error, 0.0);
  EXPECT_LT(r.error, 1e-8);
}

TEST(Anomaly, QuillenDifferenceMatchesBundleAnomaly) {
  int pairs = 0;
  for (int m : {0, 1, 3}) {
    const auto cat = smooth_catalog(m);
    for (std::size_t i = 0; i < cat.size(); ++i)
      for (std::size_t j = i + 1; j < cat.size(); ++j) {
        const auto w = omega_fs();
        const double lhs = log_quillen(cat[i], w) - log_quillen(cat[j], w);
        EXPECT_NEAR(lhs, -bundle_anomaly(cat[i], cat[j], w).value, 1e-8) << cat[i].label() << " vs " << cat[j].label();
        ++pairs;
      }
  }
  EXPECT_GE(pairs, 5);
}

TEST(Anomaly, QuillenDifferenceMatchesVolumeAnomaly) {
  const auto vols = smooth_volumes();
  for (int m : {0, 2}) {
    const auto p = mollified_max(m, 0.25);
    for (std::size_t i = 0; i < vols.size(); ++i)
      for (std::size_t j = i + 1; j < vols.size(); ++j) {
        const double lhs = log_quillen(p, vols[i]) - log_quillen(p, vols[j]);
        EXPECT_NEAR(lhs, -volume_anomaly(p, vols[i], vols[j]).value, 1e-8);
      }
  }
}

TEST(Anomaly, Cocycle) {
  const auto cat = smooth_catalog(2);
  const auto w = omega_fs();
  for (std::size_t a = 0; a + 2 < cat.size(); ++a) {
    const auto &p1 = cat[a], &p2 = cat[a + 1], &p3 = cat[a + 2];
    const double lhs = bundle_anomaly(p1, p2, w).value + bundle_anomaly(p2, p3, w).value;
    EXPECT_NEAR(lhs, bundle_anomaly(p1, p3, w).value, 1e-9);
  }
  const auto vols = smooth_volumes();
  const auto p = log_sum_exp(1, 0.3);
  for (std::size_t a = 0; a + 2 < vols.size(); ++a) {
    const double lhs = volume_anomaly(p, vols[a], vols[a + 1]).value + volume_anomaly(p, vols[a + 1], vols[a + 2]).value;
    EXPECT_NEAR(lhs, volume_anomaly(p, vols[a], vols[a + 2]).value, 1e-9);
  }
}

TEST(Anomaly, Antisymmetry) {
  const auto w = omega_fs();
  const auto a = mollified_max(2, 0.2), b = canonical(2);
  EXPECT_NEAR(bundle_anomaly(a, b, w).value + bundle_anomaly(b, a, w).value, 0.0, 1e-10);
  EXPECT_NEAR(bundle_anomaly(a, a, w).value, 0.0, 1e-15);
  EXPECT_NEAR(volume_anomaly(a, w, omega_inf()).value + volume_anomaly(a, omega_inf(), w).value, 0.0, 1e-10);
  EXPECT_THROW(bundle_anomaly(a, fubini_study(1), w), std::invalid_argument);
}

TEST(Anomaly, ContributionsSum) {
  const auto t = bundle_anomaly(mollified_max(1, 0.2), fubini_study(1), omega_fs());
  ASSERT_EQ(t.contributions.size(), 2u);
  EXPECT_NEAR(t.contributions[0].value + t.contributions[1].value, t.value, 1e-15);
}

TEST(Invariance, ConstantRescalingOfTheBundle) {
  // h -> e^{-c} h leaves the Laplacian unchanged: T is invariant, log h_Q moves by -c (m+1).
  for (int m : {0, 1, 4})
    for (double c : {-1.3, 0.25, 2.0}) {
      const auto p = mollified_max(m, 0.3);
      const auto w = omega_fs();
      EXPECT_NEAR(torsion(shifted(p, c), w).value, torsion(p, w).value, 1e-10);
      EXPECT_NEAR(log_quillen(shifted(p, c), w) - log_quillen(p, w), -c * (m + 1), 1e-10);
    }
}

TEST(Invariance, ScalingOfTheKahlerForm) {
  // omega -> e^a omega scales the spectrum by e^-a, so zeta'(0) moves by a zeta(0).
  for (int m : {0, 1, 2, 5})
    for (double a : {-0.6, 0.3, 1.5}) {
      const auto w = omega_reference();
      const VolumeForm wa(shifted(w.potential(), -a));
      const double shift = torsion(fubini_study(m), wa).value - torsion(fubini_study(m), w).value;
      EXPECT_NEAR(shift, a * fs_spectral_zeta_at_zero(m), 1e-10) << "m=" << m << " a=" << a;
    }
}

TEST(Invariance, Isometry) {
  for (int m : {0, 1, 3})
    for (double l : {-1.1, 0.6}) {
      const auto p = log_sum_exp(m, 0.3);
      const auto w = omega_fs();
      const auto tp = translated(p, l);
      const auto tw = translated(w, l);
      EXPECT_NEAR(torsion(tp, tw).value, torsion(p, w).value, 1e-9);
      EXPECT_NEAR(log_quillen(tp, tw) - log_quillen(p, w), -l * m * (m + 1) / 2.0, 1e-9);
    }
}

TEST(Torsion, CanonicalMatchesSignConsistentClosedForm) {
  const double zp = oracle::zeta_prime_m1();
  for (int m = 0; m <= 5; ++m) {
    double fact = 1.0;
    for (int j = 2; j <= m + 1; ++j) fact *= j;
    const double log_gram = (m + 1) * std::log(m + 2.0) - 2 * std::log(fact);
    const double t = torsion(canonical(m), omega_inf(), Route::direct_integrable).value;
    EXPECT_NEAR(t, 4 * zp - 1.0 / 6.0 - log_gram, 1e-9) << m;
    EXPECT_NEAR(log_quillen(canonical(m), omega_inf()), 4 * zp - 1.0 / 6.0, 1e-9);
  }
}

TEST(Torsion, ChainThroughIntermediates) {
  const auto p = canonical(2);
  const auto w = omega_inf();
  const double direct = log_quillen(p, w);
  EXPECT_NEAR(quillen_via(p, {zhang_iterate(fubini_study(2), 2, 3)}, w), direct, 1e-9);
  EXPECT_NEAR(quillen_via(p, {mollified_max(2, 0.5), log_sum_exp(2, 0.1)}, w), direct, 1e-9);
}

TEST(GeneralizedLimit, RejectsNonPositiveFamilies) {
  const auto cex = counterexample_potential({1.0, 0.01, 0.2, 0.01, 0.0});
  std::vector<RadialPotential> bad{tensor(fubini_study(1), cex), fubini_study(1)};
  try {
    generalized_quillen_limit(bad, {zero_potential()}, omega_fs());
    FAIL() << "expected rejection";
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("positive"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("cex"), std::string::npos);
  }
  EXPECT_THROW(generalized_quillen_limit({canonical(1)}, {zero_potential()}, omega_fs()), std::invalid_argument);
  EXPECT_THROW(generalized_quillen_limit({}, {zero_potential()}, omega_fs()), std::invalid_argument);
  DecomposedSequence neg{{dual(fubini_study(1))}, {}, {}};
  DecomposedSequence vol{{omega_fs().potential()}, {}, {}};
  EXPECT_THROW(generalized_torsion_curve(neg, vol), std::invalid_argument);
}

TEST(GeneralizedLimit, ConstantSequencesConvergeImmediately) {
  const auto r = generalized_quillen_limit({fubini_study(1)}, {zero_potential()}, omega_fs());
  EXPECT_EQ(r.report.verdict, Verdict::converged);
  EXPECT_NEAR(r.value, log_quillen(fubini_study(1), omega_fs()), 1e-12);
}

TEST(GeneralizedLimit, ZhangReachesCanonical) {
  LimitOptions o;
  o.jobs = 2;
  const auto r = generalized_quillen_limit(zhang_sequence(fubini_study(1), 26), {zero_potential()}, omega_inf(), o);
  EXPECT_EQ(r.report.verdict, Verdict::converged);
  EXPECT_NEAR(r.value, log_quillen(canonical(1), omega_inf()), 1e-6);
}

TEST(GeneralizedLimit, ParallelEvaluationIsDeterministic) {
  LimitOptions a, b;
  a.jobs = 1;
  b.jobs = 4;
  const auto e1 = zhang_sequence(fubini_study(2), 6), e2 = zhang_sequence(fubini_study(1), 6);
  const auto ra = generalized_quillen_limit(e1, e2, omega_fs(), a);
  const auto rb = generalized_quillen_limit(e1, e2, omega_fs(), b);
  EXPECT_EQ(ra.report.values, rb.report.values);
}
