#include <gtest/gtest.h>

#include "oracles.hpp"
#include "quillen/special_functions.hpp"
#include "quillen/torsion.hpp"

using namespace quillen;

TEST(SpecialFunctions, ZetaPrimeMinusOneMatchesGlaisher) {
  EXPECT_NEAR(zeta_prime_minus_one(), oracle::zeta_prime_m1(), 1e-12);
  EXPECT_NEAR(zeta_prime_minus_one(), -0.16542114370045092, 1e-15);
}

TEST(SpecialFunctions, HurwitzZetaAgainstGsl) {
  for (double s : {1.5, 2.0, 3.0, 7.0, 21.0})
    for (double a : {0.5, 1.0, 2.5, 13.0, 100.5}) {
      const double ref = gsl_sf_hzeta(s, a);
      EXPECT_NEAR(hurwitz_zeta(s, a), ref, 1e-13 * std::abs(ref)) << "s=" << s << " a=" << a;
    }
}

TEST(SpecialFunctions, DigammaAtHalfIntegersAgainstGsl) {
  for (double a : {0.5, 1.0, 1.5, 2.0, 4.5, 10.0})
    EXPECT_NEAR(digamma_half_integer(a), gsl_sf_psi(a), 1e-14) << a;
  EXPECT_THROW(digamma_half_integer(0.3), std::domain_error);
}

TEST(SpecialFunctions, HurwitzZetaPrimeAtMinusOne) {
  for (double a : {0.5, 1.0, 1.5, 2.0, 3.5, 5.0})
    EXPECT_NEAR(hurwitz_zeta_prime_minus_one(a), oracle::hurwitz_zeta_prime_m1(a), 1e-13) << a;
}

TEST(SpecialFunctions, FubiniStudyReferenceTorsionMatchesFrozenValues) {
  for (int m = 0; m < 7; ++m) EXPECT_NEAR(fs_reference_torsion(m), oracle::fs_zeta_prime_zero[m], 1e-10) << m;
}

TEST(SpecialFunctions, SpectralZetaAtZero) {
  for (int m = 0; m < 6; ++m) EXPECT_DOUBLE_EQ(fs_spectral_zeta_at_zero(m), -(m + 1.0) / 2.0 - 1.0 / 6.0);
}
