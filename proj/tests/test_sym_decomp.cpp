#include <gtest/gtest.h>

#include <complex>
#include <numbers>
#include <random>

#include "lfold/sym_decomp.hpp"
#include "support.hpp"

using namespace lfold;
using lfold::testing::small_delta;

TEST(Binomial, DeltaExamples) {
  EXPECT_EQ(binomial_delta(3, 0), 1);
  EXPECT_EQ(binomial_delta(3, 1), 2);
  EXPECT_EQ(binomial_delta(4, 2), 2);
  EXPECT_EQ(binomial_delta(8, 4), 14);
  EXPECT_EQ(binomial(5, -1), 0);
  EXPECT_EQ(binomial(5, 6), 0);
  EXPECT_EQ(binomial(64, 32), BigInt("1832624140942590534"));
}

TEST(Binomial, DeltaDomain) {
  EXPECT_THROW(binomial_delta(0, 0), DomainError);
  EXPECT_THROW(binomial_delta(5, 3), DomainError);
  EXPECT_THROW(binomial_delta(5, -1), DomainError);
}

TEST(Binomial, MultiplicitiesCountDimensions) {
  // sum_n A_{l,n} (l - 2n + 1) = 2^l
  for (unsigned ell = 1; ell <= 30; ++ell) {
    const auto e = chebyshev_expansion(ell);
    BigInt dim = 0;
    for (std::size_t n = 0; n < e.coeffs.size(); ++n) dim += e.coeffs[n] * (e.sym_index(n) + 1);
    EXPECT_EQ(dim, BigInt(1) << ell) << ell;
  }
}

TEST(ChebyshevU, Examples) {
  EXPECT_DOUBLE_EQ(cheb_U(0, 0.123), 1.0);
  EXPECT_DOUBLE_EQ(cheb_U(2, 1.0), 3.0);
  const double th = 0.7;
  EXPECT_NEAR(cheb_U(3, std::cos(th)), std::sin(4 * th) / std::sin(th), 1e-12);
  for (unsigned m = 0; m <= 25; ++m) EXPECT_NEAR(cheb_U(m, -1.0), (m % 2 ? -1.0 : 1.0) * (m + 1), 1e-9);
}

TEST(ChebyshevU, ScaledPolynomialMatchesRecurrence) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2, 2);
  for (unsigned m = 0; m <= 15; ++m) {
    const auto poly = scaled_chebyshev_poly(m);
    for (int k = 0; k < 5; ++k) {
      const double x = u(rng);
      double v = 0, pw = 1;
      for (const auto& c : poly) {
        v += c.convert_to<double>() * pw;
        pw *= x;
      }
      EXPECT_NEAR(v, cheb_U(m, x / 2), 1e-9);
    }
  }
}

TEST(ChebyshevIdentity, Examples) {
  EXPECT_TRUE(verify_cheb_identity(1));
  EXPECT_TRUE(verify_cheb_identity(3));
  EXPECT_TRUE(verify_cheb_identity(12));
  const auto p3 = scaled_chebyshev_poly(3);
  EXPECT_EQ(p3, (IntPoly{0, -2, 0, 1}));
}

TEST(ChebyshevIdentity, HoldsForOneToTwenty) {
  for (unsigned ell = 1; ell <= 20; ++ell) EXPECT_TRUE(verify_cheb_identity(ell)) << ell;
  EXPECT_TRUE(verify_cheb_identity(64));
}

TEST(ChebyshevIdentity, NumericalOracle) {
  // x^l against sum A U_{l-2n}(x/2) at sample points, independent of the polynomial algebra.
  for (unsigned ell = 1; ell <= 12; ++ell) {
    const auto w = chebyshev_weights(ell);
    for (double x : {-1.9, -0.4, 0.0, 0.3, 1.7, 2.0}) {
      double rhs = 0;
      for (std::size_t n = 0; n < w.size(); ++n) rhs += w[n] * cheb_U(ell - 2 * static_cast<unsigned>(n), x / 2);
      EXPECT_NEAR(rhs, std::pow(x, ell), 1e-9 * std::max(1.0, std::pow(2.0, ell)));
    }
  }
}

TEST(ChebyshevIdentity, EvenIndexVariantOnlyAtTwo) {
  for (unsigned ell = 1; ell <= 20; ++ell) EXPECT_EQ(verify_even_index_variant(ell), ell == 2) << ell;
}

TEST(ChebyshevIdentity, DomainChecks) {
  EXPECT_THROW(verify_cheb_identity(0), DomainError);
  EXPECT_THROW(verify_cheb_identity(65), DomainError);
  EXPECT_THROW(verify_even_index_variant(65), DomainError);
}

TEST(SymPowerPrime, Examples) {
  const double th = 1.1;
  EXPECT_DOUBLE_EQ(sym_power_prime(0, th), 1.0);
  EXPECT_NEAR(sym_power_prime(1, th), 2 * std::cos(th), 1e-15);
  EXPECT_NEAR(sym_power_prime(2, std::numbers::pi / 2), -1.0, 1e-15);
  EXPECT_NEAR(sym_power_prime(5, 0.0), 6.0, 1e-15);
  EXPECT_NEAR(sym_power_prime(5, std::numbers::pi), -6.0, 1e-9);
}

TEST(SymPowerPrime, MatchesParameterSum) {
  for (unsigned m = 0; m <= 12; ++m)
    for (double th : {1e-10, 0.2, 1.0, 1.8, 3.0, std::numbers::pi - 1e-10}) {
      std::complex<double> s = 0;
      for (unsigned j = 0; j <= m; ++j) s += std::polar(1.0, (double(m) - 2.0 * j) * th);
      EXPECT_NEAR(sym_power_prime(m, th), s.real(), 1e-9) << m << " " << th;
      EXPECT_NEAR(s.imag(), 0.0, 1e-12);
    }
}

TEST(FcRel, DegenerateTables) {
  // lambda(2) = 0 and lambda(3) = 2, the theta = pi/2 and theta = 0 cases.
  const EigenformTable t(12, {0.0, 1.0, 0.0, 2.0}, std::nullopt);
  EXPECT_NEAR(fcrel_residual(3, t, 2), 0.0, 1e-15);
  EXPECT_NEAR(fcrel_residual(2, t, 3), 0.0, 1e-15);
  EXPECT_THROW(fcrel_residual(2, t, 5), IndexError);
}

TEST(FcRel, DeltaSmallPrimes) {
  const auto& t = small_delta().table;
  EXPECT_LT(std::abs(fcrel_residual(5, t, 2)), 1e-10);
  for (auto p : small_delta().sieve.primes()) {
    if (p > 2000) break;
    for (unsigned ell = 1; ell <= 12; ++ell) ASSERT_LT(std::abs(fcrel_residual(ell, t, p)), 1e-8) << p << " " << ell;
  }
}
