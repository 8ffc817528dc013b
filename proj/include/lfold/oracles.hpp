#pragma once

// Independent reference computations. Each one takes a different route from
// the library code it is used to check.

#include <complex>
#include <cstdint>
#include <vector>

#include "eigenform.hpp"
#include "sieve.hpp"
#include "sym_decomp.hpp"

namespace lfold::oracle {

/// a(1..N) of q * prod_{n<=N} (1 - q^n)^24 by repeated multiplication with
/// (1 - q^n) on exact integers. Quadratic in N; meant for N up to ~10^3.
inline std::vector<BigInt> schoolbook_delta(std::size_t N) {
  std::vector<BigInt> poly(N, 0);  // powers q^0..q^{N-1}
  poly[0] = 1;
  for (std::size_t n = 1; n < N; ++n)
    for (int rep = 0; rep < 24; ++rep)
      for (std::size_t i = N - 1; i >= n; --i) poly[i] -= poly[i - n];
  std::vector<BigInt> a(N + 1, 0);
  for (std::size_t i = 0; i < N; ++i) a[i + 1] = poly[i];
  return a;
}

/// Coefficients t^0..t^R of prod_sigma (1 - alpha_sigma t)^{-1} over all 2^l
/// maps sigma: {1..l} -> {alpha, beta}, alpha = e^{i theta}, beta = e^{-i theta}.
inline std::vector<std::complex<double>> brute_force_local_series(unsigned ell, double theta, unsigned R) {
  std::vector<std::complex<double>> series(R + 1, 0.0);
  series[0] = 1.0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << ell); ++mask) {
    std::complex<double> param = 1.0;
    for (unsigned i = 0; i < ell; ++i) param *= std::polar(1.0, (mask >> i) & 1 ? -theta : theta);
    // multiply by the geometric series 1/(1 - param t)
    for (unsigned r = 1; r <= R; ++r) series[r] += param * series[r - 1];
  }
  return series;
}

/// sum_{d^m e = n} lambda(e^m), with lambda(e^m) assembled from lambda(p) by
/// the Hecke recursion on each prime power of e.
inline double sym_convolution(unsigned m, const EigenformTable& table, const SquarefreeSieve& sieve, std::uint64_t n) {
  double total = 0.0;
  for (std::uint64_t d = 1;; ++d) {
    std::uint64_t dm = 1;
    bool over = false;
    for (unsigned i = 0; i < m; ++i) {
      if (dm > n / d) {
        over = true;
        break;
      }
      dm *= d;
    }
    if (over || dm > n) break;
    if (n % dm) continue;
    double v = 1.0;
    for (const auto& pp : sieve.factorize(n / dm)) v *= lambda_prime_power(table.lambda(pp.p), m * pp.e);
    total += v;
  }
  return total;
}

/// #{n <= N squarefree} = sum_{d <= sqrt N} mu(d) floor(N / d^2).
inline std::uint64_t squarefree_count(std::uint64_t N) {
  std::int64_t total = 0;
  for (std::uint64_t d = 1; d * d <= N; ++d) {
    std::uint64_t x = d;
    int mu = 1;
    for (std::uint64_t p = 2; p * p <= x; ++p) {
      if (x % p) continue;
      x /= p;
      if (x % p == 0) {
        mu = 0;
        break;
      }
      mu = -mu;
    }
    if (mu != 0 && x > 1) mu = -mu;
    total += mu * static_cast<std::int64_t>(N / (d * d));
  }
  return static_cast<std::uint64_t>(total);
}

}  // namespace lfold::oracle
