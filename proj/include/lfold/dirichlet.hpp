#pragma once

// Truncated Dirichlet series and Euler products for the squarefree moment
// generating functions, their symmetric-power factorization and the
// correction factors that make the factorization exact.
//
// Comparisons between a series and a product of series are done coefficient
// by coefficient on n <= N ("matched truncation"); tail bounds come from
// Rankin's trick applied to an explicit Euler-product majorant.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "eigenform.hpp"
#include "error.hpp"
#include "local_factors.hpp"
#include "sieve.hpp"
#include "sym_decomp.hpp"

namespace lfold {

using Complex = std::complex<double>;

struct TruncatedSeries {
  Complex s;
  std::uint64_t cutoff = 0;  // N for series, P for Euler products
  Complex value;
  double tail_bound = 0.0;
};

/// Pole order of L_l at s = 1 for even l: (2/(l+2)) C(l, l/2).
inline long pole_order(unsigned ell) {
  if (ell < 2 || ell % 2) throw DomainError("pole_order: l must be even and >= 2");
  BigInt v = 2 * binomial(ell, ell / 2) / (ell + 2);
  return v.convert_to<long>();
}

// ---------------------------------------------------------------------------
// Tail bounds

namespace detail {

inline const std::vector<std::uint32_t>& small_primes() {
  static const std::vector<std::uint32_t> primes = SquarefreeSieve(100'000).primes();
  return primes;
}

inline Complex power_minus_s(std::uint64_t n, Complex s) { return std::exp(-s * std::log(static_cast<double>(n))); }

}  // namespace detail

/// Euler-product majorant of a nonnegative multiplicative g: log M_p(x) is the
/// log of sum_r g(p^r) x^r, and log M_p(x) <= growth * x / (1 - x) for all p.
struct Majorant {
  std::function<double(double)> log_local;
  double growth;
};

/// Squarefree support, |c(p)| <= K.
inline Majorant squarefree_majorant(double K) {
  return {[K](double x) { return std::log1p(K * x); }, K};
}
/// Degree-K Euler product with unit parameters: coefficients of (1-x)^{-K}.
inline Majorant full_majorant(double K) {
  return {[K](double x) { return -K * std::log1p(-x); }, K};
}
/// Product of a degree-K series with its correction factor:
/// (1-x)^{-K} (1+x)^K (1+Kx).
inline Majorant product_majorant(double K) {
  return {[K](double x) { return -K * std::log1p(-x) + K * std::log1p(x) + std::log1p(K * x); }, 3 * K};
}

/// Upper bound for sum_{n>N} g(n) n^{-sigma} via
/// sum_{n>N} g(n) n^{-sigma} <= N^{-eta} prod_p M_p(p^{-(sigma-eta)}), minimized
/// over a grid of eta in (0, sigma - 1). Primes above 10^5 are bounded by
/// growth * sum_{n > 10^5} n^{-sigma'} / (1 - 10^{-5 sigma'}).
inline double rankin_tail(std::uint64_t N, double sigma, const Majorant& g) {
  if (!(sigma > 1.0)) throw DomainError("rankin_tail: sigma must exceed 1");
  const auto& primes = detail::small_primes();
  const double p0 = static_cast<double>(primes.back());
  double best = std::numeric_limits<double>::infinity();
  constexpr int kSteps = 48;
  for (int j = 1; j < kSteps; ++j) {
    const double eta = (sigma - 1.0) * j / kSteps;
    const double sp = sigma - eta;
    double log_prod = 0.0;
    for (std::uint32_t p : primes) log_prod += g.log_local(std::pow(static_cast<double>(p), -sp));
    const double rest = std::pow(p0, 1.0 - sp) / (sp - 1.0) / (1.0 - std::pow(p0, -sp));
    log_prod += g.growth * rest;
    best = std::min(best, std::exp(log_prod - eta * std::log(static_cast<double>(N))));
  }
  return best;
}

/// Relative truncation error of an Euler product over p <= P whose local
/// factors have K unit parameters: exp(K sum_{p>P} p^{-sigma}/(1-p^{-sigma})) - 1.
inline double euler_tail_factor(std::uint64_t P, double sigma, double K) {
  const double Pd = static_cast<double>(P);
  const double tail = std::pow(Pd, 1.0 - sigma) / (sigma - 1.0) / (1.0 - std::pow(Pd, -sigma));
  return std::expm1(K * tail);
}

// ---------------------------------------------------------------------------
// Series

inline void require_half_plane(Complex s, double min_sigma) {
  if (!(s.real() >= min_sigma))
    throw DomainError("Re(s) = " + std::to_string(s.real()) + " below " + std::to_string(min_sigma) +
                      " (outside the region of absolute convergence used here)");
}

/// sum_{n <= N} c[n] n^{-s} with Neumaier compensation on each component.
inline Complex dirichlet_sum(const std::vector<double>& c, Complex s, std::uint64_t N) {
  double re = 0, im = 0, cre = 0, cim = 0;
  auto add = [](double& sum, double& comp, double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  };
  for (std::uint64_t n = 1; n <= N && n < c.size(); ++n) {
    if (c[n] == 0.0) continue;
    const Complex term = c[n] * detail::power_minus_s(n, s);
    add(re, cre, term.real());
    add(im, cim, term.imag());
  }
  return {re + cre, im + cim};
}

/// sum_{n<=N} |c[n]| n^{-sigma}.
inline double absolute_sum(const std::vector<double>& c, double sigma, std::uint64_t N) {
  double acc = 0.0;
  for (std::uint64_t n = 1; n <= N && n < c.size(); ++n)
    if (c[n] != 0.0) acc += std::abs(c[n]) * std::pow(static_cast<double>(n), -sigma);
  return acc;
}

/// Squarefree indicator times lambda(n)^power, n = 0..N.
inline std::vector<double> squarefree_power_coeffs(unsigned power, const EigenformTable& table,
                                                   const SquarefreeSieve& sieve, std::uint64_t N) {
  if (N > table.size() || N > sieve.size()) throw IndexError("series length exceeds table size");
  std::vector<double> c(N + 1, 0.0);
  for (std::uint64_t n = 1; n <= N; ++n)
    if (sieve.is_squarefree(n)) c[n] = std::pow(table.lambda(n), static_cast<int>(power));
  return c;
}

inline TruncatedSeries squarefree_power_series(unsigned power, const EigenformTable& table,
                                               const SquarefreeSieve& sieve, Complex s, std::uint64_t N) {
  require_half_plane(s, 1.1);
  const auto c = squarefree_power_coeffs(power, table, sieve, N);
  return {s, N, dirichlet_sum(c, s, N), rankin_tail(N, s.real(), squarefree_majorant(std::ldexp(1.0, power)))};
}

/// L_S(s) truncated to squarefree n <= N.
inline TruncatedSeries lS_truncated(unsigned ell, const EigenformTable& table, const SquarefreeSieve& sieve,
                                    Complex s, std::uint64_t N) {
  return squarefree_power_series(ell, table, sieve, s, N);
}

/// L_T(s) truncated to squarefree n <= N.
inline TruncatedSeries lT_truncated(unsigned ell, const EigenformTable& table, const SquarefreeSieve& sieve,
                                    Complex s, std::uint64_t N) {
  return squarefree_power_series(2 * ell, table, sieve, s, N);
}

/// L(s, f) = sum lambda(n) n^{-s}, truncated.
inline TruncatedSeries hecke_series_truncated(const EigenformTable& table, Complex s, std::uint64_t N) {
  require_half_plane(s, 1.1);
  if (N > table.size()) throw IndexError("series length exceeds table size");
  std::vector<double> c(table.lambdas().begin(), table.lambdas().begin() + N + 1);
  return {s, N, dirichlet_sum(c, s, N), rankin_tail(N, s.real(), full_majorant(2.0))};
}

// ---------------------------------------------------------------------------
// Euler products

/// log of prod_n prod_j (1 - e^{i(m-2j) theta} x)^{-w_n}, m = l - 2n.
inline Complex log_lell_local(unsigned ell, double theta, Complex x) {
  const auto w = chebyshev_weights(ell);
  Complex acc = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) {
    const unsigned m = ell - 2 * static_cast<unsigned>(n);
    for (unsigned j = 0; j <= m; ++j) {
      const Complex alpha = std::polar(1.0, (static_cast<double>(m) - 2.0 * j) * theta);
      acc -= w[n] * std::log(1.0 - alpha * x);
    }
  }
  return acc;
}

/// prod_{p <= P} of the local factors of L_l(s); even l includes the
/// zeta-power as sym^0.
inline TruncatedSeries l_ell_truncated(unsigned ell, const EigenformTable& table, const SquarefreeSieve& sieve,
                                       Complex s, std::uint64_t P) {
  require_half_plane(s, 1.1);
  if (P > table.size() || P > sieve.size()) throw IndexError("prime cutoff exceeds table size");
  Complex log_value = 0.0;
  for (std::uint32_t p : sieve.primes()) {
    if (p > P) break;
    const SatakeAngle angle = satake_angle(table, p);
    log_value += log_lell_local(ell, angle.theta, detail::power_minus_s(p, s));
  }
  const Complex value = std::exp(log_value);
  return {s, P, value, std::abs(value) * euler_tail_factor(P, s.real(), std::ldexp(1.0, ell))};
}

// ---------------------------------------------------------------------------
// Local coefficients and correction factors

/// Coefficients h_0..h_R of the local factor of L_l, via Newton's identities on
/// the symmetric-power power sums.
inline std::vector<double> lell_local_coeffs(unsigned ell, const SatakeAngle& angle, unsigned R) {
  if (R == 0) return {1.0};
  return newton_h(decomposed_power_sums(ell, angle, R), R).h;
}

/// Coefficients of 1/(local factor of L_l) to degree R: the product of
/// (1 - 2cos(k theta) x + x^2) and (1 - x) factors over all sym^{l-2n}
/// parameters, each with multiplicity C(l,n) - C(l,n-1).
inline std::vector<double> inverse_lell_local_coeffs(unsigned ell, const SatakeAngle& angle, unsigned R) {
  std::vector<double> poly(R + 1, 0.0);
  poly[0] = 1.0;
  auto mul_quadratic = [&](double b) {  // times (1 + b x + x^2)
    for (unsigned i = R; i >= 1; --i) poly[i] += b * poly[i - 1] + (i >= 2 ? poly[i - 2] : 0.0);
  };
  auto mul_linear = [&]() {  // times (1 - x)
    for (unsigned i = R; i >= 1; --i) poly[i] -= poly[i - 1];
  };
  if (R == 0) return poly;
  const auto e = chebyshev_expansion(ell);
  for (std::size_t n = 0; n < e.coeffs.size(); ++n) {
    const unsigned m = e.sym_index(n);
    const long mult = e.coeffs[n].convert_to<long>();
    for (long rep = 0; rep < mult; ++rep) {
      for (unsigned j = 0; 2 * j < m; ++j) mul_quadratic(-2.0 * std::cos((m - 2.0 * j) * angle.theta));
      if (m % 2 == 0) mul_linear();
    }
  }
  return poly;
}

/// Local data at p for L_S = L_l * U_l.
struct CorrectionFactor {
  unsigned ell = 0;
  std::uint64_t p = 0;
  std::vector<double> lell;          // coefficients of the L_l local factor
  std::vector<double> inverse_lell;  // A(p^r): coefficients of its reciprocal
  std::vector<double> B;             // U_l local coefficients, B[1] = 0
  double raw_b1 = 0.0;               // A(p) + lambda(p)^l before B(p) = 0 is imposed
};

/// B(p) = 0 and B(p^r) = A(p^r) + A(p^{r-1}) lambda(p)^l for r >= 2, where A
/// are the coefficients of 1/L_l so that (1 + lambda^l x) / L_l = sum B x^r.
inline CorrectionFactor correction_coeffs(unsigned ell, const EigenformTable& table, std::uint64_t p, unsigned R) {
  if (R < 1) throw DomainError("correction_coeffs: R must be >= 1");
  const SatakeAngle angle = satake_angle(table, p);
  const double lam_l = std::pow(table.lambda(p), static_cast<int>(ell));
  CorrectionFactor cf;
  cf.ell = ell;
  cf.p = p;
  cf.lell = lell_local_coeffs(ell, angle, R);
  cf.inverse_lell = inverse_lell_local_coeffs(ell, angle, R);
  cf.B.assign(R + 1, 0.0);
  cf.B[0] = 1.0;
  cf.raw_b1 = cf.inverse_lell[1] + lam_l;
  cf.B[1] = 0.0;
  for (unsigned r = 2; r <= R; ++r) cf.B[r] = cf.inverse_lell[r] + cf.inverse_lell[r - 1] * lam_l;
  return cf;
}

/// Multiplicative extension to n <= N of local coefficient lists; primes above
/// P contribute zero (non-P-smooth n get coefficient 0).
inline std::vector<double> multiplicative_coeffs(
    const SquarefreeSieve& sieve, std::uint64_t N, std::uint64_t P,
    const std::function<std::vector<double>(std::uint64_t p, unsigned R)>& local) {
  if (N > sieve.size()) throw IndexError("coefficient range exceeds sieve");
  std::vector<double> c(N + 1, 0.0);
  if (N >= 1) c[1] = 1.0;
  std::vector<std::vector<double>> by_prime(N + 1);  // only filled at primes <= P
  for (std::uint32_t p : sieve.primes()) {
    if (p > N || p > P) break;
    unsigned R = 0;
    for (std::uint64_t q = 1; q <= N / p; q *= p) ++R;
    by_prime[p] = local(p, R);
  }
  for (std::uint64_t n = 2; n <= N; ++n) {
    const std::uint64_t p = sieve.smallest_prime_factor(n);
    if (p > P) continue;
    std::uint64_t rest = n;
    unsigned e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    c[n] = by_prime[p][e] * c[rest];
  }
  return c;
}

namespace detail {

using HighPrecision = boost::multiprecision::cpp_bin_float_100;

/// Local coefficients of L_l * U_l at p to degree R, in 100-digit arithmetic.
/// For large 2^l the individual coefficients of L_l and U_l dwarf their
/// product, so doubles lose every digit to cancellation.
inline std::vector<double> factorized_local_coeffs(unsigned ell, double lambda_p, unsigned R) {
  using T = HighPrecision;
  const T c1 = T(lambda_p) / 2;
  std::vector<T> cosk(std::max(R, ell) + 1);  // cos(k theta) by the Chebyshev recurrence
  cosk[0] = 1;
  if (cosk.size() > 1) cosk[1] = c1;
  for (std::size_t k = 2; k < cosk.size(); ++k) cosk[k] = 2 * c1 * cosk[k - 1] - cosk[k - 2];
  auto U = [](unsigned m, const T& x) {  // U_m(x)
    T prev = 1, cur = 2 * x;
    if (m == 0) return prev;
    for (unsigned i = 1; i < m; ++i) {
      T next = 2 * x * cur - prev;
      prev = cur;
      cur = next;
    }
    return cur;
  };
  const auto e = chebyshev_expansion(ell);
  std::vector<T> lell(R + 1, T(0));
  lell[0] = 1;
  std::vector<T> power_sums(R + 1, T(0));
  for (unsigned k = 1; k <= R; ++k) {
    for (std::size_t n = 0; n < e.coeffs.size(); ++n) power_sums[k] += T(e.coeffs[n].convert_to<long long>()) * U(e.sym_index(n), cosk[k]);
  }
  for (unsigned r = 1; r <= R; ++r) {
    T acc = 0;
    for (unsigned i = 1; i <= r; ++i) acc += power_sums[i] * lell[r - i];
    lell[r] = acc / r;
  }
  std::vector<T> inverse(R + 1, T(0));
  inverse[0] = 1;
  for (std::size_t n = 0; n < e.coeffs.size(); ++n) {
    const unsigned m = e.sym_index(n);
    const long long mult = e.coeffs[n].convert_to<long long>();
    for (long long rep = 0; rep < mult; ++rep) {
      for (unsigned j = 0; 2 * j < m; ++j) {
        const T b = -2 * cosk[m - 2 * j];
        for (unsigned i = R; i >= 1; --i) inverse[i] += b * inverse[i - 1] + (i >= 2 ? inverse[i - 2] : T(0));
      }
      if (m % 2 == 0)
        for (unsigned i = R; i >= 1; --i) inverse[i] -= inverse[i - 1];
    }
  }
  const T lam_l = boost::multiprecision::pow(T(lambda_p), static_cast<int>(ell));
  std::vector<T> B(R + 1, T(0));
  B[0] = 1;
  for (unsigned r = 2; r <= R; ++r) B[r] = inverse[r] + inverse[r - 1] * lam_l;
  std::vector<double> conv(R + 1, 0.0);
  for (unsigned r = 0; r <= R; ++r) {
    T acc = 0;
    for (unsigned i = 0; i <= r; ++i) acc += lell[i] * B[r - i];
    conv[r] = acc.convert_to<double>();
  }
  return conv;
}

}  // namespace detail

enum class FactorizationPath {
  squarefree_sum,      // L_S = L_l U_l
  squarefree_squares,  // L_T = L_{2l} G_l
};

struct DecompositionCheck {
  unsigned ell = 0;
  Complex s;
  std::uint64_t N = 0, P = 0;
  Complex series;       // truncated L_S (or L_T)
  Complex product;      // truncated Dirichlet series of the factorization
  double residual = 0;  // |series - product| / |series|
  double bound = 0;     // combined tail bound, relative to |series|
  double max_coeff_error = 0;  // max_n |c_series(n) - c_product(n)|
  bool ok() const { return residual <= bound; }
};

/// Checks the factorization of L_S (or L_T) at s with matched truncation on
/// n <= N and local factors over p <= P.
inline DecompositionCheck decomposition_residual(unsigned ell, const EigenformTable& table,
                                                 const SquarefreeSieve& sieve, Complex s, std::uint64_t N,
                                                 std::uint64_t P,
                                                 FactorizationPath path = FactorizationPath::squarefree_sum) {
  require_half_plane(s, 1.5);
  if (ell < 1) throw DomainError("decomposition_residual: l must be >= 1");
  if (N > table.size() || N > sieve.size() || P > table.size())
    throw IndexError("decomposition_residual: truncation exceeds table size");
  const unsigned power = path == FactorizationPath::squarefree_sum ? ell : 2 * ell;
  const double K = std::ldexp(1.0, power);
  const double sigma = s.real();

  const auto lhs_coeffs = squarefree_power_coeffs(power, table, sieve, N);
  const auto abs_product = multiplicative_coeffs(sieve, N, P, [&](std::uint64_t p, unsigned R) {
    const auto cf = correction_coeffs(power, table, p, R);
    std::vector<double> mag(R + 1, 0.0);
    for (unsigned r = 0; r <= R; ++r)
      for (unsigned i = 0; i <= r; ++i) mag[r] += std::abs(cf.lell[i] * cf.B[r - i]);
    return mag;
  });
  const auto rhs_coeffs = multiplicative_coeffs(sieve, N, P, [&](std::uint64_t p, unsigned R) {
    if (R >= 2) return detail::factorized_local_coeffs(power, table.lambda(p), R);
    const auto cf = correction_coeffs(power, table, p, R);
    std::vector<double> conv(R + 1, 0.0);
    for (unsigned r = 0; r <= R; ++r)
      for (unsigned i = 0; i <= r; ++i) conv[r] += cf.lell[i] * cf.B[r - i];
    return conv;
  });

  DecompositionCheck out;
  out.ell = ell;
  out.s = s;
  out.N = N;
  out.P = P;
  out.series = dirichlet_sum(lhs_coeffs, s, N);
  out.product = dirichlet_sum(rhs_coeffs, s, N);
  for (std::uint64_t n = 1; n <= N; ++n)
    out.max_coeff_error = std::max(out.max_coeff_error, std::abs(lhs_coeffs[n] - rhs_coeffs[n]));

  // Terms of the squarefree series that involve a prime above P.
  double non_smooth = 0.0;
  if (P < N)
    for (std::uint64_t n = 2; n <= N; ++n) {
      if (!sieve.is_squarefree(n)) continue;
      const auto f = sieve.factorize(n);
      if (f.back().p > P) non_smooth += std::pow(K, static_cast<double>(f.size())) * std::pow(double(n), -sigma);
    }
  // doubles on the final coefficients, 100 digits on the prime-power products
  const double rounding = 1e-12 * (absolute_sum(rhs_coeffs, sigma, N) + absolute_sum(lhs_coeffs, sigma, N)) +
                          1e-80 * absolute_sum(abs_product, sigma, N);
  const double combined = rankin_tail(N, sigma, squarefree_majorant(K)) +
                          rankin_tail(N, sigma, product_majorant(K)) + non_smooth + rounding;
  const double scale = std::abs(out.series);
  out.residual = std::abs(out.series - out.product) / scale;
  out.bound = combined / scale;
  return out;
}

/// Partial products of U_l(sigma) over p <= P for each P in the grid. The
/// local factor is the finite polynomial (1 + lambda^l x) prod (1 - alpha x)
/// over the 2^l tensor parameters.
inline std::vector<double> u_convergence_probe(unsigned ell, const EigenformTable& table,
                                               const SquarefreeSieve& sieve, double sigma,
                                               const std::vector<std::uint64_t>& P_grid) {
  if (!(sigma > 0.5)) throw DomainError("u_convergence_probe: sigma must exceed 1/2");
  auto grid = P_grid;
  std::sort(grid.begin(), grid.end());
  if (!grid.empty() && (grid.back() > table.size() || grid.back() > sieve.size()))
    throw IndexError("prime cutoff exceeds table size");
  std::vector<double> out;
  double prod = 1.0;
  std::size_t gi = 0;
  for (std::uint32_t p : sieve.primes()) {
    while (gi < grid.size() && p > grid[gi]) {
      out.push_back(prod);
      ++gi;
    }
    if (gi == grid.size()) break;
    const double lam = table.lambda(p);
    const double theta = satake_angle(lam, p).theta;
    const double x = std::pow(static_cast<double>(p), -sigma);
    double log_mag = 0.0;
    for (unsigned w = 0; 2 * w <= ell; ++w) {
      const double mult = binomial(ell, w).convert_to<double>();
      if (2 * w == ell)
        log_mag += mult * std::log1p(-x);
      else
        log_mag += mult * std::log(1.0 - 2.0 * std::cos((ell - 2.0 * w) * theta) * x + x * x);
    }
    prod *= (1.0 + std::pow(lam, static_cast<int>(ell)) * x) * std::exp(log_mag);
  }
  while (gi < grid.size()) {
    out.push_back(prod);
    ++gi;
  }
  return out;
}

}  // namespace lfold
