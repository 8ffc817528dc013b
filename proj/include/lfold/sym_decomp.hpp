#pragma once

// Expansion of powers (2 cos theta)^l in the basis of symmetric-power
// coefficients U_m(cos theta) = sin((m+1) theta) / sin(theta).

#include <cmath>
#include <cstdint>
#include <vector>

#include "eigenform.hpp"
#include "error.hpp"

namespace lfold {

/// Binomial coefficient with C(l, r) = 0 for r < 0 or r > l.
inline BigInt binomial(unsigned ell, long r) {
  if (r < 0 || r > static_cast<long>(ell)) return 0;
  BigInt c = 1;
  for (long i = 1; i <= r; ++i) c = c * (ell - r + i) / i;
  return c;
}

/// C(l, n) - C(l, n - 1) for 0 <= n <= floor(l/2).
inline BigInt binomial_delta(unsigned ell, long n) {
  if (ell < 1) throw DomainError("binomial_delta: l must be positive");
  if (n < 0 || n > static_cast<long>(ell / 2)) throw DomainError("binomial_delta: n outside [0, l/2]");
  return binomial(ell, n) - binomial(ell, n - 1);
}

/// Multiplicities of sym^{l-2n}, n = 0..floor(l/2), in the l-th tensor power.
struct ChebyshevExpansion {
  unsigned ell = 1;
  std::vector<BigInt> coeffs;

  unsigned sym_index(std::size_t n) const { return ell - 2 * static_cast<unsigned>(n); }
};

inline ChebyshevExpansion chebyshev_expansion(unsigned ell) {
  ChebyshevExpansion e{ell, {}};
  for (long n = 0; n <= static_cast<long>(ell / 2); ++n) e.coeffs.push_back(binomial_delta(ell, n));
  return e;
}

/// Same multiplicities as doubles.
inline std::vector<double> chebyshev_weights(unsigned ell) {
  std::vector<double> w;
  for (const auto& c : chebyshev_expansion(ell).coeffs) w.push_back(c.convert_to<double>());
  return w;
}

/// U_m(x) by the three-term recurrence.
inline double cheb_U(unsigned m, double x) {
  double prev = 1.0, cur = 2.0 * x;
  if (m == 0) return prev;
  for (unsigned i = 1; i < m; ++i) {
    double next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// Integer polynomial, coefficient i multiplies x^i.
using IntPoly = std::vector<BigInt>;

/// U_m(x/2) as an integer polynomial in x: V_0 = 1, V_1 = x, V_{m+1} = x V_m - V_{m-1}.
inline IntPoly scaled_chebyshev_poly(unsigned m) {
  IntPoly prev{1}, cur{0, 1};
  if (m == 0) return prev;
  for (unsigned i = 1; i < m; ++i) {
    IntPoly next(cur.size() + 1, 0);
    for (std::size_t k = 0; k < cur.size(); ++k) next[k + 1] += cur[k];
    for (std::size_t k = 0; k < prev.size(); ++k) next[k] -= prev[k];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

namespace detail {
inline bool equals_monomial(IntPoly poly, unsigned degree) {
  poly.resize(std::max<std::size_t>(poly.size(), degree + 1), 0);
  for (std::size_t i = 0; i < poly.size(); ++i)
    if (poly[i] != (i == degree ? 1 : 0)) return false;
  return true;
}

inline IntPoly weighted_sum(unsigned ell, bool reversed_index) {
  IntPoly sum(ell + 1, 0);
  const auto e = chebyshev_expansion(ell);
  for (std::size_t n = 0; n < e.coeffs.size(); ++n) {
    const unsigned m = reversed_index ? 2 * static_cast<unsigned>(n) : e.sym_index(n);
    const IntPoly v = scaled_chebyshev_poly(m);
    if (v.size() > sum.size()) sum.resize(v.size(), 0);
    for (std::size_t k = 0; k < v.size(); ++k) sum[k] += e.coeffs[n] * v[k];
  }
  return sum;
}
}  // namespace detail

/// Exact check of x^l = sum_n (C(l,n) - C(l,n-1)) U_{l-2n}(x/2).
inline bool verify_cheb_identity(unsigned ell) {
  if (ell < 1 || ell > 64) throw DomainError("verify_cheb_identity: l must be in [1, 64]");
  return detail::equals_monomial(detail::weighted_sum(ell, false), ell);
}

/// The same sum with the basis index 2n in place of l-2n. Holds only for
/// l = 2; kept so reports can show the two indexings side by side.
inline bool verify_even_index_variant(unsigned ell) {
  if (ell < 1 || ell > 64) throw DomainError("verify_even_index_variant: l must be in [1, 64]");
  return detail::equals_monomial(detail::weighted_sum(ell, true), ell);
}

/// lambda_{sym^m f}(p) = sum_j e^{i(m-2j) theta}.
inline double sym_power_prime(unsigned m, double theta) {
  const double s = std::sin(theta);
  if (std::abs(s) < 1e-8) return cheb_U(m, std::cos(theta));
  return std::sin((m + 1) * theta) / s;
}

inline double sym_power_prime(unsigned m, const SatakeAngle& angle) { return sym_power_prime(m, angle.theta); }

/// lambda(p)^l minus its symmetric-power expansion at p.
inline double fcrel_residual(unsigned ell, const EigenformTable& table, std::uint64_t p) {
  const double lam = table.lambda(p);
  const SatakeAngle angle = satake_angle(lam, p);
  const auto w = chebyshev_weights(ell);
  double rhs = 0.0;
  for (std::size_t n = 0; n < w.size(); ++n) rhs += w[n] * sym_power_prime(ell - 2 * static_cast<unsigned>(n), angle);
  return std::pow(lam, static_cast<int>(ell)) - rhs;
}

}  // namespace lfold
