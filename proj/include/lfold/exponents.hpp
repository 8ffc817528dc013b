#pragma once

// Exact rational error exponents for the squarefree moment sums and the
// admissible short-interval range for sign changes.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "error.hpp"
#include "sym_decomp.hpp"

namespace lfold {

/// Reduced fraction with positive denominator (cpp_rational normalizes on
/// every operation).
using ExactRational = boost::multiprecision::cpp_rational;

inline ExactRational make_rational(long num, long den) { return ExactRational(num) / ExactRational(den); }

inline std::string to_string(const ExactRational& r) {
  const auto num = boost::multiprecision::numerator(r);
  const auto den = boost::multiprecision::denominator(r);
  return den == 1 ? num.str() : num.str() + "/" + den.str();
}

enum class ExponentKind { alpha, beta };

inline const char* to_string(ExponentKind k) { return k == ExponentKind::alpha ? "alpha" : "beta"; }

namespace detail {
// (1/2) * sum_{n=0}^{upper} (l-2n+1)^2 / (l-n+1) * C(l, n)
inline ExactRational half_weighted_binomial_sum(unsigned ell, long upper) {
  ExactRational acc = 0;
  for (long n = 0; n <= upper; ++n) {
    const long a = static_cast<long>(ell) - 2 * n + 1;
    acc += ExactRational(BigInt(a * a) * binomial(ell, n)) / ExactRational(static_cast<long>(ell) - n + 1);
  }
  return acc / 2;
}
}  // namespace detail

/// Exponent governing S_l for odd l >= 3.
inline ExactRational alpha(unsigned ell) {
  if (ell < 3 || ell % 2 == 0) throw DomainError("alpha: l must be odd and >= 3");
  const long h = ell / 2;
  ExactRational lead = ExactRational(2 * binomial(ell, h)) / ExactRational(3 * (h + 2));
  return lead + detail::half_weighted_binomial_sum(ell, h - 1);
}

/// Exponent governing S_l for even l >= 4.
inline ExactRational beta(unsigned ell) {
  if (ell < 4 || ell % 2 == 1) throw DomainError("beta: l must be even and >= 4");
  const long h = ell / 2;
  ExactRational v = make_rational(1, 4);
  v += ExactRational(13 * binomial(ell, h)) / ExactRational(21 * (static_cast<long>(ell) + 2));
  v += ExactRational(15 * binomial(ell, h - 1)) / ExactRational(2 * (static_cast<long>(ell) + 4));
  return v + detail::half_weighted_binomial_sum(ell, h - 2);
}

/// 1 - 1/value: the power of X in the error term.
inline ExactRational error_exponent(const ExactRational& value) { return ExactRational(1) - ExactRational(1) / value; }

/// [1/beta(2l), 1/alpha(l)): the delta for which windows of length X^{1-delta}
/// must contain a sign change. Throws if the range is empty.
inline std::pair<ExactRational, ExactRational> delta_range(unsigned ell) {
  if (ell < 3 || ell % 2 == 0) throw DomainError("delta_range: l must be odd and >= 3");
  std::pair<ExactRational, ExactRational> r{ExactRational(1) / beta(2 * ell), ExactRational(1) / alpha(ell)};
  if (r.first >= r.second) throw DomainError("delta_range: empty range for l = " + std::to_string(ell));
  return r;
}

inline bool delta_in_range(unsigned ell, double delta) {
  const auto [lo, hi] = delta_range(ell);
  return delta >= lo.convert_to<double>() && delta < hi.convert_to<double>();
}

struct ExponentReport {
  unsigned ell = 0;
  ExponentKind kind = ExponentKind::alpha;
  ExactRational value;
  ExactRational error_exponent;
  std::optional<ExactRational> quoted;
  std::string source;  // where the quoted value comes from
  bool match = false;
};

/// Published error exponents, stored as data and compared, never derived.
struct QuotedExponent {
  unsigned ell;
  long num;
  long den;
  const char* source;
};

inline constexpr QuotedExponent kQuotedExponents[] = {
    {3, 7, 10, "full-sum bound, odd l (l=3 row)"},
    {5, 33, 38, "full-sum bound, odd l (l=5 row)"},
    {7, 161, 164, "full-sum bound, odd l (l=7 row)"},
    {4, 257, 299, "full-sum bound, even l (l=4 row)"},
    {6, 589, 610, "full-sum bound, even l (l=6 row)"},
    {8, 1411, 1423, "full-sum bound, even l (l=8 row)"},
};

inline ExponentReport exponent_report(unsigned ell) {
  ExponentReport r;
  r.ell = ell;
  r.kind = ell % 2 ? ExponentKind::alpha : ExponentKind::beta;
  r.value = ell % 2 ? alpha(ell) : beta(ell);
  r.error_exponent = lfold::error_exponent(r.value);
  for (const auto& q : kQuotedExponents)
    if (q.ell == ell) {
      r.quoted = make_rational(q.num, q.den);
      r.source = q.source;
    }
  r.match = r.quoted && *r.quoted == r.error_exponent;
  return r;
}

/// Rows for l = 3..8, in increasing l.
inline std::vector<ExponentReport> audit_table(unsigned lo = 3, unsigned hi = 8) {
  std::vector<ExponentReport> rows;
  for (unsigned ell = lo; ell <= hi; ++ell) rows.push_back(exponent_report(ell));
  return rows;
}

}  // namespace lfold
