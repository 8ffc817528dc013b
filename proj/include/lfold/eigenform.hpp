#pragma once

// Fourier coefficients of level-1 Hecke eigenforms: the exact q-expansion of
// the discriminant form, tables of normalized coefficients, Satake angles and
// the Hecke relations they satisfy.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <regex>
#include <span>
#include <string>
#include <vector>

#include "error.hpp"
#include "ntt.hpp"
#include "sieve.hpp"

namespace lfold {

using BigInt = ntt::BigInt;

inline constexpr std::uint64_t kDefaultTableSize = 1'000'000;
inline constexpr std::uint64_t kMaxTableSize = 10'000'000;
inline constexpr double kDeligneTolerance = 1e-12;

/// Weights k for which S_k(SL2(Z)) is one-dimensional.
inline constexpr std::array<int, 6> kSupportedWeights = {12, 16, 18, 20, 22, 26};

inline bool is_supported_weight(int k) {
  return std::find(kSupportedWeights.begin(), kSupportedWeights.end(), k) != kSupportedWeights.end();
}

/// Exact q-expansion coefficients a(1..N). Index 0 is unused and holds 0.
struct QExpansion {
  int weight = 12;
  std::vector<BigInt> coefficients;

  std::uint64_t truncation() const { return coefficients.empty() ? 0 : coefficients.size() - 1; }
  const BigInt& operator[](std::uint64_t n) const {
    if (n == 0 || n > truncation()) throw IndexError("q-expansion index " + std::to_string(n) + " out of range");
    return coefficients[n];
  }
};

struct SatakeAngle {
  std::uint64_t p = 0;  // 0 when the angle was built from a bare value
  double theta = 0.0;
};

/// Normalized coefficients lambda(n) = a(n) / n^{(k-1)/2}, n = 1..N, with the
/// exact coefficients retained when available. Immutable after construction.
class EigenformTable {
 public:
  EigenformTable() = default;
  EigenformTable(int weight, std::vector<double> lambda, std::optional<std::vector<BigInt>> exact)
      : weight_(weight), lambda_(std::move(lambda)), exact_(std::move(exact)) {}

  int weight() const { return weight_; }
  std::uint64_t size() const { return lambda_.empty() ? 0 : lambda_.size() - 1; }

  double lambda(std::uint64_t n) const {
    if (n == 0 || n > size()) throw IndexError("lambda index " + std::to_string(n) + " exceeds table size");
    return lambda_[n];
  }
  /// Raw access, index 0 holds 0.
  std::span<const double> lambdas() const { return lambda_; }

  bool has_exact() const { return exact_.has_value(); }
  const BigInt& exact(std::uint64_t n) const {
    if (!exact_) throw DomainError("table carries no exact coefficients");
    if (n == 0 || n > size()) throw IndexError("exact index out of range");
    return (*exact_)[n];
  }

 private:
  int weight_ = 12;
  std::vector<double> lambda_;
  std::optional<std::vector<BigInt>> exact_;
};

namespace detail {

// Residues of prod_{n>=1} (1 - q^n) mod p, in Montgomery form, length len.
inline std::vector<std::uint32_t> euler_function_residues(const ntt::Montgomery& mg, std::size_t len) {
  std::vector<std::uint32_t> out(len, 0);
  const std::uint32_t one = mg.to_mont(1);
  const std::uint32_t minus_one = mg.to_mont(mg.mod() - 1);
  out[0] = one;
  for (std::uint64_t k = 1;; ++k) {
    std::uint64_t e1 = k * (3 * k - 1) / 2;
    std::uint64_t e2 = k * (3 * k + 1) / 2;
    if (e1 >= len) break;
    std::uint32_t v = (k % 2) ? minus_one : one;
    out[e1] = v;
    if (e2 < len) out[e2] = v;
  }
  return out;
}

// Square of a sparse residue series, truncated.
inline std::vector<std::uint32_t> sparse_square(const ntt::Montgomery& mg, const std::vector<std::uint32_t>& a) {
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i]) support.push_back(i);
  std::vector<std::uint32_t> out(a.size(), 0);
  for (std::size_t i : support)
    for (std::size_t j : support) {
      if (i + j >= a.size()) break;
      out[i + j] = mg.add(out[i + j], mg.mul(a[i], a[j]));
    }
  return out;
}

}  // namespace detail

/// Exact a(n), n = 1..N, of Delta = q * prod (1 - q^n)^24.
///
/// The Euler product is the sparse pentagonal series; its 24th power is
/// assembled as eta^8 * eta^16 by repeated squaring. Every product is carried
/// out modulo each transform prime and the coefficients are recovered exactly
/// by CRT, which is valid because |a(n)| <= d(n) n^{11/2} <= 2 n^6.
inline QExpansion build_delta_qexpansion(std::uint64_t n, std::uint64_t max_size = kMaxTableSize) {
  if (n < 1) throw DomainError("table size must be >= 1");
  if (n > max_size) throw ResourceLimitError("table size " + std::to_string(n) + " exceeds configured maximum " +
                                             std::to_string(max_size));
  BigInt bound = 4 * boost::multiprecision::pow(BigInt(n), 6);
  if (bound >= ntt::prime_product())
    throw ResourceLimitError("table size exceeds the exact reconstruction range");

  const std::size_t len = static_cast<std::size_t>(n);  // powers q^0 .. q^{N-1}
  std::vector<std::vector<std::uint32_t>> residues;
  for (std::uint32_t prime : ntt::kPrimes) {
    ntt::Transform tr(prime);
    const auto& mg = tr.arith();
    auto e1 = detail::euler_function_residues(mg, len);
    auto e2 = detail::sparse_square(mg, e1);
    e1.clear();
    e1.shrink_to_fit();
    auto e4 = tr.multiply(e2, e2, len);
    e2 = {};
    auto e8 = tr.multiply(e4, e4, len);
    e4 = {};
    auto e16 = tr.multiply(e8, e8, len);
    auto e24 = tr.multiply(e8, e16, len);
    for (auto& x : e24) x = mg.from_mont(x);
    residues.push_back(std::move(e24));
  }
  auto exact = ntt::crt_signed(residues);
  QExpansion q;
  q.weight = 12;
  q.coefficients.resize(len + 1);
  q.coefficients[0] = 0;
  for (std::size_t i = 0; i < len; ++i) q.coefficients[i + 1] = std::move(exact[i]);
  return q;
}

/// Exact eigenform coefficients from a(p) for every prime p <= N, extended by
/// a(p^{r+1}) = a(p) a(p^r) - p^{k-1} a(p^{r-1}) and multiplicativity.
inline QExpansion extend_from_primes(int weight, std::uint64_t n, const std::map<std::uint64_t, BigInt>& prime_values) {
  if (!is_supported_weight(weight)) throw DomainError("unsupported weight " + std::to_string(weight));
  if (n > kMaxTableSize) throw ResourceLimitError("table size exceeds configured maximum");
  SquarefreeSieve sieve(n);
  QExpansion q;
  q.weight = weight;
  q.coefficients.assign(n + 1, 0);
  q.coefficients[1] = 1;
  for (std::uint64_t m = 2; m <= n; ++m) {
    const std::uint64_t p = sieve.smallest_prime_factor(m);
    std::uint64_t rest = m, pe = 1;
    while (rest % p == 0) {
      rest /= p;
      pe *= p;
    }
    if (rest != 1) {
      q.coefficients[m] = q.coefficients[pe] * q.coefficients[rest];
    } else if (pe == p) {
      auto it = prime_values.find(p);
      if (it == prime_values.end()) throw FormatError("missing coefficient for prime " + std::to_string(p));
      q.coefficients[p] = it->second;
    } else {
      const BigInt pk = boost::multiprecision::pow(BigInt(p), weight - 1);
      const BigInt prev2 = (pe / p == p) ? BigInt(1) : q.coefficients[pe / p / p];
      q.coefficients[pe] = q.coefficients[p] * q.coefficients[pe / p] - pk * prev2;
    }
  }
  return q;
}

/// Normalizes an eigenform expansion: lambda(n) = a(n) n^{-(k-1)/2}.
inline EigenformTable normalize(const QExpansion& q, int k) {
  if (q.truncation() < 1) throw DomainError("empty q-expansion");
  if (q.coefficients[1] != 1) throw DomainError("expansion is not normalized: a(1) != 1");
  if (k != q.weight) throw DomainError("weight mismatch");
  const std::uint64_t n = q.truncation();
  std::vector<double> lambda(n + 1, 0.0);
  const long double half_weight = (k - 1) / 2.0L;
  for (std::uint64_t i = 1; i <= n; ++i) {
    long double a = q.coefficients[i].convert_to<long double>();
    lambda[i] = static_cast<double>(a / std::pow(static_cast<long double>(i), half_weight));
  }
  return EigenformTable(k, std::move(lambda), q.coefficients);
}

/// theta in [0, pi] with 2 cos(theta) = lambda(p).
inline SatakeAngle satake_angle(double lambda_p, std::uint64_t p = 0) {
  if (!(std::abs(lambda_p) <= 2.0 + kDeligneTolerance))
    throw DeligneViolation("|lambda(p)| = " + std::to_string(std::abs(lambda_p)) + " exceeds 2" +
                           (p ? " at p = " + std::to_string(p) : std::string()));
  const double x = std::clamp(lambda_p / 2.0, -1.0, 1.0);
  return {p, std::acos(x)};
}

inline SatakeAngle satake_angle(const EigenformTable& table, std::uint64_t p) {
  return satake_angle(table.lambda(p), p);
}

/// lambda(p^r) from lambda(p) by the Hecke recursion.
inline double lambda_prime_power(double lambda_p, unsigned r) {
  double prev = 0.0, cur = 1.0;
  for (unsigned i = 0; i < r; ++i) {
    double next = lambda_p * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

/// lambda(m) lambda(n) - sum_{d | (m,n)} lambda(mn/d^2).
inline double hecke_residual(const EigenformTable& table, std::uint64_t m, std::uint64_t n) {
  if (m == 0 || n == 0) throw DomainError("hecke_residual needs positive arguments");
  if (m > table.size() / n) throw IndexError("hecke_residual: m*n exceeds table size");
  const std::uint64_t g = std::gcd(m, n);
  const std::uint64_t mn = m * n;
  double sum = 0.0;
  for (std::uint64_t d = 1; d <= g; ++d)
    if (g % d == 0) sum += table.lambda(mn / (d * d));
  return table.lambda(m) * table.lambda(n) - sum;
}

/// First prime p <= N with a(p)^2 > 4 p^{k-1}, checked in exact arithmetic.
inline std::optional<std::uint64_t> find_deligne_violation(const QExpansion& q, const SquarefreeSieve& sieve) {
  const std::uint64_t n = std::min<std::uint64_t>(q.truncation(), sieve.size());
  for (std::uint32_t p : sieve.primes()) {
    if (p > n) break;
    const BigInt& a = q.coefficients[p];
    if (a * a > 4 * boost::multiprecision::pow(BigInt(p), q.weight - 1)) return p;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Coefficient cache: `LFOLD-COEFFS v1 weight=<k> N=<N>` then `<n> <a(n)>` lines.

inline void write_coefficient_cache(std::ostream& os, const QExpansion& q) {
  os << "LFOLD-COEFFS v1 weight=" << q.weight << " N=" << q.truncation() << '\n';
  for (std::uint64_t n = 1; n <= q.truncation(); ++n) os << n << ' ' << q.coefficients[n].str() << '\n';
}

/// Reads a cache file. Files that list only prime indices are extended by the
/// Hecke recursion, which is how weights other than 12 are supplied.
inline QExpansion read_coefficient_cache(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty coefficient file");
  static const std::regex header(R"(LFOLD-COEFFS v1 weight=(\d+) N=(\d+))");
  std::smatch m;
  if (!std::regex_match(line, m, header)) throw FormatError("bad coefficient header: " + line);
  const int weight = std::stoi(m[1].str());
  const std::uint64_t n = std::stoull(m[2].str());
  if (!is_supported_weight(weight)) throw DomainError("unsupported weight " + std::to_string(weight));
  if (n < 1) throw FormatError("N must be positive");
  if (n > kMaxTableSize) throw ResourceLimitError("cached table exceeds configured maximum");

  std::map<std::uint64_t, BigInt> values;
  std::uint64_t last = 0;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    if (sp == std::string::npos) throw FormatError("line " + std::to_string(lineno) + ": expected `<n> <a(n)>`");
    const std::string idx = line.substr(0, sp), val = line.substr(sp + 1);
    const bool idx_ok = !idx.empty() && std::all_of(idx.begin(), idx.end(), ::isdigit);
    const bool val_ok = !val.empty() && std::all_of(val.begin() + (val[0] == '-' ? 1 : 0), val.end(), ::isdigit) &&
                        val != "-";
    if (!idx_ok || !val_ok) throw FormatError("line " + std::to_string(lineno) + ": malformed entry");
    const std::uint64_t k = std::stoull(idx);
    if (k == 0 || k > n || k <= last) throw FormatError("line " + std::to_string(lineno) + ": index out of order");
    last = k;
    values.emplace(k, BigInt(val));
  }
  if (values.size() == n) {
    QExpansion q;
    q.weight = weight;
    q.coefficients.assign(n + 1, 0);
    for (auto& [k, v] : values) q.coefficients[k] = std::move(v);
    return q;
  }
  auto one = values.find(1);
  if (one != values.end() && one->second != 1) throw DomainError("expansion is not normalized: a(1) != 1");
  std::map<std::uint64_t, BigInt> primes;
  SquarefreeSieve sieve(n);
  for (auto& [k, v] : values)
    if (sieve.is_prime(k)) primes.emplace(k, v);
  return extend_from_primes(weight, n, primes);
}

}  // namespace lfold
