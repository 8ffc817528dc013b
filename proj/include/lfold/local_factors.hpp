#pragma once

// Dirichlet coefficients of the l-fold tensor product and symmetric-power
// L-functions at prime powers. Local parameters enter only through their
// power sums; Newton's identities turn those into complete homogeneous
// symmetric polynomials h_r, the coefficient of p^{-rs} in the Euler factor.

#include <cmath>
#include <cstdint>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "eigenform.hpp"
#include "error.hpp"
#include "sieve.hpp"
#include "sym_decomp.hpp"

namespace lfold {

struct LocalSeries {
  std::uint64_t p = 0;
  unsigned R = 0;
  std::vector<double> h;  // h[0..R]
};

/// p_k = (2 cos k theta)^l for k = 1..K; element k-1 holds p_k.
inline std::vector<double> tensor_power_sums(unsigned ell, const SatakeAngle& angle, unsigned K) {
  if (K < 1) throw DomainError("tensor_power_sums: K must be >= 1");
  std::vector<double> out(K);
  for (unsigned k = 1; k <= K; ++k) out[k - 1] = std::pow(2.0 * std::cos(k * angle.theta), static_cast<int>(ell));
  return out;
}

/// Power sums of the sym^m parameters alpha^{m-j} beta^j.
inline std::vector<double> sym_power_sums(unsigned m, const SatakeAngle& angle, unsigned K) {
  if (K < 1) throw DomainError("sym_power_sums: K must be >= 1");
  std::vector<double> out(K);
  for (unsigned k = 1; k <= K; ++k) out[k - 1] = sym_power_prime(m, k * angle.theta);
  return out;
}

/// Power sums of the parameters of prod_n L(s, sym^{l-2n} f)^{C(l,n)-C(l,n-1)}.
/// Equal to tensor_power_sums in exact arithmetic; computed through the
/// symmetric-power route.
inline std::vector<double> decomposed_power_sums(unsigned ell, const SatakeAngle& angle, unsigned K) {
  const auto w = chebyshev_weights(ell);
  std::vector<double> out(K, 0.0);
  for (std::size_t n = 0; n < w.size(); ++n) {
    const auto ps = sym_power_sums(ell - 2 * static_cast<unsigned>(n), angle, K);
    for (unsigned k = 0; k < K; ++k) out[k] += w[n] * ps[k];
  }
  return out;
}

/// h_0..h_R from power sums via r h_r = sum_{i=1}^r p_i h_{r-i}.
inline LocalSeries newton_h(std::span<const double> power_sums, unsigned R, std::uint64_t p = 0) {
  if (power_sums.size() < R) throw DomainError("newton_h: need at least R power sums");
  LocalSeries s{p, R, std::vector<double>(R + 1, 0.0)};
  s.h[0] = 1.0;
  for (unsigned r = 1; r <= R; ++r) {
    double acc = 0.0;
    for (unsigned i = 1; i <= r; ++i) acc += power_sums[i - 1] * s.h[r - i];
    s.h[r] = acc / r;
  }
  return s;
}

/// Multiplicative coefficient tables for tensor and symmetric powers of one
/// eigenform. Prime-power values are memoized per (kind, l, p); the memo is
/// safe for concurrent readers and idempotent concurrent inserts.
class LocalFactorTable {
 public:
  enum class Kind : std::uint8_t { tensor, sym };

  LocalFactorTable(const EigenformTable& table, const SquarefreeSieve& sieve) : table_(table), sieve_(sieve) {}

  /// lambda_{f x ... x f}(p^r).
  double tensor_prime_power(unsigned ell, std::uint64_t p, unsigned r) const {
    return prime_power(Kind::tensor, ell, p, r);
  }
  /// lambda_{sym^m f}(p^r).
  double sym_prime_power(unsigned m, std::uint64_t p, unsigned r) const { return prime_power(Kind::sym, m, p, r); }

  double tensor(unsigned ell, std::uint64_t n) const { return coefficient(Kind::tensor, ell, n); }
  double sym(unsigned m, std::uint64_t n) const { return coefficient(Kind::sym, m, n); }

  std::uint64_t size() const { return std::min<std::uint64_t>(table_.size(), sieve_.size()); }
  const EigenformTable& table() const { return table_; }
  const SquarefreeSieve& sieve() const { return sieve_; }

 private:
  struct Key {
    Kind kind;
    unsigned param;
    std::uint64_t p;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      return std::hash<std::uint64_t>()(k.p * 1315423911u ^ (static_cast<std::uint64_t>(k.param) << 8) ^
                                        static_cast<std::uint64_t>(k.kind));
    }
  };

  double coefficient(Kind kind, unsigned param, std::uint64_t n) const {
    if (n == 0 || n > size()) throw IndexError("coefficient index " + std::to_string(n) + " exceeds table size");
    double v = 1.0;
    for (const auto& pp : sieve_.factorize(n)) v *= prime_power(kind, param, pp.p, pp.e);
    return v;
  }

  double prime_power(Kind kind, unsigned param, std::uint64_t p, unsigned r) const {
    if (r == 0) return 1.0;
    const Key key{kind, param, p};
    {
      std::shared_lock lock(mutex_);
      auto it = memo_.find(key);
      if (it != memo_.end() && it->second.size() > r) return it->second[r];
    }
    unsigned R = 0;  // largest e with p^e <= size(), but at least r
    for (std::uint64_t q = 1; q <= size() / p; q *= p) ++R;
    R = std::max(R, r);
    const SatakeAngle angle = satake_angle(table_, p);
    const auto sums = kind == Kind::tensor ? tensor_power_sums(param, angle, R) : sym_power_sums(param, angle, R);
    auto series = newton_h(sums, R, p);
    std::unique_lock lock(mutex_);
    auto [it, inserted] = memo_.try_emplace(key, std::move(series.h));
    if (!inserted && it->second.size() <= r) it->second = std::move(series.h);
    return it->second[r];
  }

  const EigenformTable& table_;
  const SquarefreeSieve& sieve_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<Key, std::vector<double>, KeyHash> memo_;
};

}  // namespace lfold
