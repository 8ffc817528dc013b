#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "error.hpp"

namespace lfold {

inline constexpr std::uint64_t kMaxSieveSize = 200'000'000;

struct PrimePower {
  std::uint32_t p;
  std::uint32_t e;
  std::uint64_t q;  // p^e
};

/// Smallest-prime-factor table with squarefree flags for 1..N.
class SquarefreeSieve {
 public:
  SquarefreeSieve() = default;

  explicit SquarefreeSieve(std::uint64_t n) : n_(n) {
    if (n < 1) throw DomainError("sieve size must be >= 1");
    if (n > kMaxSieveSize) throw ResourceLimitError("sieve size exceeds configured maximum");
    spf_.assign(n + 1, 0);
    squarefree_.assign(n + 1, 1);
    squarefree_[0] = 0;
    for (std::uint64_t i = 2; i <= n; ++i) {
      if (spf_[i] == 0) {
        primes_.push_back(static_cast<std::uint32_t>(i));
        for (std::uint64_t j = i; j <= n; j += i)
          if (spf_[j] == 0) spf_[j] = static_cast<std::uint32_t>(i);
        if (i <= n / i)
          for (std::uint64_t j = i * i; j <= n; j += i * i) squarefree_[j] = 0;
      }
    }
    if (n >= 1) spf_[1] = 1;
  }

  std::uint64_t size() const { return n_; }
  bool is_squarefree(std::uint64_t n) const { return squarefree_.at(n) != 0; }
  bool is_prime(std::uint64_t n) const { return n >= 2 && spf_.at(n) == n; }
  std::uint32_t smallest_prime_factor(std::uint64_t n) const { return spf_.at(n); }
  const std::vector<std::uint32_t>& primes() const { return primes_; }
  const std::vector<std::uint8_t>& squarefree_flags() const { return squarefree_; }

  /// Prime-power factorization in increasing prime order. n must be <= size().
  std::vector<PrimePower> factorize(std::uint64_t n) const {
    if (n == 0 || n > n_) throw IndexError("factorize: n outside sieve range");
    std::vector<PrimePower> out;
    while (n > 1) {
      std::uint32_t p = spf_[n];
      PrimePower pp{p, 0, 1};
      while (n % p == 0) {
        n /= p;
        ++pp.e;
        pp.q *= p;
      }
      out.push_back(pp);
    }
    return out;
  }

  /// n is squarefull when every prime divisor appears at least squared (1 counts).
  bool is_squarefull(std::uint64_t n) const {
    for (const auto& pp : factorize(n))
      if (pp.e < 2) return false;
    return true;
  }

 private:
  std::uint64_t n_ = 0;
  std::vector<std::uint32_t> spf_;
  std::vector<std::uint8_t> squarefree_;
  std::vector<std::uint32_t> primes_;
};

inline SquarefreeSieve build_sieve(std::uint64_t n) { return SquarefreeSieve(n); }

/// d(n) for n = 0..N (d(0) = 0) by the divisor-multiple sieve.
inline std::vector<std::uint32_t> divisor_counts(std::uint64_t n) {
  std::vector<std::uint32_t> d(n + 1, 0);
  for (std::uint64_t i = 1; i <= n; ++i)
    for (std::uint64_t j = i; j <= n; j += i) ++d[j];
  return d;
}

}  // namespace lfold
