#pragma once

// Exact integer power-series products by number-theoretic transforms modulo
// several word-sized primes, recombined with Garner's algorithm.

#include <algorithm>
#include <array>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "error.hpp"

namespace lfold::ntt {

using BigInt = boost::multiprecision::cpp_int;

/// Montgomery arithmetic for an odd modulus below 2^31.
class Montgomery {
 public:
  explicit constexpr Montgomery(std::uint32_t mod) : mod_(mod), inv_(neg_inverse(mod)), r2_(r_squared(mod)) {}

  constexpr std::uint32_t mod() const { return mod_; }

  constexpr std::uint32_t reduce(std::uint64_t t) const {
    std::uint32_t m = static_cast<std::uint32_t>(t) * inv_;
    std::uint32_t r = static_cast<std::uint32_t>((t + static_cast<std::uint64_t>(m) * mod_) >> 32);
    return r >= mod_ ? r - mod_ : r;
  }
  constexpr std::uint32_t mul(std::uint32_t a, std::uint32_t b) const {
    return reduce(static_cast<std::uint64_t>(a) * b);
  }
  constexpr std::uint32_t add(std::uint32_t a, std::uint32_t b) const {
    std::uint32_t s = a + b;
    return s >= mod_ ? s - mod_ : s;
  }
  constexpr std::uint32_t sub(std::uint32_t a, std::uint32_t b) const {
    return a >= b ? a - b : a + mod_ - b;
  }
  constexpr std::uint32_t to_mont(std::uint32_t a) const { return mul(a % mod_, r2_); }
  constexpr std::uint32_t from_mont(std::uint32_t a) const { return reduce(a); }
  constexpr std::uint32_t pow(std::uint32_t base_mont, std::uint64_t e) const {
    std::uint32_t acc = to_mont(1);
    while (e) {
      if (e & 1) acc = mul(acc, base_mont);
      base_mont = mul(base_mont, base_mont);
      e >>= 1;
    }
    return acc;
  }

 private:
  static constexpr std::uint32_t neg_inverse(std::uint32_t m) {
    std::uint32_t x = m;  // Newton iteration for m^{-1} mod 2^32
    for (int i = 0; i < 5; ++i) x *= 2u - m * x;
    return ~x + 1u;
  }
  static constexpr std::uint32_t r_squared(std::uint32_t m) {
    unsigned __int128 r = (static_cast<unsigned __int128>(1) << 64) % m;
    return static_cast<std::uint32_t>(r);
  }

  std::uint32_t mod_;
  std::uint32_t inv_;
  std::uint32_t r2_;
};

inline std::uint64_t powmod_u64(std::uint64_t b, std::uint64_t e, std::uint64_t m) {
  unsigned __int128 acc = 1, base = b % m;
  while (e) {
    if (e & 1) acc = acc * base % m;
    base = base * base % m;
    e >>= 1;
  }
  return static_cast<std::uint64_t>(acc);
}

/// Smallest primitive root of a prime, by trial-factoring p - 1.
inline std::uint32_t primitive_root(std::uint32_t p) {
  std::vector<std::uint32_t> factors;
  std::uint32_t m = p - 1;
  for (std::uint32_t d = 2; static_cast<std::uint64_t>(d) * d <= m; ++d) {
    if (m % d == 0) {
      factors.push_back(d);
      while (m % d == 0) m /= d;
    }
  }
  if (m > 1) factors.push_back(m);
  for (std::uint32_t g = 2;; ++g) {
    bool ok = std::all_of(factors.begin(), factors.end(),
                          [&](std::uint32_t q) { return powmod_u64(g, (p - 1) / q, p) != 1; });
    if (ok) return g;
  }
}

/// Primes of the form c*2^k + 1 with k >= 25, all below 2^31.
inline constexpr std::array<std::uint32_t, 5> kPrimes = {
    167772161u,   // 5*2^25 + 1
    469762049u,   // 7*2^26 + 1
    2013265921u,  // 15*2^27 + 1
    1811939329u,  // 27*2^26 + 1
    2113929217u,  // 63*2^25 + 1
};
inline constexpr int kMaxLog2Length = 25;

/// Residue-domain transform engine for one prime. Holds twiddle tables.
class Transform {
 public:
  explicit Transform(std::uint32_t prime) : mg_(prime) {
    std::uint32_t g = primitive_root(prime);
    g_mont_ = mg_.to_mont(g);
  }

  const Montgomery& arith() const { return mg_; }

  /// In-place forward (or inverse) transform; `a` holds Montgomery-form values
  /// and its size must be a power of two.
  void transform(std::vector<std::uint32_t>& a, bool inverse) const {
    const std::size_t n = a.size();
    const int log_n = std::countr_zero(n);
    if (log_n > std::countr_zero(mg_.mod() - 1))
      throw ResourceLimitError("transform length exceeds the prime's 2-adic order");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(a[i], a[j]);
    }
    std::vector<std::uint32_t> w(n / 2 + 1);
    for (std::size_t len = 2; len <= n; len <<= 1) {
      std::uint32_t wl = mg_.pow(g_mont_, (mg_.mod() - 1) / len);
      if (inverse) wl = mg_.pow(wl, mg_.mod() - 2);
      const std::size_t half = len / 2;
      w[0] = mg_.to_mont(1);
      for (std::size_t k = 1; k < half; ++k) w[k] = mg_.mul(w[k - 1], wl);
      for (std::size_t i = 0; i < n; i += len) {
        std::uint32_t* lo = a.data() + i;
        std::uint32_t* hi = lo + half;
        for (std::size_t k = 0; k < half; ++k) {
          std::uint32_t u = lo[k];
          std::uint32_t v = mg_.mul(hi[k], w[k]);
          lo[k] = mg_.add(u, v);
          hi[k] = mg_.sub(u, v);
        }
      }
    }
    if (inverse) {
      std::uint32_t inv_n = mg_.pow(mg_.to_mont(static_cast<std::uint32_t>(n % mg_.mod())), mg_.mod() - 2);
      for (auto& x : a) x = mg_.mul(x, inv_n);
    }
  }

  /// Truncated product of two residue series (Montgomery form) to `len` terms.
  std::vector<std::uint32_t> multiply(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b,
                                      std::size_t len) const {
    const bool square = a.data() == b.data() && a.size() == b.size();
    std::size_t need = std::min(a.size() + b.size() - 1, 2 * len);
    std::size_t n = std::bit_ceil(std::max<std::size_t>(need, 2));
    if (std::countr_zero(n) > kMaxLog2Length) throw ResourceLimitError("series too long for transform primes");
    std::vector<std::uint32_t> fa(n, 0);
    std::copy_n(a.begin(), std::min(a.size(), len), fa.begin());
    transform(fa, false);
    if (square) {
      for (auto& x : fa) x = mg_.mul(x, x);
    } else {
      std::vector<std::uint32_t> fb(n, 0);
      std::copy_n(b.begin(), std::min(b.size(), len), fb.begin());
      transform(fb, false);
      for (std::size_t i = 0; i < n; ++i) fa[i] = mg_.mul(fa[i], fb[i]);
    }
    transform(fa, true);
    fa.resize(len);
    return fa;
  }

 private:
  Montgomery mg_;
  std::uint32_t g_mont_ = 0;
};

/// Product of all transform primes.
inline BigInt prime_product() {
  BigInt m = 1;
  for (auto p : kPrimes) m *= p;
  return m;
}

/// Reconstructs signed integers from per-prime residues (plain, not Montgomery
/// form). Valid when every true value v satisfies 2|v| < prime_product().
inline std::vector<BigInt> crt_signed(const std::vector<std::vector<std::uint32_t>>& residues) {
  const std::size_t k = residues.size();
  const std::size_t len = residues.front().size();
  // inv[i][j] = m_j^{-1} mod m_i for j < i
  std::vector<std::vector<std::uint64_t>> inv(k, std::vector<std::uint64_t>(k, 0));
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = 0; j < i; ++j) inv[i][j] = powmod_u64(kPrimes[j] % kPrimes[i], kPrimes[i] - 2, kPrimes[i]);
  std::vector<BigInt> radix(k);
  radix[0] = 1;
  for (std::size_t i = 1; i < k; ++i) radix[i] = radix[i - 1] * kPrimes[i - 1];
  const BigInt modulus = radix[k - 1] * kPrimes[k - 1];
  const BigInt half = modulus / 2;

  std::vector<BigInt> out(len);
  std::vector<std::uint64_t> digit(k);
  for (std::size_t t = 0; t < len; ++t) {
    for (std::size_t i = 0; i < k; ++i) {
      const std::uint64_t mi = kPrimes[i];
      std::uint64_t x = residues[i][t];
      for (std::size_t j = 0; j < i; ++j) {
        x = (x + mi - digit[j] % mi) % mi;
        x = x * inv[i][j] % mi;
      }
      digit[i] = x;
    }
    // Horner over the mixed radix; the first three digits fit in 128 bits.
    unsigned __int128 low = digit[0] + static_cast<unsigned __int128>(digit[1]) * kPrimes[0];
    BigInt v = 0;
    for (std::size_t i = k; i-- > 2;) v = v * kPrimes[i] + digit[i];
    if (k > 2) {
      v = v * kPrimes[1] * kPrimes[0];
      v += BigInt(static_cast<unsigned __int128>(low));
    } else {
      v = BigInt(static_cast<unsigned __int128>(low));
    }
    if (v > half) v -= modulus;
    out[t] = std::move(v);
  }
  return out;
}

}  // namespace lfold::ntt
