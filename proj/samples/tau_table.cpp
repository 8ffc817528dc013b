// Prints tau(n), lambda(n) and, at primes, the Satake angle for n <= 30.

#include <cstdio>
#include <iostream>

#include "lfold/eigenform.hpp"

int main() {
  const auto q = lfold::build_delta_qexpansion(30);
  const auto table = lfold::normalize(q, 12);
  const auto sieve = lfold::build_sieve(30);
  std::printf("%4s %14s %12s %10s\n", "n", "tau(n)", "lambda(n)", "theta");
  for (std::uint64_t n = 1; n <= 30; ++n) {
    std::printf("%4llu %14s %12.6f", static_cast<unsigned long long>(n), q[n].str().c_str(), table.lambda(n));
    if (sieve.is_prime(n)) std::printf(" %10.6f", lfold::satake_angle(table, n).theta);
    std::printf("\n");
  }
}
