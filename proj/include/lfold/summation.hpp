#pragma once

// Reproducible summation: fixed 2^16-term blocks, each summed with Neumaier
// compensation, merged in block order. Results do not depend on the number
// of worker threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace lfold {

inline constexpr std::uint64_t kSumBlock = std::uint64_t{1} << 16;

struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    comp += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum);
    add(other.comp);
  }
  double value() const { return sum + comp; }
};

/// Runs fn(i) for i in [0, count) on up to `threads` workers, contiguous ranges.
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (threads == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + threads - 1) / threads;
  for (unsigned t = 0; t < threads; ++t) {
    const std::size_t lo = t * chunk, hi = std::min(count, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (std::size_t i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

/// prefix(X) = sum_{1 <= n <= X} term(n), for X <= n_max, blockwise.
class BlockedPrefixSum {
 public:
  BlockedPrefixSum(std::uint64_t n_max, std::function<double(std::uint64_t)> term, unsigned threads = 1)
      : n_max_(n_max), term_(std::move(term)) {
    const std::size_t blocks = n_max / kSumBlock + 1;
    std::vector<CompensatedSum> partial(blocks);
    parallel_for(blocks, threads, [&](std::size_t b) {
      const std::uint64_t lo = std::max<std::uint64_t>(1, b * kSumBlock);
      const std::uint64_t hi = std::min<std::uint64_t>(n_max_, (b + 1) * kSumBlock - 1);
      CompensatedSum acc;
      for (std::uint64_t n = lo; n <= hi; ++n) acc.add(term_(n));
      partial[b] = acc;
    });
    before_.resize(blocks);
    CompensatedSum running;
    for (std::size_t b = 0; b < blocks; ++b) {
      before_[b] = running;
      running.add(partial[b]);
    }
  }

  double prefix(std::uint64_t x) const {
    x = std::min(x, n_max_);
    const std::size_t b = x / kSumBlock;
    CompensatedSum acc;
    for (std::uint64_t n = std::max<std::uint64_t>(1, b * kSumBlock); n <= x; ++n) acc.add(term_(n));
    CompensatedSum total = before_[b];
    total.add(acc);
    return total.value();
  }

 private:
  std::uint64_t n_max_;
  std::function<double(std::uint64_t)> term_;
  std::vector<CompensatedSum> before_;
};

}  // namespace lfold
