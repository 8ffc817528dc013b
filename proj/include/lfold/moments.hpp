#pragma once

// Moment sums of lambda(n)^l over squarefree n, the full sum over all n via
// the squarefull x squarefree split, main-term fitting and sign-change scans.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dirichlet.hpp"
#include "eigenform.hpp"
#include "error.hpp"
#include "exponents.hpp"
#include "local_factors.hpp"
#include "sieve.hpp"
#include "summation.hpp"

namespace lfold {

struct MomentSeries {
  unsigned ell = 1;
  std::vector<std::uint64_t> grid;
  std::vector<double> S;
  std::vector<double> T;
  std::vector<double> A;  // empty unless full sums were requested
};

/// Geometric grid from lo to hi with `per_decade` points per factor of ten,
/// rounded to integers, deduplicated, endpoints included.
inline std::vector<std::uint64_t> geometric_grid(std::uint64_t lo, std::uint64_t hi, int per_decade = 8) {
  if (lo < 1 || hi < lo || per_decade < 1) throw DomainError("geometric_grid: need 1 <= lo <= hi");
  std::vector<std::uint64_t> g;
  const double step = std::pow(10.0, 1.0 / per_decade);
  for (int i = 0;; ++i) {
    const double x = static_cast<double>(lo) * std::pow(step, i);
    const auto v = static_cast<std::uint64_t>(std::llround(x));
    if (v >= hi || x > static_cast<double>(hi)) break;
    if (g.empty() || v > g.back()) g.push_back(v);
  }
  if (g.empty() || g.back() != hi) g.push_back(hi);
  return g;
}

/// S_l(X) = sum of lambda(n)^l and T_l(X) = sum of lambda(n)^{2l} over
/// squarefree n <= X, for X on the grid. With `full`, A_l(X) = sum over all
/// n <= X of the tensor coefficient is added.
inline MomentSeries moment_sums(unsigned ell, const EigenformTable& table, const SquarefreeSieve& sieve,
                                std::vector<std::uint64_t> grid, unsigned threads = 1,
                                const LocalFactorTable* full = nullptr) {
  if (grid.empty()) throw DomainError("moment_sums: empty grid");
  std::sort(grid.begin(), grid.end());
  const std::uint64_t top = grid.back();
  if (top > table.size() || top > sieve.size()) throw IndexError("moment_sums: grid exceeds table size");
  const auto& sf = sieve.squarefree_flags();
  const auto lam = table.lambdas();
  const int e = static_cast<int>(ell);
  BlockedPrefixSum s_sum(top, [&](std::uint64_t n) { return sf[n] ? std::pow(lam[n], e) : 0.0; }, threads);
  BlockedPrefixSum t_sum(top, [&](std::uint64_t n) { return sf[n] ? std::pow(lam[n], 2 * e) : 0.0; }, threads);
  MomentSeries out;
  out.ell = ell;
  out.grid = grid;
  for (auto x : grid) {
    out.S.push_back(s_sum.prefix(x));
    out.T.push_back(t_sum.prefix(x));
  }
  if (full) {
    // Warm the prime-power memo sequentially so worker threads only read it.
    for (std::uint32_t p : sieve.primes()) {
      if (p > top) break;
      full->tensor_prime_power(ell, p, 1);
    }
    BlockedPrefixSum a_sum(top, [&](std::uint64_t n) { return full->tensor(ell, n); }, threads);
    for (auto x : grid) out.A.push_back(a_sum.prefix(x));
  }
  return out;
}

/// sum_{n <= X} lambda_{f x...x f}(n), directly.
inline double direct_full_sum(unsigned ell, const LocalFactorTable& factors, std::uint64_t X) {
  if (X > factors.size()) throw IndexError("direct_full_sum: X exceeds table size");
  CompensatedSum acc;
  for (std::uint64_t n = 1; n <= X; ++n) acc.add(factors.tensor(ell, n));
  return acc.value();
}

/// The same sum through n = QR, Q squarefull, R squarefree, gcd(Q, R) = 1.
inline double full_sum(unsigned ell, const LocalFactorTable& factors, std::uint64_t X) {
  if (X > factors.size()) throw IndexError("full_sum: X exceeds table size");
  const auto& sieve = factors.sieve();
  const auto& table = factors.table();
  const int e = static_cast<int>(ell);
  CompensatedSum outer;
  for (std::uint64_t q = 1; q <= X; ++q) {
    if (!sieve.is_squarefull(q)) continue;
    CompensatedSum inner;
    for (std::uint64_t r = 1; r <= X / q; ++r)
      if (sieve.is_squarefree(r) && std::gcd(q, r) == 1) inner.add(std::pow(table.lambda(r), e));
    outer.add(factors.tensor(ell, q) * inner.value());
  }
  return outer.value();
}

struct FitResult {
  unsigned ell = 0;
  unsigned degree = 0;
  std::vector<double> coefficients;  // ascending powers of log X
  double residual_exponent = std::numeric_limits<double>::quiet_NaN();
  double r2 = 0.0;

  double main_term(double x) const {
    const double u = std::log(x);
    double acc = 0.0;
    for (std::size_t i = coefficients.size(); i-- > 0;) acc = acc * u + coefficients[i];
    return x * acc;
  }
};

/// Least-squares fit of S(X)/X by a polynomial of the given degree in log X.
/// The residual exponent is the log-log slope of |S(X) - X P(log X)| over the
/// upper half of the grid.
inline FitResult fit_polynomial_in_log(const std::vector<std::uint64_t>& grid, const std::vector<double>& values,
                                       unsigned degree) {
  const std::size_t n = grid.size();
  if (n != values.size()) throw DomainError("fit: grid and values differ in length");
  if (n < degree + 3) throw DomainError("fit: need at least degree + 3 grid points");
  const double span = std::log10(static_cast<double>(grid.back()) / static_cast<double>(grid.front()));
  if (span < 1.0) throw IllConditionedError("fit: grid spans less than one decade");

  Eigen::MatrixXd design(n, degree + 1);
  Eigen::VectorXd y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(grid[i]);
    const double u = std::log(x);
    double pw = 1.0;
    for (unsigned j = 0; j <= degree; ++j, pw *= u) design(i, j) = pw;
    y(i) = values[i] / x;
  }
  const Eigen::VectorXd coef = design.colPivHouseholderQr().solve(y);

  FitResult fit;
  fit.degree = degree;
  fit.coefficients.assign(coef.data(), coef.data() + coef.size());
  const Eigen::VectorXd resid = y - design * coef;
  const double mean = y.mean();
  const double ss_tot = (y.array() - mean).square().sum();
  const double ss_res = resid.squaredNorm();
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);

  std::vector<double> lx, ly;
  for (std::size_t i = n / 2; i < n; ++i) {
    const double x = static_cast<double>(grid[i]);
    const double err = std::abs(values[i] - fit.main_term(x));
    if (err > 0) {
      lx.push_back(std::log(x));
      ly.push_back(std::log(err));
    }
  }
  if (lx.size() >= 2) {
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / lx.size();
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / ly.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sxy += (lx[i] - mx) * (ly[i] - my);
      sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    if (sxx > 0) fit.residual_exponent = sxy / sxx;
  }
  return fit;
}

/// Main-term fit for even l with degree pole_order(l) - 1.
inline FitResult fit_main_term(const MomentSeries& series) {
  const unsigned degree = static_cast<unsigned>(pole_order(series.ell) - 1);
  auto fit = fit_polynomial_in_log(series.grid, series.S, degree);
  fit.ell = series.ell;
  return fit;
}

// ---------------------------------------------------------------------------
// Sign changes

struct SignChangeRecord {
  unsigned ell = 0;
  std::uint64_t X = 0;
  double delta = 0.0;
  std::uint64_t window_lo = 0, window_hi = 0;
  std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;
  std::size_t count = 0;
  bool all_zero = false;
  bool delta_in_range = true;
};

namespace detail {
inline int value_sign(const EigenformTable& table, unsigned ell, std::uint64_t n) {
  const double v = std::pow(table.lambda(n), static_cast<int>(ell));
  return (v > 0) - (v < 0);
}

struct SignRun {
  int first_sign = 0, last_sign = 0;
  std::uint64_t first_n = 0, last_n = 0;
  std::size_t changes = 0;
};

// Sign changes between consecutive nonzero squarefree values in [lo, hi].
inline SignRun scan_run(const EigenformTable& table, const SquarefreeSieve& sieve, unsigned ell, std::uint64_t lo,
                        std::uint64_t hi, std::vector<std::pair<std::uint64_t, std::uint64_t>>* pairs) {
  SignRun run;
  for (std::uint64_t n = lo; n <= hi; ++n) {
    if (!sieve.is_squarefree(n)) continue;
    const int sg = value_sign(table, ell, n);
    if (sg == 0) continue;
    if (run.last_sign == 0) {
      run.first_sign = sg;
      run.first_n = n;
    } else if (sg != run.last_sign) {
      ++run.changes;
      if (pairs) pairs->emplace_back(run.last_n, n);
    }
    run.last_sign = sg;
    run.last_n = n;
  }
  return run;
}

inline void require_odd(unsigned ell) {
  if (ell % 2 == 0) throw DomainError("sign scans need odd l");
}
}  // namespace detail

/// Sign changes of lambda(n)^l among squarefree n in [X, X + X^{1-delta}].
inline SignChangeRecord window_sign_scan(unsigned ell, const EigenformTable& table, const SquarefreeSieve& sieve,
                                         std::uint64_t X, double delta) {
  detail::require_odd(ell);
  if (X < 1) throw DomainError("window_sign_scan: X must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("window_sign_scan: delta must lie in (0, 1)");
  SignChangeRecord rec;
  rec.ell = ell;
  rec.X = X;
  rec.delta = delta;
  rec.window_lo = X;
  rec.window_hi = X + static_cast<std::uint64_t>(std::floor(std::pow(static_cast<double>(X), 1.0 - delta)));
  if (rec.window_hi > table.size() || rec.window_hi > sieve.size())
    throw IndexError("window_sign_scan: window exceeds table size");
  rec.delta_in_range = ell >= 3 ? delta_in_range(ell, delta) : false;
  const auto run = detail::scan_run(table, sieve, ell, rec.window_lo, rec.window_hi, &rec.pairs);
  rec.count = run.changes;
  rec.all_zero = run.first_sign == 0;
  return rec;
}

/// Sign changes among squarefree n in [X, 2X]. Ranges are scanned in
/// contiguous chunks and stitched, so the count is independent of `threads`.
inline std::size_t count_sign_changes(unsigned ell, const EigenformTable& table, const SquarefreeSieve& sieve,
                                      std::uint64_t X, unsigned threads = 1) {
  detail::require_odd(ell);
  if (X < 1) throw DomainError("count_sign_changes: X must be >= 1");
  if (2 * X > table.size() || 2 * X > sieve.size()) throw IndexError("count_sign_changes: 2X exceeds table size");
  const std::uint64_t lo = X, hi = 2 * X;
  const std::size_t chunks = static_cast<std::size_t>((hi - lo) / kSumBlock + 1);
  std::vector<detail::SignRun> runs(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::uint64_t a = lo + c * kSumBlock;
    const std::uint64_t b = std::min(hi, a + kSumBlock - 1);
    runs[c] = detail::scan_run(table, sieve, ell, a, b, nullptr);
  });
  std::size_t total = 0;
  int last = 0;
  for (const auto& r : runs) {
    total += r.changes;
    if (r.first_sign != 0) {
      if (last != 0 && r.first_sign != last) ++total;
      last = r.last_sign;
    }
  }
  return total;
}

}  // namespace lfold
