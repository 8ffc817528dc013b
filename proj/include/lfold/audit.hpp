#pragma once

// `audit`: every consistency check in one run, one JSON verdict.

#include <algorithm>
#include <cmath>
#include <ostream>
#include <vector>

#include "report.hpp"

namespace lfold {

namespace audit_detail {

inline CheckResult exponent_values() {
  CheckResult r{"exponent_values", "pass"};
  const std::pair<unsigned, ExactRational> expected[] = {
      {3, make_rational(8, 3)},      {5, make_rational(38, 3)},   {7, make_rational(164, 3)},
      {4, make_rational(299, 42)},   {6, make_rational(610, 21)}, {8, make_rational(1423, 12)},
  };
  for (const auto& [ell, v] : expected) {
    const ExactRational got = ell % 2 ? alpha(ell) : beta(ell);
    r.detail[std::to_string(ell)] = to_string(got);
    if (got != v) r.status = "fail";
  }
  return r;
}

inline CheckResult exponent_quotes() {
  CheckResult r{"exponent_quotes", "pass"};
  for (const auto& row : audit_table()) {
    Json j{{"computed", to_string(row.error_exponent)},
           {"quoted", row.quoted ? to_string(*row.quoted) : std::string()},
           {"match", row.match}};
    r.detail[std::to_string(row.ell)] = j;
    if (!row.match) {
      // l = 3 and l = 5 are known disagreements between formula and quoted table.
      if (row.ell == 3 || row.ell == 5) {
        if (r.status == "pass") r.status = "warn";
      } else {
        r.status = "fail";
      }
    }
  }
  return r;
}

inline CheckResult delta_ranges() {
  CheckResult r{"delta_range_nonempty", "pass"};
  for (unsigned ell : {3u, 5u, 7u}) {
    try {
      const auto [lo, hi] = delta_range(ell);
      r.detail[std::to_string(ell)] = {to_string(lo), to_string(hi)};
    } catch (const DomainError& e) {
      r.status = "fail";
      r.detail[std::to_string(ell)] = e.what();
    }
  }
  return r;
}

inline CheckResult qexpansion_oracle(const Workspace& w) {
  CheckResult r{"qexpansion_oracle", "pass"};
  if (w.table.weight() != 12) {
    r.status = "skip";
    return r;
  }
  const std::size_t n = std::min<std::uint64_t>(500, w.table.size());
  const auto ref = oracle::schoolbook_delta(n);
  for (std::size_t i = 1; i <= n; ++i)
    if (ref[i] != w.expansion.coefficients[i]) {
      r.status = "fail";
      r.detail["first_mismatch"] = i;
      break;
    }
  r.detail["checked_up_to"] = n;
  return r;
}

inline CheckResult chebyshev() {
  CheckResult r{"chebyshev_identity", "pass"};
  for (unsigned ell = 1; ell <= 20; ++ell)
    if (!verify_cheb_identity(ell)) {
      r.status = "fail";
      r.detail["failed_ell"].push_back(ell);
    }
  return r;
}

inline CheckResult chebyshev_even_index() {
  // Informational: the even-index basis reproduces x^l only for l = 2.
  CheckResult r{"chebyshev_even_index_variant", "warn"};
  for (unsigned ell = 1; ell <= 20; ++ell)
    if (!verify_even_index_variant(ell)) r.detail["fails_for_ell"].push_back(ell);
  return r;
}

inline CheckResult fcrel(const Workspace& w) {
  CheckResult r{"fcrel", "pass"};
  const std::uint64_t top = std::min<std::uint64_t>(10'000, w.table.size());
  double worst = 0;
  for (std::uint32_t p : w.sieve.primes()) {
    if (p > top) break;
    for (unsigned ell = 1; ell <= 12; ++ell) worst = std::max(worst, std::abs(fcrel_residual(ell, w.table, p)));
  }
  r.detail["primes_up_to"] = top;
  r.detail["max_abs_residual"] = worst;
  if (!(worst < 1e-8)) r.status = "fail";
  return r;
}

inline double sym_convolution_residual(unsigned m, const Workspace& w, const LocalFactorTable& f, std::uint64_t top) {
  double worst = 0;
  for (std::uint64_t n = 1; n <= top; ++n)
    worst = std::max(worst, std::abs(f.sym(m, n) - oracle::sym_convolution(m, w.table, w.sieve, n)));
  return worst;
}

inline CheckResult sym_convolution(const Workspace& w, const LocalFactorTable& f) {
  CheckResult r{"sym_convolution", "pass"};
  const std::uint64_t top = std::min<std::uint64_t>(10'000, w.table.size());
  const double worst = sym_convolution_residual(2, w, f, top);
  r.detail["m"] = 2;
  r.detail["n_up_to"] = top;
  r.detail["max_abs_residual"] = worst;
  if (!(worst < 1e-9)) r.status = "fail";
  return r;
}

inline CheckResult sym_convolution_other_m(const Workspace& w, const LocalFactorTable& f) {
  // zeta(ms) sum lambda(n^m) n^-s matches L(s, sym^m f) only for m = 2; the
  // prime coefficients agree for m >= 2, prime powers do not.
  CheckResult r{"sym_convolution_other_m", "warn"};
  const std::uint64_t top = std::min<std::uint64_t>(10'000, w.table.size());
  for (unsigned m : {1u, 3u, 4u}) r.detail["max_abs_residual_m" + std::to_string(m)] = sym_convolution_residual(m, w, f, top);
  return r;
}

inline CheckResult newton_vs_brute(const Workspace& w) {
  CheckResult r{"newton_vs_brute_force", "pass"};
  const std::uint64_t top = std::min<std::uint64_t>(1000, w.table.size());
  double worst = 0;
  for (std::uint32_t p : w.sieve.primes()) {
    if (p > top) break;
    const auto angle = satake_angle(w.table, p);
    for (unsigned ell = 1; ell <= 6; ++ell) {
      const auto h = newton_h(tensor_power_sums(ell, angle, 4), 4).h;
      const auto ref = oracle::brute_force_local_series(ell, angle.theta, 4);
      for (unsigned k = 0; k <= 4; ++k) worst = std::max(worst, std::abs(h[k] - ref[k]));
    }
  }
  r.detail["max_abs_residual"] = worst;
  if (!(worst < 1e-9)) r.status = "fail";
  return r;
}

inline CheckResult factorization(const Workspace& w, const RunConfig& c) {
  CheckResult r{"l_function_factorization", "pass"};
  const std::uint64_t N = std::min(c.terms, w.table.size());
  double worst_ratio = 0;
  for (unsigned ell = 1; ell <= 6; ++ell)
    for (Complex s : {Complex(2, 0), Complex(2.5, 0), Complex(3, 1)})
      for (auto path : {FactorizationPath::squarefree_sum, FactorizationPath::squarefree_squares}) {
        const auto chk = decomposition_residual(ell, w.table, w.sieve, s, N, N, path);
        worst_ratio = std::max(worst_ratio, chk.residual / chk.bound);
        if (!chk.ok()) r.status = "fail";
      }
  bool b1_zero = true;
  for (std::uint32_t p : w.sieve.primes()) {
    if (p > std::min<std::uint64_t>(100, w.table.size())) break;
    for (unsigned ell = 1; ell <= 6; ++ell) b1_zero = b1_zero && correction_coeffs(ell, w.table, p, 4).B[1] == 0.0;
  }
  if (!b1_zero) r.status = "fail";
  r.detail["N"] = N;
  r.detail["max_residual_over_bound"] = worst_ratio;
  r.detail["B_p_zero"] = b1_zero;
  return r;
}

inline CheckResult full_sum_split(const Workspace& w, const LocalFactorTable& f) {
  CheckResult r{"full_sum_split", "pass"};
  double worst = 0;
  for (std::uint64_t X : {10ull, 100ull, 1000ull, 10'000ull}) {
    if (X > w.table.size()) break;
    for (unsigned ell = 1; ell <= 4; ++ell)
      worst = std::max(worst, std::abs(full_sum(ell, f, X) - direct_full_sum(ell, f, X)));
  }
  r.detail["max_abs_difference"] = worst;
  if (!(worst < 1e-8)) r.status = "fail";
  return r;
}

inline CheckResult main_term_fit(const Workspace& w, const RunConfig& c) {
  CheckResult r{"main_term_fit", "pass"};
  const std::uint64_t hi = std::min<std::uint64_t>(1'000'000, w.table.size());
  if (hi < 100'000) {
    r.status = "skip";
    return r;
  }
  const auto ms = moment_sums(4, w.table, w.sieve, geometric_grid(10'000, hi), c.threads);
  const auto fit = fit_main_term(ms);
  r.detail = fit_json(fit);
  if (!(fit.r2 >= 0.99 && fit.coefficients.back() > 0)) r.status = "fail";
  return r;
}

inline CheckResult sign_changes(const Workspace& w, const RunConfig& c) {
  CheckResult r{"sign_changes", "pass"};
  bool any = false;
  for (std::uint64_t X : {100'000ull, 200'000ull, 400'000ull}) {
    const double hi = X + std::pow(double(X), 0.7);
    if (hi > w.table.size()) continue;
    any = true;
    const auto rec = window_sign_scan(3, w.table, w.sieve, X, 0.3);
    r.detail["window_" + std::to_string(X)] = rec.count;
    if (rec.count < 1) r.status = "fail";
  }
  if (w.table.size() >= 200'000) {
    any = true;
    const auto c3 = count_sign_changes(3, w.table, w.sieve, 100'000, c.threads);
    const auto c5 = count_sign_changes(5, w.table, w.sieve, 100'000, c.threads);
    r.detail["count_1e5_2e5_l3"] = c3;
    r.detail["count_1e5_2e5_l5"] = c5;
    if (c3 < 32 || c3 != c5) r.status = "fail";
  }
  if (!any) r.status = "skip";
  return r;
}

inline CheckResult inverse_factor_sign(const Workspace& w) {
  // A(p), the first coefficient of 1/L_l, is -lambda(p)^l; B(p) = 0 then holds without patching.
  CheckResult r{"correction_factor_sign", "pass"};
  double worst = 0;
  for (std::uint32_t p : w.sieve.primes()) {
    if (p > std::min<std::uint64_t>(100, w.table.size())) break;
    for (unsigned ell = 1; ell <= 6; ++ell) worst = std::max(worst, std::abs(correction_coeffs(ell, w.table, p, 2).raw_b1));
  }
  r.detail["max_abs_A_p_plus_lambda_p_pow_l"] = worst;
  r.detail["note"] = "A(n) taken as coefficients of 1/L_l, so A(p) = -lambda(p)^l";
  if (!(worst < 1e-9)) r.status = "fail";
  return r;
}

}  // namespace audit_detail

inline int cmd_audit(const RunConfig& c, std::ostream& out) {
  Workspace w = make_workspace(c);
  LocalFactorTable factors(w.table, w.sieve);
  using namespace audit_detail;
  std::vector<CheckResult> checks = {
      exponent_values(),     exponent_quotes(),         delta_ranges(),        qexpansion_oracle(w),
      check_deligne(w),      check_hecke(w),            chebyshev(),           chebyshev_even_index(),
      fcrel(w),              sym_convolution(w, factors), sym_convolution_other_m(w, factors),
      newton_vs_brute(w),    factorization(w, c),
      inverse_factor_sign(w), full_sum_split(w, factors), main_term_fit(w, c), sign_changes(w, c),
  };
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["weight"] = c.weight;
  doc["N"] = c.N;
  bool ok = true;
  Json list = Json::array(), warnings = Json::array();
  for (const auto& chk : checks) {
    ok = ok && chk.status != "fail";
    if (chk.status == "warn") warnings.push_back(chk.name);
    list.push_back({{"name", chk.name}, {"status", chk.status}, {"detail", chk.detail}});
  }
  doc["verdict"] = ok ? "pass" : "fail";
  doc["warnings"] = warnings;
  doc["checks"] = list;
  const auto text = doc.dump(2) + "\n";
  write_text_file(std::filesystem::path(c.out) / "audit.json", text);
  out << text;
  return ok ? 0 : 1;
}

}  // namespace lfold
