#pragma once

// Subcommands behind the `lfold` executable. Every report is a CSV file or a
// single JSON document; the same config and cache give byte-identical output.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "config.hpp"
#include "dirichlet.hpp"
#include "eigenform.hpp"
#include "exponents.hpp"
#include "local_factors.hpp"
#include "moments.hpp"
#include "oracles.hpp"
#include "sieve.hpp"
#include "sym_decomp.hpp"

namespace lfold {

inline constexpr int kSchemaVersion = 1;

using Json = nlohmann::ordered_json;

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("cannot write " + path.string());
  os << content;
}

/// Table, sieve and coefficient source for one run.
struct Workspace {
  QExpansion expansion;
  EigenformTable table;
  SquarefreeSieve sieve;
  std::string source;  // "cache" or "built"
};

/// Loads the cache when it holds at least N coefficients of the requested
/// weight; otherwise builds Delta (weight 12 only) and refreshes the cache.
inline QExpansion acquire_expansion(const RunConfig& c, std::string& source) {
  if (!c.cache.empty() && std::filesystem::exists(c.cache)) {
    std::ifstream in(c.cache);
    QExpansion q = read_coefficient_cache(in);
    if (q.weight != c.weight)
      throw DomainError("cache " + c.cache + " holds weight " + std::to_string(q.weight) + ", requested " +
                        std::to_string(c.weight));
    if (q.truncation() >= c.N) {
      q.coefficients.resize(c.N + 1);
      source = "cache";
      return q;
    }
    if (c.weight != 12)
      throw DomainError("cache " + c.cache + " is shorter than N and weight " + std::to_string(c.weight) +
                        " cannot be rebuilt");
  }
  if (c.weight != 12)
    throw DomainError("weight " + std::to_string(c.weight) + " needs a prime-coefficient file passed via --cache");
  QExpansion q = build_delta_qexpansion(c.N);
  if (!c.cache.empty()) {
    std::ostringstream os;
    write_coefficient_cache(os, q);
    write_text_file(c.cache, os.str());
  }
  source = "built";
  return q;
}

inline Workspace make_workspace(const RunConfig& c) {
  Workspace w;
  w.expansion = acquire_expansion(c, w.source);
  w.table = normalize(w.expansion, c.weight);
  w.sieve = SquarefreeSieve(c.N);
  return w;
}

inline std::vector<unsigned> ells_or(const RunConfig& c, std::vector<unsigned> fallback) {
  return c.ells.empty() ? fallback : c.ells;
}

// ---------------------------------------------------------------------------
// Individual checks, shared by `coeffs --check` and `audit`.

struct CheckResult {
  std::string name;
  std::string status;  // pass | fail | warn | skip
  Json detail = Json::object();
};

inline CheckResult check_deligne(const Workspace& w) {
  CheckResult r{"deligne_exact", "pass"};
  const auto bad = find_deligne_violation(w.expansion, w.sieve);
  const auto d = divisor_counts(w.table.size());
  std::uint64_t divisor_bad = 0;
  for (std::uint64_t n = 1; n <= w.table.size(); ++n)
    if (std::abs(w.table.lambda(n)) > d[n] * (1 + 1e-12)) {
      divisor_bad = n;
      break;
    }
  r.detail["primes_checked_up_to"] = w.table.size();
  if (bad) r.detail["first_prime_violation"] = *bad;
  if (divisor_bad) r.detail["first_divisor_bound_violation"] = divisor_bad;
  if (bad || divisor_bad) r.status = "fail";
  return r;
}

inline CheckResult check_hecke(const Workspace& w, int samples = 1000) {
  CheckResult r{"hecke_recursion", "pass"};
  std::mt19937_64 rng(20240601);
  const std::uint64_t N = w.table.size();
  double worst = 0.0;
  int done = 0;
  while (done < samples && N >= 1) {
    const std::uint64_t m = std::uniform_int_distribution<std::uint64_t>(1, std::max<std::uint64_t>(1, N / 2))(rng);
    const std::uint64_t hi = N / m;
    if (hi < 1) continue;
    const std::uint64_t n = std::uniform_int_distribution<std::uint64_t>(1, hi)(rng);
    worst = std::max(worst, std::abs(hecke_residual(w.table, m, n)));
    ++done;
  }
  r.detail["samples"] = done;
  r.detail["max_abs_residual"] = worst;
  r.detail["tolerance"] = 1e-10;
  if (!(worst < 1e-10)) r.status = "fail";
  return r;
}

// ---------------------------------------------------------------------------
// Subcommands

inline int cmd_coeffs(const RunConfig& c, std::ostream& out) {
  RunConfig cc = c;
  if (cc.cache.empty()) cc.cache = (std::filesystem::path(c.out) / "coeffs.txt").string();
  Workspace w = make_workspace(cc);
  Json doc;
  doc["schema_version"] = kSchemaVersion;
  doc["command"] = "coeffs";
  doc["weight"] = c.weight;
  doc["N"] = c.N;
  doc["cache"] = cc.cache;
  bool ok = true;
  if (c.check) {
    Json checks = Json::array();
    for (auto res : {check_deligne(w), check_hecke(w)}) {
      ok = ok && res.status != "fail";
      checks.push_back({{"name", res.name}, {"status", res.status}, {"detail", res.detail}});
    }
    doc["checks"] = checks;
  }
  doc["ok"] = ok;
  out << doc.dump(2) << '\n';
  return ok ? 0 : 1;
}

inline int cmd_decompose(const RunConfig& c, std::ostream& out) {
  std::ostringstream csv;
  csv << "ell,n,sym_power,coeff\n";
  bool ok = true;
  for (unsigned ell : ells_or(c, {1, 2, 3, 4, 5, 6, 7, 8})) {
    const auto e = chebyshev_expansion(ell);
    const bool identity = verify_cheb_identity(ell);
    ok = ok && identity;
    out << "ell=" << ell << " coeffs=";
    for (std::size_t n = 0; n < e.coeffs.size(); ++n) {
      out << (n ? "," : "") << e.coeffs[n].str();
      csv << ell << ',' << n << ',' << e.sym_index(n) << ',' << e.coeffs[n].str() << '\n';
    }
    out << " identity=" << (identity ? "OK" : "FAIL") << '\n';
  }
  write_text_file(std::filesystem::path(c.out) / "decompose.csv", csv.str());
  return ok ? 0 : 1;
}

inline Json exponent_row_json(const ExponentReport& r) {
  Json row;
  row["ell"] = r.ell;
  row["kind"] = to_string(r.kind);
  row["num"] = boost::multiprecision::numerator(r.value).str();
  row["den"] = boost::multiprecision::denominator(r.value).str();
  row["error_exponent"] = to_string(r.error_exponent);
  row["paper_quoted"] = r.quoted ? Json(to_string(*r.quoted)) : Json(nullptr);
  row["match"] = r.match;
  return row;
}

inline int cmd_exponents(const RunConfig& c, std::ostream& out) {
  std::vector<ExponentReport> rows;
  for (unsigned ell : ells_or(c, {3, 4, 5, 6, 7, 8})) {
    if (ell < 3) throw DomainError("exponents: l must be >= 3");
    rows.push_back(exponent_report(ell));
  }
  std::string text;
  if (c.format == "json") {
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["rows"] = Json::array();
    for (const auto& r : rows) doc["rows"].push_back(exponent_row_json(r));
    text = doc.dump(2) + "\n";
  } else {
    std::ostringstream csv;
    csv << "ell,kind,num,den,error_exponent,paper_quoted,match\n";
    for (const auto& r : rows)
      csv << r.ell << ',' << to_string(r.kind) << ',' << boost::multiprecision::numerator(r.value) << ','
          << boost::multiprecision::denominator(r.value) << ',' << to_string(r.error_exponent) << ','
          << (r.quoted ? to_string(*r.quoted) : std::string()) << ',' << (r.match ? "true" : "false") << '\n';
    text = csv.str();
  }
  out << text;
  write_text_file(std::filesystem::path(c.out) / (c.format == "json" ? "exponents.json" : "exponents.csv"), text);
  return 0;
}

inline int cmd_sums(const RunConfig& c, std::ostream& out) {
  Workspace w = make_workspace(c);
  const auto grid = c.X_grid.empty() ? geometric_grid(std::min<std::uint64_t>(10'000, c.N), c.N) : c.X_grid;
  LocalFactorTable factors(w.table, w.sieve);
  std::ostringstream csv;
  csv << "ell,X,S,T,A\n";
  for (unsigned ell : ells_or(c, {1, 2, 3, 4})) {
    const auto ms = moment_sums(ell, w.table, w.sieve, grid, c.threads, &factors);
    for (std::size_t i = 0; i < ms.grid.size(); ++i)
      csv << ell << ',' << ms.grid[i] << ',' << format_double(ms.S[i]) << ',' << format_double(ms.T[i]) << ','
          << format_double(ms.A[i]) << '\n';
  }
  write_text_file(std::filesystem::path(c.out) / "sums.csv", csv.str());
  out << csv.str();
  return 0;
}

inline int cmd_signs(const RunConfig& c, std::ostream& out) {
  Workspace w = make_workspace(c);
  const std::vector<std::uint64_t> xs = c.X_grid.empty() ? std::vector<std::uint64_t>{100'000, 200'000, 400'000}
                                                         : c.X_grid;
  std::ostringstream csv, counts;
  csv << "ell,X,delta,window_lo,window_hi,count,first_pair\n";
  counts << "ell,X,count\n";
  for (unsigned ell : ells_or(c, {3, 5})) {
    for (auto x : xs) {
      const auto rec = window_sign_scan(ell, w.table, w.sieve, x, c.delta);
      std::string first = rec.pairs.empty() ? (rec.all_zero ? "all-zero" : "")
                                            : std::to_string(rec.pairs.front().first) + "-" +
                                                  std::to_string(rec.pairs.front().second);
      csv << ell << ',' << x << ',' << format_double(c.delta) << ',' << rec.window_lo << ',' << rec.window_hi << ','
          << rec.count << ',' << first << '\n';
      if (2 * x <= w.table.size())
        counts << ell << ',' << x << ',' << count_sign_changes(ell, w.table, w.sieve, x, c.threads) << '\n';
    }
  }
  write_text_file(std::filesystem::path(c.out) / "signs.csv", csv.str());
  write_text_file(std::filesystem::path(c.out) / "sign_counts.csv", counts.str());
  out << csv.str();
  return 0;
}

inline int cmd_lfun(const RunConfig& c, std::ostream& out) {
  Workspace w = make_workspace(c);
  const std::uint64_t N = std::min(c.terms, c.N);
  const std::uint64_t P = c.P ? std::min(c.P, c.N) : N;
  const std::vector<std::complex<double>> grid =
      c.s_grid.empty() ? std::vector<std::complex<double>>{{2, 0}, {2.5, 0}, {3, 1}} : c.s_grid;
  std::ostringstream lines;
  bool ok = true;
  for (unsigned ell : ells_or(c, {1, 2, 3, 4, 5, 6})) {
    for (const auto& s : grid) {
      for (auto path : {FactorizationPath::squarefree_sum, FactorizationPath::squarefree_squares}) {
        const auto chk = decomposition_residual(ell, w.table, w.sieve, s, N, P, path);
        ok = ok && chk.ok();
        Json j;
        j["schema_version"] = kSchemaVersion;
        j["ell"] = ell;
        j["path"] = path == FactorizationPath::squarefree_sum ? "S" : "T";
        j["s"] = {s.real(), s.imag()};
        j["N"] = N;
        j["P"] = P;
        j["value"] = {chk.series.real(), chk.series.imag()};
        j["tail_bound"] = chk.bound;
        j["residual"] = chk.residual;
        lines << j.dump() << '\n';
      }
    }
  }
  write_text_file(std::filesystem::path(c.out) / "lfun.jsonl", lines.str());
  out << lines.str();
  return ok ? 0 : 1;
}

inline Json fit_json(const FitResult& fit) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["ell"] = fit.ell;
  j["degree"] = fit.degree;
  j["coefficients"] = fit.coefficients;
  j["residual_exponent"] = std::isnan(fit.residual_exponent) ? Json(nullptr) : Json(fit.residual_exponent);
  j["r2"] = fit.r2;
  return j;
}

inline int cmd_fit(const RunConfig& c, std::ostream& out) {
  Workspace w = make_workspace(c);
  const auto ells = ells_or(c, {4});
  if (ells.size() != 1) throw DomainError("fit takes exactly one l");
  const auto grid = c.X_grid.empty()
                        ? geometric_grid(std::min<std::uint64_t>(10'000, c.N), std::min<std::uint64_t>(1'000'000, c.N))
                        : c.X_grid;
  const auto ms = moment_sums(ells[0], w.table, w.sieve, grid, c.threads);
  const auto text = fit_json(fit_main_term(ms)).dump(2) + "\n";
  write_text_file(std::filesystem::path(c.out) / "fit.json", text);
  out << text;
  return 0;
}

inline int cmd_audit(const RunConfig& c, std::ostream& out);

/// Dispatches a subcommand; returns the process exit status.
inline int run(const std::string& subcommand, const RunConfig& config, std::ostream& out) {
  if (subcommand == "coeffs") return cmd_coeffs(config, out);
  if (subcommand == "decompose") return cmd_decompose(config, out);
  if (subcommand == "exponents") return cmd_exponents(config, out);
  if (subcommand == "sums") return cmd_sums(config, out);
  if (subcommand == "signs") return cmd_signs(config, out);
  if (subcommand == "lfun") return cmd_lfun(config, out);
  if (subcommand == "fit") return cmd_fit(config, out);
  if (subcommand == "audit") return cmd_audit(config, out);
  throw DomainError("unknown subcommand '" + subcommand + "'");
}

inline std::string error_json(const std::string& kind, const std::string& message) {
  Json j;
  j["schema_version"] = kSchemaVersion;
  j["error"] = {{"kind", kind}, {"message", message}};
  return j.dump();
}

}  // namespace lfold

#include "audit.hpp"
