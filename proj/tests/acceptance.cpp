// Prints one PASS/FAIL line per acceptance criterion.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "lfold/config.hpp"
#include "lfold/oracles.hpp"
#include "lfold/report.hpp"

using namespace lfold;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::string detail;
  void require(bool cond, const std::string& what) {
    if (!cond) pass = false;
    detail += (detail.empty() ? "" : "; ") + what + (cond ? "" : " [x]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

struct Shared {
  QExpansion q;
  EigenformTable table;
  SquarefreeSieve sieve;
  fs::path cache;
};

Outcome exponents() {
  Outcome o;
  const auto t0 = Clock::now();
  o.require(alpha(3) == make_rational(8, 3) && alpha(5) == make_rational(38, 3) && alpha(7) == make_rational(164, 3),
            "alpha_3,5,7 = 8/3, 38/3, 164/3");
  o.require(beta(4) == make_rational(299, 42) && beta(6) == make_rational(610, 21) &&
                beta(8) == make_rational(1423, 12),
            "beta_4,6,8 = 299/42, 610/21, 1423/12");
  bool matches = true, flagged = true;
  for (const auto& r : audit_table()) {
    if (r.ell == 3) flagged = flagged && !r.match && r.error_exponent == make_rational(5, 8);
    else if (r.ell == 5) flagged = flagged && !r.match && r.error_exponent == make_rational(35, 38);
    else matches = matches && r.match;
  }
  o.require(matches, "quoted exponents match for l=4,6,7,8");
  o.require(flagged, "l=3 (5/8 vs 7/10) and l=5 (35/38 vs 33/38) flagged");
  const double dt = seconds_since(t0);
  o.require(dt < 1.0, "runtime " + fmt("%.4f", dt) + " s < 1 s");
  return o;
}

Outcome coefficients(Shared& sh) {
  Outcome o;
  const auto t0 = Clock::now();
  sh.q = build_delta_qexpansion(1'000'000);
  const double build = seconds_since(t0);
  sh.table = normalize(sh.q, 12);
  sh.sieve = build_sieve(1'000'000);
  const auto ref = oracle::schoolbook_delta(500);
  bool same = true;
  for (std::size_t n = 1; n <= 500; ++n) same = same && ref[n] == sh.q[n];
  o.require(same, "a(n) = schoolbook for n <= 500");
  o.require(!find_deligne_violation(sh.q, sh.sieve).has_value(), "a(p)^2 <= 4p^11 for all p <= 1e6");
  Workspace w{sh.q, sh.table, sh.sieve, "built"};
  const auto hecke = check_hecke(w, 1000);
  o.require(hecke.status == "pass", "1000 Hecke residuals, max " + fmt("%.2e", hecke.detail["max_abs_residual"]));
  o.require(build < 300, "build N=1e6 in " + fmt("%.1f", build) + " s");
  std::ostringstream os;
  write_coefficient_cache(os, sh.q);
  write_text_file(sh.cache, os.str());
  return o;
}

Outcome identities(const Shared& sh) {
  Outcome o;
  bool cheb = true;
  for (unsigned ell = 1; ell <= 20; ++ell) cheb = cheb && verify_cheb_identity(ell);
  o.require(cheb, "Chebyshev identity l=1..20");
  double fc = 0;
  for (auto p : sh.sieve.primes()) {
    if (p > 10'000) break;
    for (unsigned ell = 1; ell <= 12; ++ell) fc = std::max(fc, std::abs(fcrel_residual(ell, sh.table, p)));
  }
  o.require(fc < 1e-8, "fcrel max " + fmt("%.2e", fc));
  LocalFactorTable f(sh.table, sh.sieve);
  for (unsigned m = 1; m <= 4; ++m) {
    double worst = 0;
    for (std::uint64_t n = 1; n <= 10'000; ++n)
      worst = std::max(worst, std::abs(f.sym(m, n) - oracle::sym_convolution(m, sh.table, sh.sieve, n)));
    o.require(worst < 1e-9, "sym convolution m=" + std::to_string(m) + " max " + fmt("%.2e", worst));
  }
  return o;
}

Outcome local_factors(const Shared& sh) {
  Outcome o;
  double worst = 0;
  for (auto p : sh.sieve.primes()) {
    if (p > 1000) break;
    const auto angle = satake_angle(sh.table, p);
    for (unsigned ell = 1; ell <= 6; ++ell) {
      const auto h = newton_h(tensor_power_sums(ell, angle, 4), 4).h;
      const auto ref = oracle::brute_force_local_series(ell, angle.theta, 4);
      for (unsigned r = 0; r <= 4; ++r) worst = std::max(worst, std::abs(h[r] - ref[r]));
    }
  }
  o.require(worst < 1e-9, "Newton vs brute force, max " + fmt("%.2e", worst));
  return o;
}

Outcome factorization(const Shared& sh) {
  Outcome o;
  bool all = true;
  double ratio = 0;
  for (unsigned ell = 1; ell <= 6; ++ell)
    for (Complex s : {Complex(2, 0), Complex(2.5, 0), Complex(3, 1)})
      for (auto path : {FactorizationPath::squarefree_sum, FactorizationPath::squarefree_squares}) {
        const auto chk = decomposition_residual(ell, sh.table, sh.sieve, s, 100'000, 100'000, path);
        all = all && chk.ok();
        ratio = std::max(ratio, chk.residual / chk.bound);
      }
  o.require(all, "36 residuals below combined bound (max residual/bound " + fmt("%.2e", ratio) + ")");
  bool b_zero = true;
  for (auto p : sh.sieve.primes()) {
    if (p > 100'000) break;
    for (unsigned ell = 1; ell <= 12; ++ell) b_zero = b_zero && correction_coeffs(ell, sh.table, p, 2).B[1] == 0.0;
  }
  o.require(b_zero, "B(p) = 0 for p <= 1e5, l <= 12");
  return o;
}

Outcome moments(const Shared& sh) {
  Outcome o;
  LocalFactorTable f(sh.table, sh.sieve);
  double worst = 0;
  for (std::uint64_t X : {1ull, 10ull, 100ull, 1000ull, 5000ull, 10'000ull})
    for (unsigned ell = 1; ell <= 4; ++ell)
      worst = std::max(worst, std::abs(full_sum(ell, f, X) - direct_full_sum(ell, f, X)));
  o.require(worst < 1e-8, "split vs direct, max " + fmt("%.2e", worst));
  const auto fit = fit_main_term(moment_sums(4, sh.table, sh.sieve, geometric_grid(10'000, 1'000'000)));
  o.require(fit.degree == 1, "l=4 fit degree 1");
  o.require(fit.r2 >= 0.99, "R^2 " + fmt("%.5f", fit.r2));
  o.require(fit.coefficients.back() > 0, "leading coefficient " + fmt("%.5f", fit.coefficients.back()));
  o.detail += "; residual exponent " + fmt("%.3f", fit.residual_exponent) + " (reported, not gated)";
  return o;
}

Outcome sign_changes(const Shared& sh) {
  Outcome o;
  const auto t0 = Clock::now();
  std::ifstream in(sh.cache);
  const auto q = read_coefficient_cache(in);
  const auto table = normalize(q, 12);
  const auto sieve = build_sieve(q.truncation());
  for (std::uint64_t X : {100'000ull, 200'000ull, 400'000ull}) {
    const auto rec = window_sign_scan(3, table, sieve, X, 0.3);
    o.require(rec.count >= 1, "window X=" + std::to_string(X) + ": " + std::to_string(rec.count));
  }
  const auto c3 = count_sign_changes(3, table, sieve, 100'000);
  const auto c5 = count_sign_changes(5, table, sieve, 100'000);
  o.require(c3 >= 32, "count on [1e5, 2e5] = " + std::to_string(c3) + " >= 32");
  o.require(c3 == c5, "l=3 and l=5 counts equal");
  const double dt = seconds_since(t0);
  o.require(dt < 60, "runtime with cached table " + fmt("%.1f", dt) + " s");
  return o;
}

std::vector<std::string> run_all(const fs::path& dir, const fs::path& cache, const char* threads) {
  const std::vector<std::pair<std::string, ConfigMap>> jobs = {
      {"coeffs", {{"check", "true"}}},
      {"decompose", {}},
      {"exponents", {}},
      {"sums", {{"X", "1e3..2e5"}}},
      {"signs", {{"X", "5e4,1e5"}}},
      {"lfun", {{"terms", "20000"}}},
      {"fit", {{"X", "1e4..2e5"}}},
      {"audit", {{"terms", "20000"}}},
  };
  std::vector<std::string> statuses;
  for (const auto& [cmd, extra] : jobs) {
    ConfigMap m{{"N", "200000"}, {"out", dir.string()}, {"cache", cache.string()}, {"threads", threads}};
    for (const auto& [k, v] : extra) m[k] = v;
    std::ostringstream sink;
    statuses.push_back(cmd + "=" + std::to_string(run(cmd, make_config(m), sink)));
  }
  return statuses;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const fs::path& work) {
  Outcome o;
  const auto cache = work / "det-cache.txt";
  fs::remove(cache);
  const fs::path dirs[] = {work / "det-1a", work / "det-1b", work / "det-4"};
  const char* threads[] = {"1", "1", "4"};
  std::vector<std::string> statuses;
  for (int i = 0; i < 3; ++i) {
    fs::remove_all(dirs[i]);
    statuses = run_all(dirs[i], cache, threads[i]);
  }
  std::size_t files = 0, identical = 0;
  for (const auto& entry : fs::directory_iterator(dirs[0])) {
    ++files;
    const auto name = entry.path().filename();
    const auto a = slurp(entry.path());
    identical += a == slurp(dirs[1] / name) && a == slurp(dirs[2] / name);
  }
  o.require(files == 8 && identical == files,
            std::to_string(identical) + "/" + std::to_string(files) + " output files byte-identical across reruns and 1 vs 4 threads");
  std::string joined;
  for (const auto& s : statuses) joined += (joined.empty() ? "" : " ") + s;
  o.detail += " (exit codes: " + joined + ")";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path work = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "lfold-acceptance";
  fs::create_directories(work);
  Shared sh;
  sh.cache = work / "coeffs-1e6.txt";

  // Criterion 3 cannot hold for m != 2: zeta(ms) sum lambda(n^m) n^-s is not
  // L(s, sym^m f) unless m = 2. It is reported as a failure, never hidden.
  const std::vector<int> known_unattainable = {3};

  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> fn;
  };
  const std::vector<Criterion> criteria = {
      {1, "exponent audit", [] { return exponents(); }},
      {2, "coefficient engine", [&] { return coefficients(sh); }},
      {3, "decomposition identities", [&] { return identities(sh); }},
      {4, "local factors", [&] { return local_factors(sh); }},
      {5, "L-function factorization", [&] { return factorization(sh); }},
      {6, "moment structure", [&] { return moments(sh); }},
      {7, "sign changes", [&] { return sign_changes(sh); }},
      {8, "determinism", [&] { return determinism(work); }},
  };

  int unexpected = 0;
  std::vector<int> failed;
  for (const auto& c : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    std::printf("[%s] %d %s (%.1f s): %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, seconds_since(t0),
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) {
      failed.push_back(c.id);
      if (std::find(known_unattainable.begin(), known_unattainable.end(), c.id) == known_unattainable.end())
        ++unexpected;
    }
  }
  std::printf("%zu/%zu criteria pass", criteria.size() - failed.size(), criteria.size());
  if (!failed.empty()) {
    std::printf("; failing:");
    for (int id : failed) std::printf(" %d", id);
    std::printf(" (unexpected: %d)", unexpected);
  }
  std::printf("\n");
  return unexpected == 0 ? 0 : 1;
}
