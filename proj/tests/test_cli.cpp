#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "lfold/config.hpp"
#include "lfold/report.hpp"
#include "support.hpp"

using namespace lfold;
using lfold::testing::scratch_dir;
using lfold::testing::slurp;

namespace {

RunConfig config_for(const std::filesystem::path& dir, ConfigMap extra = {}) {
  ConfigMap m{{"N", "30000"}, {"out", dir.string()}, {"cache", (dir / "coeffs.txt").string()}};
  for (auto& [k, v] : extra) m[k] = v;
  return make_config(m);
}

}  // namespace

TEST(Config, Defaults) {
  ::unsetenv("LFOLD_CACHE");
  const auto c = make_config({});
  EXPECT_EQ(c.N, 1'000'000u);
  EXPECT_EQ(c.weight, 12);
  EXPECT_DOUBLE_EQ(c.delta, 0.3);
  EXPECT_EQ(c.threads, 1u);
  EXPECT_TRUE(c.cache.empty());
}

TEST(Config, Parsers) {
  EXPECT_EQ(parse_count("1e6", "N"), 1'000'000u);
  EXPECT_THROW(parse_count("1.5", "N"), FormatError);
  EXPECT_THROW(parse_count("-3", "N"), FormatError);
  EXPECT_THROW(parse_count("abc", "N"), FormatError);
  EXPECT_EQ(parse_ell_list("3..8"), (std::vector<unsigned>{3, 4, 5, 6, 7, 8}));
  EXPECT_EQ(parse_ell_list("3, 5"), (std::vector<unsigned>{3, 5}));
  EXPECT_THROW(parse_ell_list("0"), FormatError);
  EXPECT_THROW(parse_ell_list("8..3"), FormatError);
  EXPECT_EQ(parse_X_grid("1e5,2e5"), (std::vector<std::uint64_t>{100'000, 200'000}));
  EXPECT_EQ(parse_X_grid("1e4..1e6").size(), 17u);
  EXPECT_EQ(parse_complex("3+i"), std::complex<double>(3, 1));
  EXPECT_EQ(parse_complex("2.5"), std::complex<double>(2.5, 0));
  EXPECT_EQ(parse_complex("2-0.5i"), std::complex<double>(2, -0.5));
  EXPECT_THROW(parse_complex("3+j"), FormatError);
  EXPECT_EQ(parse_s_grid("2,2.5,3+i").size(), 3u);
}

TEST(Config, Validation) {
  EXPECT_THROW(make_config({{"delta", "1.0"}}), FormatError);
  EXPECT_THROW(make_config({{"delta", "0"}}), FormatError);
  EXPECT_THROW(make_config({{"N", "0"}}), FormatError);
  EXPECT_THROW(make_config({{"weight", "14"}}), FormatError);
  EXPECT_THROW(make_config({{"threads", "0"}}), FormatError);
  EXPECT_THROW(make_config({{"format", "xml"}}), FormatError);
}

TEST(Config, FileAndEnvironment) {
  const auto dir = scratch_dir("config");
  const auto path = dir / "run.conf";
  std::ofstream(path) << "# comment\nN = 5000\n\nell=3..4\n";
  const auto m = read_config_file(path.string());
  EXPECT_EQ(m.at("N"), "5000");
  EXPECT_EQ(m.at("ell"), "3..4");
  std::ofstream(dir / "bad.conf") << "color=blue\n";
  EXPECT_THROW(read_config_file((dir / "bad.conf").string()), FormatError);
  std::ofstream(dir / "bad2.conf") << "just text\n";
  EXPECT_THROW(read_config_file((dir / "bad2.conf").string()), FormatError);
  EXPECT_THROW(read_config_file((dir / "missing.conf").string()), FormatError);

  ::setenv("LFOLD_CACHE", "/tmp/from-env.txt", 1);
  EXPECT_EQ(make_config({}).cache, "/tmp/from-env.txt");
  EXPECT_EQ(make_config({{"cache", "x.txt"}}).cache, "x.txt");
  ::unsetenv("LFOLD_CACHE");
}

TEST(Run, Exponents) {
  const auto dir = scratch_dir("exponents");
  std::ostringstream out;
  EXPECT_EQ(run("exponents", config_for(dir, {{"ell", "3..8"}}), out), 0);
  std::istringstream lines(out.str());
  std::string line;
  int rows = 0, mismatches = 0;
  std::getline(lines, line);
  EXPECT_EQ(line, "ell,kind,num,den,error_exponent,paper_quoted,match");
  while (std::getline(lines, line)) {
    ++rows;
    mismatches += line.ends_with(",false");
  }
  EXPECT_EQ(rows, 6);
  EXPECT_EQ(mismatches, 2);
  EXPECT_EQ(slurp(dir / "exponents.csv"), out.str());

  std::ostringstream js;
  EXPECT_EQ(run("exponents", config_for(dir, {{"format", "json"}}), js), 0);
  const auto doc = Json::parse(js.str());
  EXPECT_EQ(doc["schema_version"], 1);
  EXPECT_EQ(doc["rows"].size(), 6u);
  EXPECT_EQ(doc["rows"][0]["paper_quoted"], "7/10");
}

TEST(Run, CoeffsCheckAndCache) {
  const auto dir = scratch_dir("coeffs");
  std::ostringstream out;
  EXPECT_EQ(run("coeffs", config_for(dir, {{"N", "1000"}, {"check", "true"}}), out), 0);
  const auto doc = Json::parse(out.str());
  EXPECT_EQ(doc["ok"], true);
  EXPECT_EQ(doc["checks"][0]["status"], "pass");
  EXPECT_EQ(doc["checks"][1]["status"], "pass");
  std::ifstream in(dir / "coeffs.txt");
  const auto q = read_coefficient_cache(in);
  EXPECT_EQ(q.truncation(), 1000u);
  EXPECT_EQ(q[2], -24);
  // A smaller N is served from the same cache, truncated.
  std::string source;
  const auto small = acquire_expansion(config_for(dir, {{"N", "10"}}), source);
  EXPECT_EQ(source, "cache");
  EXPECT_EQ(small.truncation(), 10u);
  EXPECT_EQ(small[10], -115920);
}

TEST(Run, WeightWithoutCacheIsAnError) {
  const auto dir = scratch_dir("weight");
  std::ostringstream out;
  EXPECT_THROW(run("coeffs", make_config({{"N", "100"}, {"weight", "16"}, {"out", dir.string()}}), out), DomainError);
  const auto path = dir / "w12.txt";
  {
    std::ostringstream os;
    write_coefficient_cache(os, build_delta_qexpansion(50));
    std::ofstream(path) << os.str();
  }
  EXPECT_THROW(run("coeffs", make_config({{"N", "50"}, {"weight", "16"}, {"cache", path.string()}, {"out", dir.string()}}), out),
               DomainError);
}

TEST(Run, Decompose) {
  const auto dir = scratch_dir("decompose");
  std::ostringstream out;
  EXPECT_EQ(run("decompose", config_for(dir, {{"ell", "3"}}), out), 0);
  EXPECT_EQ(out.str(), "ell=3 coeffs=1,2 identity=OK\n");
  EXPECT_EQ(slurp(dir / "decompose.csv"), "ell,n,sym_power,coeff\n3,0,3,1\n3,1,1,2\n");
}

TEST(Run, SumsSignsFitLfun) {
  const auto dir = scratch_dir("various");
  std::ostringstream sums, signs, fit, lfun;
  EXPECT_EQ(run("sums", config_for(dir, {{"ell", "2"}, {"X", "1,10,100"}}), sums), 0);
  EXPECT_TRUE(sums.str().starts_with("ell,X,S,T,A\n2,1,1,1,1\n"));
  EXPECT_EQ(run("signs", config_for(dir, {{"X", "1e4"}}), signs), 0);
  EXPECT_NE(slurp(dir / "sign_counts.csv").find("3,10000,"), std::string::npos);
  EXPECT_EQ(run("fit", config_for(dir, {{"X", "1e3..3e4"}}), fit), 0);
  EXPECT_EQ(Json::parse(fit.str())["degree"], 1);
  EXPECT_EQ(run("lfun", config_for(dir, {{"ell", "1,2"}, {"terms", "5000"}, {"s", "2,3+i"}}), lfun), 0);
  std::istringstream lines(lfun.str());
  std::string line;
  int count = 0;
  while (std::getline(lines, line)) {
    const auto j = Json::parse(line);
    EXPECT_LE(j["residual"].get<double>(), j["tail_bound"].get<double>());
    EXPECT_EQ(j["s"].size(), 2u);
    ++count;
  }
  EXPECT_EQ(count, 8);
}

TEST(Run, ContractViolations) {
  const auto dir = scratch_dir("violations");
  std::ostringstream out;
  EXPECT_THROW(run("frobnicate", config_for(dir), out), DomainError);
  EXPECT_THROW(run("signs", config_for(dir, {{"ell", "2"}, {"X", "100"}}), out), DomainError);
  EXPECT_THROW(run("lfun", config_for(dir, {{"s", "1.2"}}), out), DomainError);
  EXPECT_THROW(run("signs", config_for(dir, {{"X", "29990"}}), out), IndexError);
  const auto j = Json::parse(error_json("domain", "bad"));
  EXPECT_EQ(j["error"]["kind"], "domain");
  EXPECT_EQ(j["schema_version"], 1);
}

TEST(Run, IdempotentAcrossThreads) {
  const auto a = scratch_dir("idem-a"), b = scratch_dir("idem-b");
  for (const auto& [dir, threads] : {std::pair{a, "1"}, std::pair{b, "3"}}) {
    std::ostringstream sink;
    run("sums", config_for(dir, {{"threads", threads}, {"X", "1e2..3e4"}}), sink);
    run("signs", config_for(dir, {{"threads", threads}, {"X", "1e4"}}), sink);
    run("lfun", config_for(dir, {{"threads", threads}, {"terms", "3000"}, {"ell", "1..3"}}), sink);
  }
  for (const char* f : {"sums.csv", "signs.csv", "sign_counts.csv", "lfun.jsonl", "coeffs.txt"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}
