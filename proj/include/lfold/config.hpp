#pragma once

// Run configuration: flat `key=value` files overridden by command-line flags.

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "error.hpp"
#include "moments.hpp"

namespace lfold {

using ConfigMap = std::map<std::string, std::string>;

struct RunConfig {
  std::uint64_t N = kDefaultTableSize;
  int weight = 12;
  std::vector<unsigned> ells;
  std::vector<std::complex<double>> s_grid;
  std::vector<std::uint64_t> X_grid;
  double delta = 0.3;
  std::string out = ".";
  std::string cache;  // empty: no cache file
  unsigned threads = 1;
  bool check = false;
  std::string format = "csv";
  std::uint64_t terms = 100'000;  // Dirichlet-series truncation
  std::uint64_t P = 0;            // Euler-product cutoff, 0 = same as terms
};

inline const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = {"N",   "weight",  "ell",   "X",     "delta",  "s",   "out",
                                                "cache", "threads", "check", "format", "terms", "P"};
  return keys;
}

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// `key=value` lines; blank lines and `#` comments ignored.
inline ConfigMap read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open config file " + path);
  ConfigMap map;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (std::find(config_keys().begin(), config_keys().end(), key) == config_keys().end())
      throw FormatError(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
    map[key] = trim(line.substr(eq + 1));
  }
  return map;
}

/// Nonnegative integer, accepting scientific notation that is exactly integral.
inline std::uint64_t parse_count(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw FormatError(what + ": not a number: '" + text + "'");
  }
  if (pos != text.size() || v < 0 || v != std::floor(v) || v > 1e18)
    throw FormatError(what + ": expected a nonnegative integer, got '" + text + "'");
  return static_cast<std::uint64_t>(v);
}

inline double parse_real(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw FormatError(what + ": not a number: '" + text + "'");
  }
  if (pos != text.size()) throw FormatError(what + ": not a number: '" + text + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

/// "3..8", "3,5,7" or "4".
inline std::vector<unsigned> parse_ell_list(const std::string& text) {
  std::vector<unsigned> out;
  const auto dots = text.find("..");
  if (dots != std::string::npos) {
    const auto lo = parse_count(text.substr(0, dots), "ell"), hi = parse_count(text.substr(dots + 2), "ell");
    if (hi < lo) throw FormatError("ell: empty range " + text);
    for (auto l = lo; l <= hi; ++l) out.push_back(static_cast<unsigned>(l));
  } else {
    for (const auto& part : split(text, ',')) out.push_back(static_cast<unsigned>(parse_count(part, "ell")));
  }
  for (auto l : out)
    if (l < 1 || l > 64) throw FormatError("ell values must lie in [1, 64]");
  return out;
}

/// "1e4..1e6" (geometric, 8 points per decade) or "1e5,2e5".
inline std::vector<std::uint64_t> parse_X_grid(const std::string& text) {
  const auto dots = text.find("..");
  if (dots != std::string::npos)
    return geometric_grid(parse_count(text.substr(0, dots), "X"), parse_count(text.substr(dots + 2), "X"));
  std::vector<std::uint64_t> out;
  for (const auto& part : split(text, ',')) {
    const auto x = parse_count(part, "X");
    if (x < 1) throw FormatError("X values must be positive");
    out.push_back(x);
  }
  return out;
}

/// "2", "3+i", "3+1i", "2.5-0.5i".
inline std::complex<double> parse_complex(const std::string& text) {
  static const std::regex re(R"(^([+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?)(?:([+-])([0-9.]+(?:[eE][+-]?[0-9]+)?)?i)?$)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw FormatError("s: cannot parse complex number '" + text + "'");
  const double re_part = parse_real(m[1].str(), "s");
  double im = 0.0;
  if (m[2].matched) {
    im = m[3].matched ? parse_real(m[3].str(), "s") : 1.0;
    if (m[2].str() == "-") im = -im;
  }
  return {re_part, im};
}

inline std::vector<std::complex<double>> parse_s_grid(const std::string& text) {
  std::vector<std::complex<double>> out;
  for (const auto& part : split(text, ',')) out.push_back(parse_complex(part));
  return out;
}

inline bool parse_bool(const std::string& text) {
  if (text == "1" || text == "true" || text == "yes" || text.empty()) return true;
  if (text == "0" || text == "false" || text == "no") return false;
  throw FormatError("expected a boolean, got '" + text + "'");
}

/// Builds a validated config. `LFOLD_CACHE` supplies the cache path when the
/// map has none.
inline RunConfig make_config(const ConfigMap& map) {
  RunConfig c;
  auto get = [&](const char* k) -> std::optional<std::string> {
    auto it = map.find(k);
    return it == map.end() ? std::nullopt : std::optional<std::string>(it->second);
  };
  if (auto v = get("N")) c.N = parse_count(*v, "N");
  if (auto v = get("weight")) c.weight = static_cast<int>(parse_count(*v, "weight"));
  if (auto v = get("ell")) c.ells = parse_ell_list(*v);
  if (auto v = get("X")) c.X_grid = parse_X_grid(*v);
  if (auto v = get("delta")) c.delta = parse_real(*v, "delta");
  if (auto v = get("s")) c.s_grid = parse_s_grid(*v);
  if (auto v = get("out")) c.out = *v;
  if (auto v = get("cache")) {
    c.cache = *v;
  } else if (const char* env = std::getenv("LFOLD_CACHE")) {
    c.cache = env;
  }
  if (auto v = get("threads")) c.threads = static_cast<unsigned>(parse_count(*v, "threads"));
  if (auto v = get("check")) c.check = parse_bool(*v);
  if (auto v = get("format")) c.format = *v;
  if (auto v = get("terms")) c.terms = parse_count(*v, "terms");
  if (auto v = get("P")) c.P = parse_count(*v, "P");

  if (c.N < 1) throw FormatError("N must be positive");
  if (!is_supported_weight(c.weight)) throw FormatError("unsupported weight " + std::to_string(c.weight));
  if (!(c.delta > 0.0 && c.delta < 1.0)) throw FormatError("delta must lie in (0, 1)");
  if (c.threads < 1) throw FormatError("threads must be >= 1");
  if (c.format != "csv" && c.format != "json") throw FormatError("format must be csv or json");
  if (c.terms < 1) throw FormatError("terms must be positive");
  if (c.out.empty()) throw FormatError("out must be a directory path");
  return c;
}

}  // namespace lfold
