#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "lfold/eigenform.hpp"
#include "lfold/sieve.hpp"

namespace lfold::testing {

inline constexpr std::uint64_t kSmallN = 20'000;

struct DeltaFixture {
  QExpansion q;
  EigenformTable table;
  SquarefreeSieve sieve;
};

/// Delta to kSmallN, built once per test binary.
inline const DeltaFixture& small_delta() {
  static const DeltaFixture f = [] {
    DeltaFixture d;
    d.q = build_delta_qexpansion(kSmallN);
    d.table = normalize(d.q, 12);
    d.sieve = build_sieve(kSmallN);
    return d;
  }();
  return f;
}

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("lfold-test-" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lfold::testing
