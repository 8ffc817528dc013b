#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "lfold/config.hpp"
#include "lfold/report.hpp"

namespace {

const char* kSubcommands[] = {"coeffs", "decompose", "exponents", "sums", "signs", "lfun", "fit", "audit"};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tensor-power eigenform coefficients: tables, identities, moments, sign changes"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  lfold::ConfigMap flags;
  app.add_option("--config", config_path, "key=value configuration file; flags override it");
  const std::pair<const char*, const char*> value_flags[] = {
      {"N", "table size"},
      {"weight", "eigenform weight (12 built in; others need --cache)"},
      {"ell", "tensor power list: 3..8 or 3,5"},
      {"X", "X grid: 1e4..1e6 (geometric) or 1e5,2e5"},
      {"delta", "window exponent in (0, 1)"},
      {"s", "comma-separated s values, e.g. 2,2.5,3+i"},
      {"out", "output directory"},
      {"cache", "coefficient cache file (default $LFOLD_CACHE)"},
      {"threads", "worker threads"},
      {"format", "csv or json"},
      {"terms", "Dirichlet-series truncation"},
      {"P", "Euler-product prime cutoff (0: same as terms)"},
  };
  for (const auto& [key, help] : value_flags) {
    app.add_option_function<std::string>(
           std::string("--") + key, [&flags, k = std::string(key)](const std::string& v) { flags[k] = v; }, help)
        ->configurable(false);
  }
  app.add_flag_function("--check", [&flags](std::int64_t) { flags["check"] = "true"; }, "run consistency checks");

  for (const char* name : kSubcommands) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << lfold::error_json("format", e.what()) << "\n";
    return 2;
  }

  try {
    lfold::ConfigMap merged;
    if (!config_path.empty()) merged = lfold::read_config_file(config_path);
    for (const auto& [k, v] : flags) merged[k] = v;
    const lfold::RunConfig config = lfold::make_config(merged);
    return lfold::run(app.get_subcommands().front()->get_name(), config, std::cout);
  } catch (const lfold::Error& e) {
    std::cerr << lfold::error_json(lfold::to_string(e.kind()), e.what()) << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << lfold::error_json("internal", e.what()) << "\n";
    return 1;
  }
}
