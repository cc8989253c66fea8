#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "doublets/experiment.hpp"

namespace {

constexpr int kConfigFailure = 2;
constexpr int kNumericalFailure = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw doublets::ConfigError("cannot read config file " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Driven double-well doublets: renormalized four-level model vs exact propagation"};
  std::string config_path;
  std::string out_dir;
  double ratio = -1.0;
  std::size_t levels = 0;
  auto* config_opt = app.add_option("--config", config_path, "key=value experiment config");
  app.add_option("--out", out_dir, "output directory (overrides 'outputs')");
  auto* ratio_opt = app.add_option("--ratio", ratio, "Omega12/omega (overrides 'ratio')");
  auto* levels_opt = app.add_option("--levels", levels, "propagated levels (overrides 'n_levels')");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigFailure;
  }

  try {
    doublets::ExperimentConfig cfg;
    if (config_opt->count()) {
      cfg = doublets::parse_config(read_file(config_path));
    } else {
      if (!ratio_opt->count()) throw doublets::ConfigError("either --config or --ratio is required");
      cfg = doublets::parse_config("D=4\nratio=" + std::to_string(ratio) + "\n");
    }
    if (ratio_opt->count()) cfg.ratio = ratio;
    if (levels_opt->count()) cfg.n_levels = levels;
    if (!out_dir.empty()) cfg.outputs = out_dir;
    cfg.validate();

    const doublets::ExperimentResult res = doublets::run_experiment(cfg);
    std::cout << res.report;
    std::cout << "artifacts written to " << res.directory.string() << "\n";
    return 0;
  } catch (const doublets::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const doublets::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
}
