// SPDX-License-Identifier: Apache-2.0
//
// azpos command line front end: seeded Monte Carlo runs of the positioning
// pipeline, CSV emission, and the baseline comparison table.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "azpos/errors.hpp"
#include "azpos/scenario.hpp"
#include "azpos/solver.hpp"

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string out_dir;
  std::optional<uint64_t> seed;
  std::optional<int> repetitions;
  bool legacy_mismatch = false;
};

void apply_overrides(azpos::ScenarioConfig& config, const CommonOptions& opts) {
  if (opts.seed) config.seed = *opts.seed;
  if (opts.repetitions) config.repetitions = *opts.repetitions;
  if (opts.legacy_mismatch) config.legacy_tof_mismatch = true;
}

std::string write_run(const azpos::ScenarioConfig& config, const azpos::RunResult& result,
                      const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::string path = (fs::path(out_dir) / (config.name + ".csv")).string();
  azpos::emit_csv(result, path);
  return path;
}

void print_summary(const azpos::ScenarioConfig& config, const azpos::RunResult& result) {
  std::printf("%s: %d repetitions, seed %llu\n", config.name.c_str(), config.repetitions,
              static_cast<unsigned long long>(config.seed));
  std::printf("  %-10s %12s %12s %12s %10s\n", "rsta", "median [cm]", "p75 [cm]", "max [cm]",
              "LOS rate");
  for (const auto& label : result.labels) {
    const auto& samples = result.per_rsta.at(label);
    std::vector<double> errors;
    int los_votes = 0;
    for (const auto& s : samples) {
      errors.push_back(s.position_error_cm);
      if (s.los_likelihood >= 0.5) ++los_votes;
    }
    auto pct = azpos::percentile_report(errors);
    std::printf("  %-10s %12.2f %12.2f %12.2f %9.0f%%\n", label.c_str(), pct[1], pct[2], pct[3],
                100.0 * los_votes / samples.size());
  }
}

int run_simulate(const std::string& config_path, const CommonOptions& opts) {
  azpos::ScenarioConfig config = azpos::load_config(config_path);
  apply_overrides(config, opts);
  azpos::RunResult result = azpos::run_scenario(config);
  std::string path = write_run(config, result, opts.out_dir);
  print_summary(config, result);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int run_fig4(const CommonOptions& opts) {
  azpos::ScenarioConfig config = azpos::default_fig4_scenario();
  apply_overrides(config, opts);
  azpos::RunResult result = azpos::run_scenario(config);
  std::string path = write_run(config, result, opts.out_dir);
  print_summary(config, result);
  std::printf("wrote %s\n", path.c_str());
  return 0;
}

int run_compare(const CommonOptions& opts) {
  std::map<std::string, azpos::RunResult> runs;
  for (azpos::ScenarioConfig config : azpos::default_compare_scenarios()) {
    apply_overrides(config, opts);
    azpos::RunResult result = azpos::run_scenario(config);
    write_run(config, result, opts.out_dir);
    // compare_<label> -> <label>
    runs[config.name.substr(std::string("compare_").size())] = std::move(result);
  }
  std::string table = azpos::compare_report(runs);
  fs::create_directories(opts.out_dir);
  std::string table_path = (fs::path(opts.out_dir) / "comparison_table.txt").string();
  std::ofstream out(table_path, std::ios::binary);
  if (!out) azpos::raise(azpos::Errc::io_error, "cannot write " + table_path);
  out << table;
  std::cout << table;
  std::printf("wrote %s\n", table_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Desk-scale IEEE 802.11az mmWave positioning simulator"};
  app.require_subcommand(1);

  CommonOptions opts;
  std::string config_path;

  auto add_common = [&](CLI::App* cmd, bool with_mismatch) {
    cmd->add_option("--out", opts.out_dir, "output directory")->required();
    cmd->add_option("--seed", opts.seed, "override the scenario seed");
    cmd->add_option("--repetitions", opts.repetitions, "override the repetition count");
    if (with_mismatch) {
      cmd->add_flag("--legacy-mismatch", opts.legacy_mismatch,
                    "draw ToF from an independent channel realization");
    }
  };

  CLI::App* simulate = app.add_subcommand("simulate", "run a JSON scenario config");
  simulate->add_option("--config", config_path, "scenario JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  add_common(simulate, true);

  CLI::App* fig4 = app.add_subcommand("reproduce-fig4",
                                      "run the bundled six-station room study");
  add_common(fig4, true);

  CLI::App* compare = app.add_subcommand("compare",
                                         "run the baseline-distance scenarios and print the "
                                         "comparison table");
  add_common(compare, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return run_simulate(config_path, opts);
    if (fig4->parsed()) return run_fig4(opts);
    if (compare->parsed()) return run_compare(opts);
  } catch (const azpos::Error& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 0;
}
