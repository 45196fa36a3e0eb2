// Copyright 2026 The tendon-relax Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line front end: run the experiment scenarios with or without
// muscle relaxation, validate configuration files, and emit CSV traces,
// comparison summaries and gnuplot scripts.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "trelax/config.hpp"
#include "trelax/scenarios.hpp"
#include "trelax/trace_io.hpp"

namespace {

namespace fs = std::filesystem;

trelax::AppConfig load_effective_config(const std::string& config_flag) {
  std::string path = config_flag;
  if (path.empty()) {
    if (const char* env = std::getenv("TENDON_RELAX_CONFIG")) path = env;
  }
  if (path.empty()) return trelax::default_config();
  return trelax::load_config(path);
}

int cmd_run(const std::string& scenario_name, const std::string& mrc, std::uint64_t seed,
            const std::string& config_flag, const std::string& out_dir) {
  trelax::AppConfig cfg;
  trelax::Scenario scenario;
  try {
    cfg = load_effective_config(config_flag);
    trelax::validate_config(cfg);
    scenario = trelax::build_scenario(scenario_name, seed, cfg.model, cfg.scenario, cfg.plant);
    fs::create_directories(out_dir);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }

  const bool run_with = mrc == "on" || mrc == "both";
  const bool run_without = mrc == "off" || mrc == "both";
  std::optional<trelax::RunResult> with_result, without_result;
  std::string diagnostic;

  auto execute = [&](bool enabled) {
    return trelax::run_scenario(scenario, enabled, cfg.model, cfg.plant, cfg.control);
  };
  auto csv_name = [&](const char* tag) {
    return scenario_name + "_" + tag + "_" + std::to_string(seed) + ".csv";
  };

  if (run_with) {
    with_result = execute(true);
    trelax::write_trace_csv(fs::path(out_dir) / csv_name("on"), with_result->records,
                            cfg.model.n_joints, cfg.model.n_muscles);
    if (with_result->diverged) diagnostic = with_result->diagnostic;
  }
  if (run_without && diagnostic.empty()) {
    without_result = execute(false);
    trelax::write_trace_csv(fs::path(out_dir) / csv_name("off"), without_result->records,
                            cfg.model.n_joints, cfg.model.n_muscles);
    if (without_result->diverged) diagnostic = without_result->diagnostic;
  }
  if (!diagnostic.empty()) {
    std::cerr << "simulation diverged: " << diagnostic << "\n";
    return 2;
  }

  const std::string primary_csv = run_with ? csv_name("on") : csv_name("off");
  const std::optional<std::string> secondary_csv =
      (run_with && run_without) ? std::optional<std::string>(csv_name("off")) : std::nullopt;
  trelax::write_plot_script(fs::path(out_dir) / "plot.gp", primary_csv, secondary_csv,
                            cfg.model.n_joints, cfg.model.n_muscles);

  if (with_result && without_result) {
    const trelax::ComparisonSummary summary =
        trelax::summarize(with_result->records, without_result->records, scenario,
                          cfg.control.delta_l_max);
    trelax::write_summary(fs::path(out_dir) / "summary.txt", summary);
    std::cout << trelax::format_summary(summary);
  }
  return 0;
}

int cmd_validate(const std::string& path, const std::string& config_flag) {
  try {
    trelax::AppConfig cfg =
        path.empty() ? load_effective_config(config_flag) : trelax::load_config(path);
    trelax::validate_config(cfg);
    std::cout << trelax::format_effective_config(cfg);
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tendon-driven arm simulator with muscle relaxation control"};
  app.require_subcommand(1);

  std::string scenario_name;
  std::string mrc = "both";
  std::uint64_t seed = 0;
  std::string config_path;
  std::string out_dir = ".";

  CLI::App* run = app.add_subcommand("run", "run a scenario and write trace CSVs");
  run->add_option("scenario", scenario_name, "scenario name (see list-scenarios)")->required();
  run->add_option("--mrc", mrc, "relaxation: on, off, or both")
      ->check(CLI::IsMember({"on", "off", "both"}));
  run->add_option("--seed", seed, "random seed for seeded scenarios");
  run->add_option("--config", config_path, "config file (fallback: $TENDON_RELAX_CONFIG)");
  run->add_option("--out", out_dir, "output directory");

  std::string validate_path;
  CLI::App* validate = app.add_subcommand("validate", "check a config file and print it");
  validate->add_option("path", validate_path,
                       "config file to validate (fallback: $TENDON_RELAX_CONFIG)");

  CLI::App* list = app.add_subcommand("list-scenarios", "print the scenario names");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmd_run(scenario_name, mrc, seed, config_path, out_dir);
  if (validate->parsed()) return cmd_validate(validate_path, config_path);
  if (list->parsed()) {
    for (const std::string& name : trelax::scenario_names()) std::cout << name << "\n";
    return 0;
  }
  return 1;
}
