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

// End-to-end checks of the command-line tool: file inventory, exit codes,
// schema, and byte-identical reruns.

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct Invocation {
  int exit_code;
  std::string output;
};

Invocation run_cli(const std::string& args) {
  const fs::path capture = fs::temp_directory_path() / "trelax_cli_capture.txt";
  const std::string command =
      std::string(TRELAX_CLI_PATH) + " " + args + " > " + capture.string() + " 2>&1";
  const int status = std::system(command.c_str());
  Invocation result{WEXITSTATUS(status), slurp(capture)};
  fs::remove(capture);
  return result;
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Cli, ListScenariosPrintsTheCatalog) {
  const Invocation r = run_cli("list-scenarios");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("basic"), std::string::npos);
  EXPECT_NE(r.output.find("desk_rest_5"), std::string::npos);
  EXPECT_NE(r.output.find("handle"), std::string::npos);
}

TEST(Cli, PairedRunWritesTracesSummaryAndPlot) {
  const fs::path dir = fresh_dir("trelax_cli_run");
  const Invocation r =
      run_cli("run desk_rest_2 --mrc both --seed 7 --out " + dir.string());
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_TRUE(fs::exists(dir / "desk_rest_2_on_7.csv"));
  EXPECT_TRUE(fs::exists(dir / "desk_rest_2_off_7.csv"));
  EXPECT_TRUE(fs::exists(dir / "summary.txt"));
  EXPECT_TRUE(fs::exists(dir / "plot.gp"));
  EXPECT_NE(r.output.find("mean static"), std::string::npos);
  // No stray temp files left behind.
  for (const auto& entry : fs::directory_iterator(dir))
    EXPECT_EQ(entry.path().extension() == ".tmp", false);

  const std::string csv = slurp(dir / "desk_rest_2_on_7.csv");
  EXPECT_EQ(csv.substr(0, 5), "time,");
  EXPECT_NE(csv.find("mode,contact_fn"), std::string::npos);
  EXPECT_NE(csv.find("MOVING"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, RerunsAreByteIdentical) {
  const fs::path a = fresh_dir("trelax_cli_rerun_a");
  const fs::path b = fresh_dir("trelax_cli_rerun_b");
  ASSERT_EQ(run_cli("run desk_rest_3 --mrc on --seed 9 --out " + a.string()).exit_code, 0);
  ASSERT_EQ(run_cli("run desk_rest_3 --mrc on --seed 9 --out " + b.string()).exit_code, 0);
  EXPECT_EQ(slurp(a / "desk_rest_3_on_9.csv"), slurp(b / "desk_rest_3_on_9.csv"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST(Cli, ValidatePrintsEffectiveConfig) {
  const Invocation r = run_cli("validate");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("control.t_min = 30"), std::string::npos);
  EXPECT_NE(r.output.find("model.moment_arms_row0"), std::string::npos);
}

TEST(Cli, ValidateRejectsBrokenConfig) {
  const fs::path dir = fresh_dir("trelax_cli_badcfg");
  const fs::path cfg = dir / "bad.cfg";
  std::ofstream(cfg) << "control.delta_l_max = -1\n";
  const Invocation r = run_cli("validate " + cfg.string());
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("config error"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, UnknownKeyIsReportedWithItsLine) {
  const fs::path dir = fresh_dir("trelax_cli_unknown");
  const fs::path cfg = dir / "typo.cfg";
  std::ofstream(cfg) << "# comment\ncontrol.t_mim = 30\n";
  const Invocation r = run_cli("validate " + cfg.string());
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.output.find("line 2"), std::string::npos);
  fs::remove_all(dir);
}

TEST(Cli, UnknownScenarioFailsWithConfigError) {
  const fs::path dir = fresh_dir("trelax_cli_noscenario");
  const Invocation r = run_cli("run warp_drive --out " + dir.string());
  EXPECT_EQ(r.exit_code, 1);
  fs::remove_all(dir);
}

TEST(Cli, EnvironmentVariableSuppliesTheConfig) {
  const fs::path dir = fresh_dir("trelax_cli_env");
  const fs::path cfg = dir / "env.cfg";
  std::ofstream(cfg) << "control.t_min = 33\n";
  setenv("TENDON_RELAX_CONFIG", cfg.string().c_str(), 1);
  const Invocation r = run_cli("validate");
  unsetenv("TENDON_RELAX_CONFIG");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.output.find("control.t_min = 33"), std::string::npos);
  fs::remove_all(dir);
}

}  // namespace
