// Copyright 2026 The lawnsim Authors
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

#include "lawnsim/csv.hpp"
#include "lawnsim/harness.hpp"

#include <json.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace lawnsim::harness {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("lawnsim_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ScenarioConfig small_capacity(const fs::path& out) {
  auto cfg = parse_config(R"({"seed": 9, "replicates": 20,
    "capacity": {"rho_db": [0, 10], "k_max": 40, "policies": ["balanced", "uniform_random"]}})");
  cfg.output_dir = out.string();
  return cfg;
}

TEST(CapacitySweep, BoundariesAndChecks) {
  const auto dir = scratch("cap");
  const auto run = run_capacity_sweep(small_capacity(dir));
  EXPECT_TRUE(run.all_checks_passed());
  ASSERT_EQ(run.files.back(), summary_file_name("capacity-sweep"));
  const auto rows = read_csv(dir / "capacity_boundaries.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1][0], "0");
  EXPECT_EQ(rows[1][2], "16");
  EXPECT_EQ(rows[1][3], "32");  // L (1 + 1/rho) at rho = 1
  EXPECT_EQ(rows[2][3], "17.6");
  for (const auto& f : run.files) EXPECT_GT(fs::file_size(dir / f), 0u) << f;
}

TEST(CapacitySweep, RerunIsByteIdentical) {
  const auto a = scratch("cap_a");
  const auto b = scratch("cap_b");
  const auto ra = run_capacity_sweep(small_capacity(a));
  const auto rb = run_capacity_sweep(small_capacity(b));
  ASSERT_EQ(ra.files, rb.files);
  for (const auto& f : ra.files) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  EXPECT_EQ(ra.config_hash, rb.config_hash);
}

TEST(ControlExperiment, WritesTrajectoriesAndSurvival) {
  const auto dir = scratch("ctl");
  auto cfg = load_config(fs::path(LAWNSIM_CONFIG_DIR) / "control.json");
  cfg.output_dir = dir.string();
  cfg.replicates = 60;
  cfg.control.horizon = 60;
  cfg.control.sinr_db = {-20.0, 6.0206};
  const auto run = run_control_experiment(cfg);
  EXPECT_TRUE(run.all_checks_passed());
  for (const auto& f : run.files) EXPECT_TRUE(fs::exists(dir / f)) << f;
  const auto survival = read_csv(dir / "survival.csv");
  ASSERT_EQ(survival.size(), 3u);
  EXPECT_EQ(survival[0][0], "point");
  EXPECT_EQ(survival[0][6], "diverged_frac");
  EXPECT_EQ(read_csv(dir / "trajectory_0.csv").size(), 62u);
  EXPECT_TRUE(fs::exists(dir / "p1_1.csv"));
  const auto summary = json::parse(run.summary_json);
  EXPECT_DOUBLE_EQ(summary.at("summary").at("gamma_critical").get<double>(), 1.0);
}

TEST(CorridorDemo, ShippedScenario) {
  const auto dir = scratch("cor");
  auto cfg = load_config(fs::path(LAWNSIM_CONFIG_DIR) / "corridor.json");
  cfg.output_dir = dir.string();
  const auto run = run_corridor_demo(cfg);
  EXPECT_TRUE(run.all_checks_passed());
  const auto s = json::parse(run.summary_json).at("summary");
  EXPECT_EQ(s.at("rejections").at("geofence").get<int>(), 1);
  const auto log = read_csv(dir / "admission_log.csv");
  ASSERT_EQ(log.size(), 7u);
  EXPECT_EQ(log[5][2], "released");
}

TEST(CorridorDemo, OneOverBudgetIsRejectedOnCapacity) {
  const auto dir = scratch("cor_cap");
  auto cfg = parse_config(R"({"seed": 1, "corridors": {"rho_db": 0, "r_min": 0.5}})");
  cfg.output_dir = dir.string();
  run_corridor_demo(cfg);
  int budget = -1;
  for (const auto& row : read_csv(dir / "budgets.csv")) {
    if (row[0] == "ew-0") budget = std::stoi(row[4]);
  }
  ASSERT_GT(budget, 0);
  for (int i = 0; i <= budget; ++i) {
    RequestConfig r;
    r.id = "u" + std::to_string(i);
    r.time = i;
    r.origin = Vec3(50, 50, 50);
    r.destination = Vec3(950, 50, 50);
    r.r_min = 0.5;
    cfg.corridors.requests.push_back(r);
  }
  fs::remove_all(dir);
  const auto run = run_corridor_demo(cfg);
  EXPECT_TRUE(run.all_checks_passed());
  const auto s = json::parse(run.summary_json).at("summary");
  EXPECT_EQ(s.at("admitted").get<int>(), budget);
  EXPECT_EQ(s.at("rejected").get<int>(), 1);
  EXPECT_EQ(s.at("rejections").at("capacity").get<int>(), 1);
}

TEST(Report, PrintsEveryCommandAndFailsOnEmptyDir) {
  const auto dir = scratch("report");
  auto cap = small_capacity(dir);
  run_capacity_sweep(cap);
  auto cor = load_config(fs::path(LAWNSIM_CONFIG_DIR) / "corridor.json");
  cor.output_dir = dir.string();
  run_corridor_demo(cor);
  std::ostringstream out;
  EXPECT_TRUE(report_summary(dir, out));
  EXPECT_NE(out.str().find("PASS noise_masked_plateau"), std::string::npos) << out.str();
  EXPECT_NE(out.str().find("PASS occupancy_within_budget"), std::string::npos) << out.str();

  const auto empty = scratch("report_empty");
  fs::create_directories(empty);
  std::ostringstream sink;
  EXPECT_THROW(report_summary(empty, sink), ValidationError);

  fs::remove(dir / "capacity_curve.csv");
  EXPECT_THROW(report_summary(dir, sink), ValidationError);
}

}  // namespace
}  // namespace lawnsim::harness
