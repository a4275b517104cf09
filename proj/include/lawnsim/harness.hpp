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

#pragma once

#include "lawnsim/airspace.hpp"
#include "lawnsim/channel.hpp"
#include "lawnsim/config.hpp"
#include "lawnsim/corridor.hpp"

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace lawnsim::harness {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunArtifacts {
  std::string command;
  std::filesystem::path output_dir;
  /// File names relative to output_dir, summary file last.
  std::vector<std::string> files;
  std::string config_hash;
  /// JSON text of the summary record as written to disk.
  std::string summary_json;
  std::vector<Check> checks;

  bool all_checks_passed() const;
};

/// Summary file written by a command, e.g. summary_capacity-sweep.json.
std::string summary_file_name(const std::string& command);

airspace::GridSpec build_grid(const ScenarioConfig& config);
channel::BeamPlan build_beam_plan(const ScenarioConfig& config, const airspace::GridSpec& grid);
corridor::CorridorPlan build_corridor_plan(const ScenarioConfig& config,
                                           const airspace::GridSpec& grid);

/// capacity_curve.csv, capacity_boundaries.csv
RunArtifacts run_capacity_sweep(const ScenarioConfig& config);

/// trajectory_<i>.csv per SINR point, survival.csv, p1_<i>.csv when P1 is on.
RunArtifacts run_control_experiment(const ScenarioConfig& config);

/// corridor_plan.json, budgets.csv, admission_log.csv, occupancy.csv
RunArtifacts run_corridor_demo(const ScenarioConfig& config);

/// Prints every summary found in `dir`. Throws ValidationError when no
/// summary exists or a listed file is missing or empty. Returns false if any
/// embedded check failed.
bool report_summary(const std::filesystem::path& dir, std::ostream& out);

}  // namespace lawnsim::harness
