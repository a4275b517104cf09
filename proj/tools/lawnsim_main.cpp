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

#include "lawnsim/config.hpp"
#include "lawnsim/error.hpp"
#include "lawnsim/harness.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> replicates;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool config_required) {
  auto* opt = cmd->add_option("--config", flags.config, "Scenario config (JSON)");
  if (config_required) opt->required();
  cmd->add_option("--seed", flags.seed, "Override the config seed");
  cmd->add_option("--out", flags.out, "Override the output directory");
  cmd->add_option("--replicates", flags.replicates, "Override the replicate count")
      ->check(CLI::PositiveNumber);
}

lawnsim::harness::ScenarioConfig resolve(const CommonFlags& flags) {
  auto cfg = lawnsim::harness::load_config(flags.config);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.out) cfg.output_dir = *flags.out;
  if (flags.replicates) cfg.replicates = *flags.replicates;
  lawnsim::harness::validate_config(cfg);
  return cfg;
}

void announce(const lawnsim::harness::RunArtifacts& art) {
  std::cout << art.command << ": wrote " << art.files.size() << " files to "
            << art.output_dir.string() << " (config " << art.config_hash << ")\n";
  for (const auto& c : art.checks) {
    if (!c.passed) std::cerr << "check failed: " << c.name << " " << c.detail << "\n";
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lawnsim: low-altitude wireless network simulator"};
  app.require_subcommand(1);

  CommonFlags sweep_flags, control_flags, corridor_flags, report_flags;
  auto* sweep = app.add_subcommand("capacity-sweep", "Per-UAV spectral efficiency vs load");
  add_common(sweep, sweep_flags, true);
  auto* control = app.add_subcommand("control-sim", "Closed-loop survival vs SINR");
  add_common(control, control_flags, true);
  auto* corridor = app.add_subcommand("corridor-demo", "Replay flight requests through admission");
  add_common(corridor, corridor_flags, true);
  auto* report = app.add_subcommand("report", "Summarize the artifacts of previous runs");
  add_common(report, report_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*sweep) {
      announce(lawnsim::harness::run_capacity_sweep(resolve(sweep_flags)));
    } else if (*control) {
      announce(lawnsim::harness::run_control_experiment(resolve(control_flags)));
    } else if (*corridor) {
      announce(lawnsim::harness::run_corridor_demo(resolve(corridor_flags)));
    } else if (*report) {
      std::string dir;
      if (report_flags.out) {
        dir = *report_flags.out;
      } else if (!report_flags.config.empty()) {
        dir = resolve(report_flags).output_dir;
      } else {
        throw lawnsim::ValidationError("report needs --out or --config");
      }
      if (!lawnsim::harness::report_summary(dir, std::cout)) return 2;
    }
  } catch (const lawnsim::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
