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

#include "lawnsim/corridor.hpp"
#include "lawnsim/error.hpp"
#include "lawnsim/geometry.hpp"
#include "lawnsim/sensing_control.hpp"

#include <array>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace lawnsim::harness {

/// Config rejection carrying the dotted field path (or line/column for
/// syntax errors).
class ConfigError : public ValidationError {
 public:
  ConfigError(const std::string& where, const std::string& reason)
      : ValidationError(where + ": " + reason), where_(where) {}
  const std::string& where() const { return where_; }

 private:
  std::string where_;
};

struct GridConfig {
  Vec3 bounds_min{0.0, 0.0, 0.0};
  Vec3 bounds_max{1000.0, 1000.0, 300.0};
  Vec3 cell_size{100.0, 100.0, 100.0};
  int c_geo = 1;
};

struct BeamConfig {
  int num_beams = 16;
  std::string mapping = "round_robin";  // round_robin | by_column
};

struct CapacityConfig {
  std::vector<double> rho_db{0.0, 10.0, 20.0};
  int k_min = 1;
  int k_max = 160;
  int k_step = 1;
  std::vector<std::string> policies{"balanced"};
  double r_min = 1.0;
};

struct NoFlyConfig {
  std::string id;
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();
};

struct RequestConfig {
  std::string id;
  double time = 0.0;
  std::string action = "admit";  // admit | release
  Vec3 origin = Vec3::Zero();
  Vec3 destination = Vec3::Zero();
  double r_min = 1.0;
};

struct CorridorConfig {
  /// Empty means three equal bands over the grid's vertical extent.
  std::vector<corridor::AltitudeBand> layers;
  std::string bottom_role = "directional_ew";
  double buffer_margin = 0.0;
  std::vector<NoFlyConfig> nofly;
  double rho_db = 10.0;
  double r_min = 1.0;
  std::vector<RequestConfig> requests;
};

struct P1Config {
  bool enabled = false;
  double theta = 0.3;
  int num_elements = 4;
  double spacing = 0.5;
  double noise_var = 1.0;
  std::complex<double> channel_gain{1.0, 0.0};
  int kappa_points = 101;
  double power_cap = 1e6;
};

struct ControlConfig {
  control::Matrix A = control::Matrix::Constant(1, 1, 2.0);
  control::Matrix B = control::Matrix::Constant(1, 1, 1.0);
  control::Matrix process_noise = control::Matrix::Constant(1, 1, 0.01);
  control::Matrix gain = control::Matrix::Constant(1, 1, 1.5);
  control::Matrix lyapunov = control::Matrix::Constant(1, 1, 1.0);
  double eta = 0.5;
  double steepness = 10.0;
  double gamma_th_db = 0.0;
  control::SensingSpec sensing = default_sensing();
  double sensing_beam_gain = 10.0;
  double bandwidth = 1.0;
  std::vector<double> sinr_db{-20.0, -10.0, -3.0, 0.0, 3.0, 6.0206, 10.0};
  bool sinr_relative_to_critical = true;
  int horizon = 200;
  control::Vector initial_state;  ///< empty = all ones
  double divergence_ceiling = 1e6;
  P1Config p1;

  static control::SensingSpec default_sensing() {
    control::SensingSpec s;
    s.noise_var = 1e-3;
    s.snapshots = 16;
    s.rx_antennas = 8;
    s.slant_range = 100.0;
    return s;
  }
};

struct ScenarioConfig {
  std::uint64_t seed = 0;
  int replicates = 500;
  std::string output_dir = "out";
  GridConfig grid;
  BeamConfig beams;
  CapacityConfig capacity;
  CorridorConfig corridors;
  ControlConfig control;
};

/// Parses and validates a JSON scenario file. Defaults fill omitted keys;
/// unknown keys and a missing seed are rejected.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Cross-module checks (grid, beams, corridor plan, plant, link, sensing).
void validate_config(const ScenarioConfig& config);

/// Canonical JSON of every semantic field (output_dir excluded).
std::string canonical_config(const ScenarioConfig& config);

/// 16-hex-digit FNV-1a 64 digest of canonical_config.
std::string config_hash(const ScenarioConfig& config);

}  // namespace lawnsim::harness
