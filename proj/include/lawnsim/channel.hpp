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

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace lawnsim::channel {

/// Static partition of grid cells among orthogonal beams. Two UAVs
/// interfere iff their cells map to the same beam.
struct BeamPlan {
  int num_beams = 1;
  std::vector<int> cell_to_beam;

  /// Cell n serves beam n mod L.
  static BeamPlan round_robin(std::size_t num_cells, int num_beams);
  /// All cells of a vertical (x, y) column share a beam; columns are dealt
  /// round-robin over beams in row-major (x, y) order.
  static BeamPlan by_column(const airspace::GridSpec& grid, int num_beams);

  void validate() const;
};

enum class Regime { NoiseMasked, LinearTradeoff, Saturation };

enum class AllocationPolicy { Balanced, UniformRandom };

std::string_view to_string(Regime regime);
std::string_view to_string(AllocationPolicy policy);
AllocationPolicy parse_policy(std::string_view text);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

/// Beam occupancy mu_k for every UAV (counts UAV k itself, so mu_k >= 1).
std::vector<int> beam_occupancy(const airspace::TrafficState& state, const BeamPlan& plan);

/// gamma = rho / ((mu - 1) rho + 1). rho may be +inf.
double sinr(int mu, double rho);

/// log2(1 + gamma) in bits/s/Hz.
double spectral_efficiency(double gamma);

/// Airspace load L(1 + 1/rho) above which the system is interference-limited.
double critical_capacity(int num_beams, double rho);

/// NoiseMasked for c_air <= L, LinearTradeoff for L < c_air <= C_crit,
/// Saturation above C_crit.
Regime classify_regime(double c_air, int num_beams, double rho);

/// Interference-limited closed form log2(1 + 1/(c_air/L - 1)), c_air > L.
double saturation_capacity_approx(double c_air, int num_beams);

struct QosBound {
  double value = 0.0;      ///< clamped at 0
  double raw = 0.0;        ///< L (1 + 1/(2^r - 1) - 1/rho), unclamped
  bool feasible = true;    ///< false when raw < 0
  /// raw < L, i.e. r_min > log2(1 + rho): not even a lone UAV per beam meets
  /// the rate requirement.
  bool below_single_occupancy = false;
};

QosBound qos_capacity_bound(int num_beams, double rho, double r_min);

struct SeRow {
  int k = 0;
  double rho = 0.0;
  AllocationPolicy policy = AllocationPolicy::Balanced;
  double mean_se = 0.0;
  double stderr_se = 0.0;
  Regime regime = Regime::NoiseMasked;
};

/// Mean per-UAV spectral efficiency for each (K, rho). Balanced is exact and
/// ignores `replicates`; UniformRandom draws an independent beam per UAV per
/// replicate from a stream keyed by (seed, K, rho index, replicate).
std::vector<SeRow> per_uav_se_curve(const std::vector<int>& k_range, int num_beams,
                                    const std::vector<double>& rho_list,
                                    AllocationPolicy policy, int replicates,
                                    std::uint64_t seed);

/// Exact mean SE under round-robin allocation of K UAVs over L beams.
double balanced_mean_se(int k, int num_beams, double rho);

/// Smallest per-UAV SE under round-robin allocation (the most loaded beam).
double balanced_min_se(int k, int num_beams, double rho);

void write_curve_csv(const std::filesystem::path& path, const std::vector<SeRow>& rows);

}  // namespace lawnsim::channel
