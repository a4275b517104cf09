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

#include "lawnsim/random.hpp"

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <vector>

namespace lawnsim::control {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// q' = A q + alpha B u + n, n ~ N(0, process_noise).
struct PlantModel {
  Matrix A;
  Matrix B;
  Matrix process_noise;

  int state_dim() const { return static_cast<int>(A.rows()); }
  int input_dim() const { return static_cast<int>(B.cols()); }
  void validate() const;
};

/// u = -gain * q_hat, certified by V(q) = q' P q with decay target eta.
struct ControllerGain {
  Matrix gain;
  Matrix lyapunov;
  double eta = 0.9;

  void validate(const PlantModel& plant) const;
};

/// Sigmoid map from SINR to packet success probability.
struct LinkReliability {
  double steepness = 1.0;
  double gamma_th = 1.0;

  void validate() const;
};

struct SensingSpec {
  double noise_var = 1.0;
  int snapshots = 1;
  int rx_antennas = 1;
  std::complex<double> channel_gain{1.0, 0.0};
  double slant_range = 100.0;
  /// Velocity variance = position variance * velocity_factor / control_period^2.
  double velocity_factor = 0.0;
  double control_period = 1.0;
  /// Leading state coordinates that are positions; 0 picks the default
  /// layout (all coordinates for odd dimensions, the first half otherwise).
  int position_dims = 0;

  void validate() const;
  int positions_for(int state_dim) const;
};

double packet_success_prob(double sinr, const LinkReliability& link);

/// Bernoulli(p) draw.
int sample_packet(double p, Rng& rng);

/// Angle-estimation CRB in rad^2. +inf when beam_gain_sq == 0.
double crb_angle(double beam_gain_sq, const SensingSpec& spec);

struct SensingCovariance {
  Matrix sigma;
  bool unbounded = false;
};

/// Cross-range small-angle projection of the angle CRB onto the position
/// coordinates (variance = slant_range^2 * crb); velocities per SensingSpec.
SensingCovariance sensing_error_cov(double crb, const SensingSpec& spec, int plant_dim);

Vector control_law(const Vector& q_hat, const ControllerGain& gains);

Vector step_dynamics(const Vector& q, const Vector& u, int alpha, const Vector& noise,
                     const PlantModel& plant);

double lyapunov_value(const Vector& q, const ControllerGain& gains);

/// E[V(q')|q] with packet success p and estimation-error covariance sigma,
/// assuming alpha, e and n are mutually independent and zero-mean:
///   p q'(A-BG)'P(A-BG)q + (1-p) q'A'PAq + p tr(P B G Sigma G'B') + tr(P Q_n)
double expected_drift(const Vector& q, double p, const Matrix& sigma, const PlantModel& plant,
                      const ControllerGain& gains);

enum class DriftStatus { Satisfied, Violated, NoiseFloorBound };

struct DriftCertificate {
  DriftStatus status = DriftStatus::Satisfied;
  /// eta V(q) - E[V(q')]; negative values are the excess.
  double margin = 0.0;
  double expected = 0.0;
  double value = 0.0;

  bool satisfied() const { return status == DriftStatus::Satisfied; }
};

DriftCertificate drift_certificate(const Vector& q, double p, const Matrix& sigma,
                                   const PlantModel& plant, const ControllerGain& gains);

/// Sum of log2|lambda| over eigenvalues with |lambda| > 1 + 1e-9.
double topological_entropy(const Matrix& A);

/// 2^(H / bandwidth) - 1, with bandwidth in bits-per-step units.
double critical_sinr(double entropy_bits, double bandwidth);

struct ScheduleStep {
  double sinr = 0.0;
  double beam_gain_sq = 0.0;
};

struct SimulationOptions {
  Vector initial_state;  ///< defaults to all ones when empty
  double divergence_ceiling = 1e6;
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

struct StepStats {
  int t = 0;
  double mean_norm = 0.0;
  double p05_norm = 0.0;
  double p95_norm = 0.0;
  double mean_v = 0.0;
  double packet_rate = 0.0;  ///< NaN at t = 0 (no packet yet)
  double diverged_frac = 0.0;
};

struct TrajectoryStats {
  std::vector<StepStats> steps;  ///< t = 0..horizon
  double packet_success_rate = 0.0;
  double packet_draws = 0.0;
  double final_diverged_frac = 0.0;
  bool any_diverged = false;
  /// Mean V(q_1) over replicates; compare against expected_drift at q_0.
  double mean_first_step_v = 0.0;
};

/// Monte Carlo of the closed loop. Each step: Sigma_t from the scheduled beam
/// gain, e ~ N(0, Sigma_t), q_hat = q - e, u = control_law(q_hat), alpha ~
/// Bernoulli(p(SINR_t)), q advanced by step_dynamics. A sensing-blind step
/// forces alpha = 0 and reuses the previous estimate. Replicates stop once
/// ||q|| exceeds the ceiling and count as diverged from then on. The schedule
/// holds its last entry when shorter than the horizon.
TrajectoryStats simulate_closed_loop(const PlantModel& plant, const ControllerGain& gains,
                                     const LinkReliability& link, const SensingSpec& sensing,
                                     const std::vector<ScheduleStep>& schedule, int horizon,
                                     int replicates, std::uint64_t seed,
                                     const SimulationOptions& options = {});

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryStats& stats);

}  // namespace lawnsim::control
