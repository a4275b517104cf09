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

#include "lawnsim/sensing_control.hpp"

#include "lawnsim/csv.hpp"
#include "lawnsim/error.hpp"
#include "lawnsim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lawnsim::control {

namespace {

constexpr double kPsdTol = 1e-10;
constexpr double kUnitCircleTol = 1e-9;

void require_psd(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) throw ValidationError(std::string(what) + " must be square");
  if (!m.allFinite()) throw ValidationError(std::string(what) + " has non-finite entries");
  const double scale = m.size() == 0 ? 1.0 : std::max(1.0, m.cwiseAbs().maxCoeff());
  if (m.size() > 0 && (m - m.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale) {
    throw ValidationError(std::string(what) + " must be symmetric");
  }
  if (m.size() == 0) return;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kPsdTol * scale) {
    throw ValidationError(std::string(what) + " must be positive semidefinite");
  }
}

// Square-root factor F with F F' = m for a PSD matrix.
Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.transpose()));
  const Vector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * roots.asDiagonal();
}

double quantile(std::vector<double>& values, double q) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

}  // namespace

void PlantModel::validate() const {
  if (A.rows() == 0 || A.rows() != A.cols()) throw ValidationError("A must be square and non-empty");
  if (B.rows() != A.rows() || B.cols() == 0) throw ValidationError("B must have as many rows as A");
  if (process_noise.rows() != A.rows() || process_noise.cols() != A.cols()) {
    throw ValidationError("process noise covariance must match the state dimension");
  }
  if (!A.allFinite() || !B.allFinite()) throw ValidationError("plant matrices must be finite");
  require_psd(process_noise, "process noise covariance");
}

void ControllerGain::validate(const PlantModel& plant) const {
  if (gain.rows() != plant.B.cols() || gain.cols() != plant.A.rows()) {
    throw ValidationError("feedback gain must be m x d");
  }
  if (lyapunov.rows() != plant.A.rows() || lyapunov.cols() != plant.A.cols()) {
    throw ValidationError("Lyapunov matrix must be d x d");
  }
  if (!gain.allFinite()) throw ValidationError("feedback gain must be finite");
  require_psd(lyapunov, "Lyapunov matrix");
  Eigen::LLT<Matrix> llt(0.5 * (lyapunov + lyapunov.transpose()));
  if (llt.info() != Eigen::Success) throw ValidationError("Lyapunov matrix must be positive definite");
  if (!(eta > 0.0 && eta < 1.0)) throw ValidationError("eta must lie in (0, 1)");
}

void LinkReliability::validate() const {
  if (!(steepness > 0.0)) throw ValidationError("link steepness must be positive");
  if (!(gamma_th > 0.0)) throw ValidationError("link threshold gamma_th must be positive");
}

void SensingSpec::validate() const {
  if (!(noise_var > 0.0)) throw ValidationError("sensing noise variance must be positive");
  if (snapshots < 1) throw ValidationError("snapshots must be >= 1");
  if (rx_antennas < 1) throw ValidationError("rx_antennas must be >= 1");
  if (!(std::abs(channel_gain) > 0.0)) throw ValidationError("channel gain must be non-zero");
  if (!(slant_range > 0.0)) throw ValidationError("slant range must be positive");
  if (!(velocity_factor >= 0.0)) throw ValidationError("velocity_factor must be non-negative");
  if (!(control_period > 0.0)) throw ValidationError("control_period must be positive");
  if (position_dims < 0) throw ValidationError("position_dims must be non-negative");
}

int SensingSpec::positions_for(int state_dim) const {
  if (position_dims > 0) return std::min(position_dims, state_dim);
  return state_dim % 2 == 1 ? state_dim : state_dim / 2;
}

double packet_success_prob(double sinr, const LinkReliability& link) {
  if (!(sinr >= 0.0)) throw ValidationError("SINR must be non-negative");
  if (std::isinf(sinr)) return 1.0;
  const double x = -link.steepness * (sinr - link.gamma_th);
  // exp overflow maps cleanly to 0.
  return 1.0 / (1.0 + std::exp(x));
}

int sample_packet(double p, Rng& rng) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("packet probability must lie in [0, 1]");
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return u(rng) < p ? 1 : 0;
}

double crb_angle(double beam_gain_sq, const SensingSpec& spec) {
  if (!(beam_gain_sq >= 0.0)) throw ValidationError("beam gain must be non-negative");
  const double denom = 2.0 * spec.snapshots * std::norm(spec.channel_gain) * spec.rx_antennas *
                       beam_gain_sq;
  if (denom == 0.0) return std::numeric_limits<double>::infinity();
  return spec.noise_var / denom;
}

SensingCovariance sensing_error_cov(double crb, const SensingSpec& spec, int plant_dim) {
  if (plant_dim < 1) throw ValidationError("plant dimension must be >= 1");
  if (std::isnan(crb) || crb < 0.0) throw ValidationError("CRB must be non-negative");
  SensingCovariance out;
  out.sigma = Matrix::Zero(plant_dim, plant_dim);
  if (std::isinf(crb)) {
    out.unbounded = true;
    return out;
  }
  const double pos_var = spec.slant_range * spec.slant_range * crb;
  const double vel_var =
      pos_var * spec.velocity_factor / (spec.control_period * spec.control_period);
  const int positions = spec.positions_for(plant_dim);
  for (int i = 0; i < plant_dim; ++i) {
    out.sigma(i, i) = i < positions ? pos_var : vel_var;
  }
  return out;
}

Vector control_law(const Vector& q_hat, const ControllerGain& gains) {
  if (q_hat.size() != gains.gain.cols()) throw ValidationError("state/gain dimension mismatch");
  return -gains.gain * q_hat;
}

Vector step_dynamics(const Vector& q, const Vector& u, int alpha, const Vector& noise,
                     const PlantModel& plant) {
  if (q.size() != plant.A.cols() || noise.size() != plant.A.rows() || u.size() != plant.B.cols()) {
    throw ValidationError("dimension mismatch in step_dynamics");
  }
  if (alpha != 0 && alpha != 1) throw ValidationError("alpha must be 0 or 1");
  Vector next = plant.A * q + noise;
  if (alpha == 1) next += plant.B * u;
  return next;
}

double lyapunov_value(const Vector& q, const ControllerGain& gains) {
  if (q.size() != gains.lyapunov.rows()) throw ValidationError("state/Lyapunov dimension mismatch");
  return q.dot(gains.lyapunov * q);
}

double expected_drift(const Vector& q, double p, const Matrix& sigma, const PlantModel& plant,
                      const ControllerGain& gains) {
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must lie in [0, 1]");
  if (sigma.rows() != plant.A.rows() || sigma.cols() != plant.A.rows()) {
    throw ValidationError("sigma must be d x d");
  }
  require_psd(sigma, "sensing covariance");
  const Matrix& P = gains.lyapunov;
  const Matrix BG = plant.B * gains.gain;
  const Vector closed = (plant.A - BG) * q;
  const Vector open = plant.A * q;
  const double sensing = (P * BG * sigma * BG.transpose()).trace();
  const double noise = (P * plant.process_noise).trace();
  return p * closed.dot(P * closed) + (1.0 - p) * open.dot(P * open) + p * sensing + noise;
}

DriftCertificate drift_certificate(const Vector& q, double p, const Matrix& sigma,
                                   const PlantModel& plant, const ControllerGain& gains) {
  DriftCertificate cert;
  cert.value = lyapunov_value(q, gains);
  cert.expected = expected_drift(q, p, sigma, plant, gains);
  cert.margin = gains.eta * cert.value - cert.expected;
  if (cert.margin >= 0.0) {
    cert.status = DriftStatus::Satisfied;
  } else if (cert.value == 0.0) {
    cert.status = DriftStatus::NoiseFloorBound;
  } else {
    cert.status = DriftStatus::Violated;
  }
  return cert;
}

double topological_entropy(const Matrix& A) {
  if (A.rows() != A.cols() || A.rows() == 0) throw ValidationError("A must be square");
  Eigen::EigenSolver<Matrix> es(A, false);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigenvalue solver failed");
  double h = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double mag = std::abs(es.eigenvalues()[i]);
    if (mag > 1.0 + kUnitCircleTol) h += std::log2(mag);
  }
  return h;
}

double critical_sinr(double entropy_bits, double bandwidth) {
  if (!(bandwidth > 0.0)) throw ValidationError("bandwidth must be positive");
  if (!(entropy_bits >= 0.0)) throw ValidationError("entropy must be non-negative");
  return std::exp2(entropy_bits / bandwidth) - 1.0;
}

TrajectoryStats simulate_closed_loop(const PlantModel& plant, const ControllerGain& gains,
                                     const LinkReliability& link, const SensingSpec& sensing,
                                     const std::vector<ScheduleStep>& schedule, int horizon,
                                     int replicates, std::uint64_t seed,
                                     const SimulationOptions& options) {
  plant.validate();
  gains.validate(plant);
  link.validate();
  sensing.validate();
  if (horizon < 1) throw ValidationError("horizon must be >= 1");
  if (replicates < 1) throw ValidationError("replicates must be >= 1");
  if (schedule.empty()) throw ValidationError("schedule is empty");
  const int d = plant.state_dim();
  const Vector q0 = options.initial_state.size() == 0 ? Vector::Ones(d) : options.initial_state;
  if (q0.size() != d) throw ValidationError("initial state dimension mismatch");

  struct Prepared {
    double p;
    bool blind;
    Matrix sensing_factor;
  };
  std::vector<Prepared> prepared;
  prepared.reserve(schedule.size());
  for (const auto& step : schedule) {
    const auto cov = sensing_error_cov(crb_angle(step.beam_gain_sq, sensing), sensing, d);
    prepared.push_back({packet_success_prob(step.sinr, link), cov.unbounded,
                        cov.unbounded ? Matrix::Zero(d, d) : psd_sqrt(cov.sigma)});
  }
  const Matrix noise_factor = psd_sqrt(plant.process_noise);

  const auto steps = static_cast<std::size_t>(horizon) + 1;
  const auto reps = static_cast<std::size_t>(replicates);
  std::vector<double> norms(reps * steps);
  std::vector<double> values(reps * steps);
  // -1: no packet drawn (outage or frozen), otherwise the drawn alpha.
  std::vector<signed char> alphas(reps * steps, -1);
  std::vector<int> diverged_at(reps, -1);

  parallel_for(
      reps,
      [&](std::size_t rep) {
        Rng rng = derive_stream(seed, {rep});
        std::normal_distribution<double> gauss(0.0, 1.0);
        auto draw = [&](int n) {
          Vector z(n);
          for (int i = 0; i < n; ++i) z[i] = gauss(rng);
          return z;
        };
        Vector q = q0;
        Vector q_hat_prev = Vector::Zero(d);
        bool frozen = false;
        for (std::size_t t = 0; t < steps; ++t) {
          norms[rep * steps + t] = q.norm();
          values[rep * steps + t] = lyapunov_value(q, gains);
          if (t + 1 == steps || frozen) continue;
          const auto& ctl = prepared[std::min(t, prepared.size() - 1)];
          int alpha = 0;
          Vector u;
          if (ctl.blind) {
            u = control_law(q_hat_prev, gains);
          } else {
            const Vector e = ctl.sensing_factor * draw(d);
            const Vector q_hat = q - e;
            u = control_law(q_hat, gains);
            q_hat_prev = q_hat;
            alpha = sample_packet(ctl.p, rng);
            alphas[rep * steps + t + 1] = static_cast<signed char>(alpha);
          }
          const Vector n = noise_factor * draw(d);
          q = step_dynamics(q, u, alpha, n, plant);
          if (!q.allFinite() || q.norm() > options.divergence_ceiling) {
            frozen = true;
            diverged_at[rep] = static_cast<int>(t + 1);
          }
        }
      },
      options.threads == 0 ? default_thread_count() : options.threads);

  TrajectoryStats stats;
  stats.steps.reserve(steps);
  double total_success = 0.0;
  double total_draws = 0.0;
  std::vector<double> column(reps);
  for (std::size_t t = 0; t < steps; ++t) {
    StepStats s;
    s.t = static_cast<int>(t);
    double sum_norm = 0.0;
    double sum_v = 0.0;
    double successes = 0.0;
    double draws = 0.0;
    double diverged = 0.0;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const double n = norms[rep * steps + t];
      column[rep] = n;
      sum_norm += n;
      sum_v += values[rep * steps + t];
      const signed char a = alphas[rep * steps + t];
      if (a >= 0) {
        draws += 1.0;
        successes += a;
      }
      if (diverged_at[rep] >= 0 && diverged_at[rep] <= static_cast<int>(t)) diverged += 1.0;
    }
    s.mean_norm = sum_norm / static_cast<double>(reps);
    s.mean_v = sum_v / static_cast<double>(reps);
    s.packet_rate = draws > 0.0 ? successes / draws : std::numeric_limits<double>::quiet_NaN();
    s.diverged_frac = diverged / static_cast<double>(reps);
    s.p05_norm = quantile(column, 0.05);
    s.p95_norm = quantile(column, 0.95);
    total_success += successes;
    total_draws += draws;
    stats.steps.push_back(s);
  }
  stats.packet_draws = total_draws;
  stats.packet_success_rate =
      total_draws > 0.0 ? total_success / total_draws : std::numeric_limits<double>::quiet_NaN();
  stats.final_diverged_frac = stats.steps.back().diverged_frac;
  stats.any_diverged = stats.final_diverged_frac > 0.0;
  stats.mean_first_step_v = stats.steps[1].mean_v;
  return stats;
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryStats& stats) {
  CsvWriter csv(path, "t,mean_norm,p05_norm,p95_norm,mean_V,packet_rate,diverged_frac");
  for (const auto& s : stats.steps) {
    csv.field(s.t)
        .field(s.mean_norm)
        .field(s.p05_norm)
        .field(s.p95_norm)
        .field(s.mean_v)
        .field(s.packet_rate)
        .field(s.diverged_frac);
    csv.end_row();
  }
}

}  // namespace lawnsim::control
