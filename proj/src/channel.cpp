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

#include "lawnsim/channel.hpp"

#include "lawnsim/csv.hpp"
#include "lawnsim/error.hpp"
#include "lawnsim/parallel.hpp"
#include "lawnsim/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace lawnsim::channel {

BeamPlan BeamPlan::round_robin(std::size_t num_cells, int num_beams) {
  if (num_beams < 1) throw ValidationError("num_beams must be >= 1");
  BeamPlan plan;
  plan.num_beams = num_beams;
  plan.cell_to_beam.resize(num_cells);
  for (std::size_t n = 0; n < num_cells; ++n) {
    plan.cell_to_beam[n] = static_cast<int>(n % static_cast<std::size_t>(num_beams));
  }
  return plan;
}

BeamPlan BeamPlan::by_column(const airspace::GridSpec& grid, int num_beams) {
  if (num_beams < 1) throw ValidationError("num_beams must be >= 1");
  BeamPlan plan;
  plan.num_beams = num_beams;
  plan.cell_to_beam.resize(grid.total_cells());
  for (std::size_t n = 0; n < grid.total_cells(); ++n) {
    const auto idx = grid.axis_indices(n);
    const std::size_t column = idx[0] * grid.counts[1] + idx[1];
    plan.cell_to_beam[n] = static_cast<int>(column % static_cast<std::size_t>(num_beams));
  }
  return plan;
}

void BeamPlan::validate() const {
  if (num_beams < 1) throw ValidationError("num_beams must be >= 1");
  for (int b : cell_to_beam) {
    if (b < 0 || b >= num_beams) {
      throw ValidationError("beam index " + std::to_string(b) + " outside [0, " +
                            std::to_string(num_beams) + ")");
    }
  }
}

std::string_view to_string(Regime regime) {
  switch (regime) {
    case Regime::NoiseMasked: return "noise_masked";
    case Regime::LinearTradeoff: return "linear_tradeoff";
    case Regime::Saturation: return "saturation";
  }
  return "unknown";
}

std::string_view to_string(AllocationPolicy policy) {
  return policy == AllocationPolicy::Balanced ? "balanced" : "uniform_random";
}

AllocationPolicy parse_policy(std::string_view text) {
  if (text == "balanced") return AllocationPolicy::Balanced;
  if (text == "uniform_random") return AllocationPolicy::UniformRandom;
  throw ValidationError("unknown allocation policy '" + std::string(text) + "'");
}

std::vector<int> beam_occupancy(const airspace::TrafficState& state, const BeamPlan& plan) {
  std::vector<int> per_beam(static_cast<std::size_t>(plan.num_beams), 0);
  std::vector<int> beam_of(state.assignments.size());
  for (std::size_t k = 0; k < state.assignments.size(); ++k) {
    const std::size_t cell = state.assignments[k];
    if (cell >= plan.cell_to_beam.size()) {
      throw ValidationError("UAV " + std::to_string(k) + " sits in cell " +
                            std::to_string(cell) + " unknown to the beam plan");
    }
    beam_of[k] = plan.cell_to_beam[cell];
    ++per_beam[static_cast<std::size_t>(beam_of[k])];
  }
  std::vector<int> mu(state.assignments.size());
  for (std::size_t k = 0; k < mu.size(); ++k) {
    mu[k] = per_beam[static_cast<std::size_t>(beam_of[k])];
  }
  return mu;
}

double sinr(int mu, double rho) {
  if (mu < 1) throw ValidationError("beam occupancy must be >= 1");
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  if (std::isinf(rho)) {
    return mu == 1 ? rho : 1.0 / static_cast<double>(mu - 1);
  }
  return rho / (static_cast<double>(mu - 1) * rho + 1.0);
}

double spectral_efficiency(double gamma) {
  if (!(gamma >= 0.0)) throw ValidationError("SINR must be non-negative");
  return std::log2(1.0 + gamma);
}

double critical_capacity(int num_beams, double rho) {
  if (num_beams < 1) throw ValidationError("num_beams must be >= 1");
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  return static_cast<double>(num_beams) * (1.0 + 1.0 / rho);
}

Regime classify_regime(double c_air, int num_beams, double rho) {
  if (!(c_air >= 0.0)) throw ValidationError("c_air must be non-negative");
  if (c_air <= static_cast<double>(num_beams)) return Regime::NoiseMasked;
  if (c_air <= critical_capacity(num_beams, rho)) return Regime::LinearTradeoff;
  return Regime::Saturation;
}

double saturation_capacity_approx(double c_air, int num_beams) {
  if (num_beams < 1) throw ValidationError("num_beams must be >= 1");
  if (!(c_air > static_cast<double>(num_beams))) {
    throw ValidationError("saturation approximation requires c_air > L");
  }
  if (std::isinf(c_air)) return 0.0;
  return std::log2(1.0 + 1.0 / (c_air / static_cast<double>(num_beams) - 1.0));
}

QosBound qos_capacity_bound(int num_beams, double rho, double r_min) {
  if (num_beams < 1) throw ValidationError("num_beams must be >= 1");
  if (!(r_min > 0.0)) throw ValidationError("r_min must be positive");
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  const double L = static_cast<double>(num_beams);
  const double rate_snr = std::exp2(r_min) - 1.0;  // 2^r - 1, may be +inf
  QosBound out;
  out.raw = L * (1.0 + 1.0 / rate_snr - 1.0 / rho);
  out.feasible = out.raw >= 0.0;
  out.value = std::max(0.0, out.raw);
  // Relative slack so r_min == log2(1 + rho) lands exactly on L.
  out.below_single_occupancy = out.raw < L * (1.0 - 1e-12);
  return out;
}

double balanced_mean_se(int k, int num_beams, double rho) {
  if (k < 1) throw ValidationError("K must be >= 1");
  if (num_beams < 1) throw ValidationError("num_beams must be >= 1");
  const int q = k / num_beams;
  const int r = k % num_beams;
  // r beams carry q+1 UAVs, the remaining carry q. A single occupancy level
  // returns its SE untouched so plateau values are exact.
  if (q == 0) return spectral_efficiency(sinr(1, rho));
  if (r == 0) return spectral_efficiency(sinr(q, rho));
  const double heavy = static_cast<double>(r) * (q + 1) / static_cast<double>(k);
  return heavy * spectral_efficiency(sinr(q + 1, rho)) +
         (1.0 - heavy) * spectral_efficiency(sinr(q, rho));
}

double balanced_min_se(int k, int num_beams, double rho) {
  if (k < 1) throw ValidationError("K must be >= 1");
  const int worst = (k + num_beams - 1) / num_beams;
  return spectral_efficiency(sinr(worst, rho));
}

namespace {

double random_replicate_mean_se(int k, int num_beams, double rho, Rng rng) {
  std::uniform_int_distribution<int> pick(0, num_beams - 1);
  std::vector<int> beam(static_cast<std::size_t>(k));
  std::vector<int> count(static_cast<std::size_t>(num_beams), 0);
  for (auto& b : beam) {
    b = pick(rng);
    ++count[static_cast<std::size_t>(b)];
  }
  double total = 0.0;
  for (int c : count) {
    if (c > 0) total += static_cast<double>(c) * spectral_efficiency(sinr(c, rho));
  }
  return total / static_cast<double>(k);
}

}  // namespace

std::vector<SeRow> per_uav_se_curve(const std::vector<int>& k_range, int num_beams,
                                    const std::vector<double>& rho_list,
                                    AllocationPolicy policy, int replicates,
                                    std::uint64_t seed) {
  if (k_range.empty()) throw ValidationError("k_range is empty");
  if (rho_list.empty()) throw ValidationError("rho list is empty");
  if (replicates < 1) throw ValidationError("replicates must be >= 1");
  if (num_beams < 1) throw ValidationError("num_beams must be >= 1");
  for (int k : k_range) {
    if (k < 1) throw ValidationError("K values must be >= 1");
  }

  std::vector<SeRow> rows;
  rows.reserve(k_range.size() * rho_list.size());
  for (int k : k_range) {
    for (std::size_t ri = 0; ri < rho_list.size(); ++ri) {
      const double rho = rho_list[ri];
      SeRow row;
      row.k = k;
      row.rho = rho;
      row.policy = policy;
      row.regime = classify_regime(static_cast<double>(k), num_beams, rho);
      if (policy == AllocationPolicy::Balanced) {
        row.mean_se = balanced_mean_se(k, num_beams, rho);
        row.stderr_se = 0.0;
      } else {
        std::vector<double> samples(static_cast<std::size_t>(replicates));
        parallel_for(samples.size(), [&](std::size_t rep) {
          samples[rep] = random_replicate_mean_se(
              k, num_beams, rho,
              derive_stream(seed, {static_cast<std::uint64_t>(k), ri, rep}));
        });
        double mean = 0.0;
        for (double s : samples) mean += s;
        mean /= static_cast<double>(samples.size());
        double var = 0.0;
        for (double s : samples) var += (s - mean) * (s - mean);
        row.mean_se = mean;
        row.stderr_se = samples.size() > 1
                            ? std::sqrt(var / static_cast<double>(samples.size() - 1) /
                                        static_cast<double>(samples.size()))
                            : 0.0;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_curve_csv(const std::filesystem::path& path, const std::vector<SeRow>& rows) {
  CsvWriter csv(path, "K,rho_db,policy,mean_se_bits,stderr_se_bits,regime");
  for (const auto& row : rows) {
    csv.field(row.k)
        .field(linear_to_db(row.rho))
        .field(to_string(row.policy))
        .field(row.mean_se)
        .field(row.stderr_se)
        .field(to_string(row.regime));
    csv.end_row();
  }
}

}  // namespace lawnsim::channel
