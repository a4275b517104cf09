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

#include "lawnsim/airspace.hpp"

#include "lawnsim/csv.hpp"
#include "lawnsim/error.hpp"

#include <cmath>
#include <string>

namespace lawnsim::airspace {

namespace {

constexpr double kDivisibilityTol = 1e-9;

}  // namespace

std::array<std::size_t, 3> GridSpec::axis_indices(std::size_t cell) const {
  const std::size_t iz = cell % counts[2];
  const std::size_t iy = (cell / counts[2]) % counts[1];
  const std::size_t ix = cell / (counts[2] * counts[1]);
  return {ix, iy, iz};
}

Vec3 GridSpec::cell_center(std::size_t cell) const {
  return cell_box(cell).center();
}

Box GridSpec::cell_box(std::size_t cell) const {
  if (cell >= total_cells()) {
    throw ValidationError("cell index " + std::to_string(cell) + " out of range");
  }
  const auto idx = axis_indices(cell);
  Vec3 lo;
  for (int a = 0; a < 3; ++a) {
    lo[a] = bounds_min[a] + static_cast<double>(idx[a]) * cell_size[a];
  }
  return Box(lo, lo + cell_size);
}

GridSpec discretize(const Box& bounds, const Vec3& cell_size) {
  if (!(cell_size.array() > 0.0).all() || !cell_size.allFinite()) {
    throw ValidationError("cell_size components must be positive and finite");
  }
  if (!bounds.min.allFinite() || !bounds.max.allFinite()) {
    throw ValidationError("grid bounds must be finite");
  }
  if (!(bounds.min.array() < bounds.max.array()).all()) {
    throw ValidationError("grid bounds are inverted or empty along some axis");
  }
  GridSpec grid;
  grid.bounds_min = bounds.min;
  grid.cell_size = cell_size;
  for (int a = 0; a < 3; ++a) {
    const double ratio = (bounds.max[a] - bounds.min[a]) / cell_size[a];
    const double nearest = std::round(ratio);
    const double n = (nearest >= 1.0 && std::abs(ratio - nearest) <= kDivisibilityTol * ratio)
                         ? nearest
                         : std::ceil(ratio);
    grid.counts[a] = static_cast<std::size_t>(n);
    grid.bounds_max[a] = bounds.min[a] + n * cell_size[a];
  }
  return grid;
}

std::size_t cell_of(const Vec3& position, const GridSpec& grid) {
  std::array<std::size_t, 3> idx{};
  for (int a = 0; a < 3; ++a) {
    const double extent = grid.bounds_max[a] - grid.bounds_min[a];
    const double tol = kDivisibilityTol * extent;
    const double p = position[a];
    if (!std::isfinite(p) || p < grid.bounds_min[a] - tol || p > grid.bounds_max[a] + tol) {
      throw ValidationError("position outside grid bounds");
    }
    // Upper-closed cells: a face point maps to the cell below it.
    const double scaled = (p - grid.bounds_min[a]) / grid.cell_size[a];
    double i = std::ceil(scaled) - 1.0;
    if (i < 0.0) i = 0.0;
    const double last = static_cast<double>(grid.counts[a] - 1);
    if (i > last) i = last;
    idx[a] = static_cast<std::size_t>(i);
  }
  return grid.flat_index(idx[0], idx[1], idx[2]);
}

std::size_t airspace_capacity(const TrafficState& state) { return state.assignments.size(); }

std::vector<int> cell_occupancy(const TrafficState& state, std::size_t num_cells) {
  std::vector<int> hist(num_cells, 0);
  for (std::size_t cell : state.assignments) {
    if (cell >= num_cells) {
      throw ValidationError("traffic state references cell " + std::to_string(cell) +
                            " outside [0, " + std::to_string(num_cells) + ")");
    }
    ++hist[cell];
  }
  return hist;
}

std::vector<OccupancyViolation> validate_state(const TrafficState& state,
                                               const OccupancyLimits& limits) {
  const std::size_t n = limits.per_cell_max.size();
  const auto hist = cell_occupancy(state, n);
  std::vector<OccupancyViolation> report;
  for (std::size_t cell = 0; cell < n; ++cell) {
    if (hist[cell] > limits.per_cell_max[cell]) {
      report.push_back({cell, hist[cell], limits.per_cell_max[cell]});
    }
  }
  return report;
}

std::vector<OccupancyViolation> validate_state(const TrafficState& state,
                                               const OccupancyLimits& limits,
                                               const GridSpec& grid) {
  if (limits.per_cell_max.size() != grid.total_cells()) {
    throw ValidationError("occupancy limits cover " + std::to_string(limits.per_cell_max.size()) +
                          " cells, grid has " + std::to_string(grid.total_cells()));
  }
  return validate_state(state, limits);
}

void write_traffic_csv(const std::filesystem::path& path, const TrafficState& state) {
  CsvWriter csv(path, "uav_id,cell_index");
  for (std::size_t k = 0; k < state.assignments.size(); ++k) {
    csv.field(k).field(state.assignments[k]);
    csv.end_row();
  }
}

TrafficState read_traffic_csv(const std::filesystem::path& path, std::size_t num_cells) {
  const auto rows = read_csv(path);
  if (rows.empty() || rows[0] != std::vector<std::string>{"uav_id", "cell_index"}) {
    throw ValidationError(path.string() + ": expected header uav_id,cell_index");
  }
  TrafficState state;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].empty()) continue;
    if (rows[r].size() != 2) {
      throw ValidationError(path.string() + ": line " + std::to_string(r + 1) +
                            " must have two fields");
    }
    std::size_t id = 0;
    std::size_t cell = 0;
    try {
      id = std::stoul(rows[r][0]);
      cell = std::stoul(rows[r][1]);
    } catch (const std::exception&) {
      throw ValidationError(path.string() + ": line " + std::to_string(r + 1) +
                            " is not numeric");
    }
    if (id != state.assignments.size()) {
      throw ValidationError(path.string() + ": uav_id values must be 0..K-1 in order");
    }
    if (cell >= num_cells) {
      throw ValidationError(path.string() + ": cell_index out of range at line " +
                            std::to_string(r + 1));
    }
    state.assignments.push_back(cell);
  }
  return state;
}

}  // namespace lawnsim::airspace
