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

#include "lawnsim/geometry.hpp"

#include <array>
#include <cstddef>
#include <filesystem>
#include <vector>

namespace lawnsim::airspace {

/// Uniform grid over an axis-aligned domain. Cells are indexed row-major
/// over (x, y, z): index = (ix * ny + iy) * nz + iz.
struct GridSpec {
  Vec3 bounds_min = Vec3::Zero();
  Vec3 bounds_max = Vec3::Zero();
  Vec3 cell_size = Vec3::Ones();
  std::array<std::size_t, 3> counts{1, 1, 1};

  std::size_t total_cells() const { return counts[0] * counts[1] * counts[2]; }
  Box bounds() const { return Box(bounds_min, bounds_max); }

  std::size_t flat_index(std::size_t ix, std::size_t iy, std::size_t iz) const {
    return (ix * counts[1] + iy) * counts[2] + iz;
  }
  std::array<std::size_t, 3> axis_indices(std::size_t cell) const;
  Vec3 cell_center(std::size_t cell) const;
  Box cell_box(std::size_t cell) const;
};

/// Entry k is the cell occupied by UAV k.
struct TrafficState {
  std::vector<std::size_t> assignments;

  std::size_t num_uavs() const { return assignments.size(); }
};

struct OccupancyLimits {
  std::vector<int> per_cell_max;

  /// One-UAV-per-cell unless a different uniform limit is given.
  static OccupancyLimits uniform(std::size_t num_cells, int limit = 1) {
    return OccupancyLimits{std::vector<int>(num_cells, limit)};
  }
};

struct OccupancyViolation {
  std::size_t cell;
  int occupancy;
  int limit;

  friend bool operator==(const OccupancyViolation&, const OccupancyViolation&) = default;
};

/// Tiles [bounds.min, bounds.max] with cells of the given size. When the
/// extent is not an integer multiple of the cell size (relative tolerance
/// 1e-9) the count is rounded up and bounds_max is pushed outward.
GridSpec discretize(const Box& bounds, const Vec3& cell_size);

/// Row-major index of the cell containing `position`. Cells are closed on
/// their upper face: a point on an interior face belongs to the
/// lower-indexed cell, bounds_min belongs to cell 0 and bounds_max to the
/// last cell.
std::size_t cell_of(const Vec3& position, const GridSpec& grid);

/// Number of active UAVs: the L1 norm of the one-hot position matrix.
std::size_t airspace_capacity(const TrafficState& state);

/// Per-cell histogram of the traffic state.
std::vector<int> cell_occupancy(const TrafficState& state, std::size_t num_cells);

/// Every cell whose occupancy exceeds its limit, in ascending cell order.
std::vector<OccupancyViolation> validate_state(const TrafficState& state,
                                               const OccupancyLimits& limits);
/// Same, but first requires the limit vector to cover exactly grid's N cells.
std::vector<OccupancyViolation> validate_state(const TrafficState& state,
                                               const OccupancyLimits& limits,
                                               const GridSpec& grid);

void write_traffic_csv(const std::filesystem::path& path, const TrafficState& state);
TrafficState read_traffic_csv(const std::filesystem::path& path, std::size_t num_cells);

}  // namespace lawnsim::airspace
