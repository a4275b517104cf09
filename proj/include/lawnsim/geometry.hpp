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

#include <Eigen/Core>

#include <string>

namespace lawnsim {

using Vec3 = Eigen::Vector3d;

/// Closed axis-aligned box [min, max] in meters.
struct Box {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  Box() = default;
  Box(const Vec3& lo, const Vec3& hi) : min(lo), max(hi) {}

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }

  /// True when the box contains `other` entirely (closed).
  bool encloses(const Box& other) const {
    return (other.min.array() >= min.array()).all() &&
           (other.max.array() <= max.array()).all();
  }

  /// Positive-volume overlap. Boxes that only share a face do not overlap.
  bool overlaps(const Box& other) const {
    return (min.array() < other.max.array()).all() &&
           (other.min.array() < max.array()).all();
  }

  bool degenerate() const { return !(min.array() < max.array()).all(); }

  double volume() const {
    return degenerate() ? 0.0 : (max - min).prod();
  }

  Vec3 center() const { return 0.5 * (min + max); }

  Box expanded(double margin) const {
    return Box(min.array() - margin, max.array() + margin);
  }
};

inline bool operator==(const Box& a, const Box& b) {
  return a.min == b.min && a.max == b.max;
}

}  // namespace lawnsim
