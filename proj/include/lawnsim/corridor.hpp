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
#include "lawnsim/geometry.hpp"

#include <array>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lawnsim::corridor {

enum class LayerRole { DirectionalEW, Transition, DirectionalNS };
enum class Heading { EastWest, NorthSouth };
enum class GeofenceKind { NoFly, Buffer };

std::string_view to_string(LayerRole role);
std::string_view to_string(Heading heading);
std::string_view to_string(GeofenceKind kind);
LayerRole parse_layer_role(std::string_view text);

struct AltitudeBand {
  double low = 0.0;
  double high = 0.0;
};

struct Corridor {
  std::string id;
  Box volume;
  LayerRole layer_role = LayerRole::Transition;
  AltitudeBand altitude_band;
  std::optional<Heading> direction_class;
};

struct Geofence {
  std::string id;
  Box volume;
  GeofenceKind kind = GeofenceKind::NoFly;
};

struct CorridorPlan {
  airspace::GridSpec grid;
  std::vector<Corridor> corridors;
  std::vector<Geofence> geofences;
  /// Bottom to top.
  std::array<LayerRole, 3> layer_order{LayerRole::DirectionalEW, LayerRole::Transition,
                                       LayerRole::DirectionalNS};
  std::array<AltitudeBand, 3> bands{};

  const Corridor* find(std::string_view id) const;
  /// First corridor (in plan order) whose closed volume contains p.
  const Corridor* containing(const Vec3& p) const;
};

struct PlanOptions {
  /// Role of the bottom directional layer; the top layer takes the other one.
  LayerRole bottom_role = LayerRole::DirectionalEW;
  /// When positive, every NoFly volume is wrapped in a Buffer geofence this
  /// many meters thick and corridors are carved around the buffer as well.
  double buffer_margin = 0.0;
};

/// Box difference a \ b as interior-disjoint axis-aligned boxes (at most 6).
std::vector<Box> subtract(const Box& a, const Box& b);

/// Three stacked layers spanning the grid's horizontal extent; the middle one
/// is the transition zone. NoFly (and buffer) volumes are cut out of every
/// layer by box subtraction.
CorridorPlan build_layered_plan(const airspace::GridSpec& grid,
                                const std::array<AltitudeBand, 3>& layer_altitudes,
                                const std::vector<Geofence>& nofly_list,
                                const PlanOptions& options = {});

/// Throws ValidationError if the layers overlap or a corridor overlaps a
/// NoFly volume.
void validate_plan(const CorridorPlan& plan);

/// Deterministic JSON text for the plan (sorted keys, fixed number format).
std::string serialize_plan(const CorridorPlan& plan);

struct BeamBudget {
  std::string corridor_id;
  int max_concurrent = 0;
  int beams_in_corridor = 0;
  double rho = 0.0;
  double r_min = 0.0;
  bool feasible = true;
  double qos_bound = 0.0;
  double critical_capacity = 0.0;
};

/// Grid cells whose volume overlaps the corridor with positive measure.
std::vector<std::size_t> cells_in(const Box& volume, const airspace::GridSpec& grid);

/// Admissible concurrent flights from the QoS capacity bound applied to the
/// distinct beams covering the corridor. A rate requirement no lone UAV per
/// beam can meet yields 0 and feasible = false.
BeamBudget corridor_beam_budget(const Corridor& corridor, const channel::BeamPlan& beam_plan,
                                const airspace::GridSpec& grid, double rho, double r_min);

/// Budget cap that applies to a flight asking for `r_min`: the stricter of
/// the stored budget and the bound re-evaluated at the request's rate.
int effective_cap(const BeamBudget& budget, double r_min);

struct GeofenceViolation {
  std::string geofence_id;
  std::size_t segment = 0;
  /// Set when the offending point is a waypoint rather than a segment interior.
  std::optional<std::size_t> waypoint;
  Vec3 point = Vec3::Zero();
};

/// Parametric interval [t0, t1] of the segment a→b inside the closed box.
std::optional<std::array<double, 2>> clip_segment(const Vec3& a, const Vec3& b, const Box& box);

/// Waypoints and segments that touch a NoFly volume (closed). Segment checks
/// are exact clips, so `step` only bounds the reporting resolution of the
/// entry point. One violation per (waypoint, fence) and per (segment, fence)
/// when neither segment endpoint already lies in that fence.
std::vector<GeofenceViolation> check_geofence(const std::vector<Vec3>& waypoints,
                                              const std::vector<Geofence>& geofences,
                                              double step = 1.0);

struct Route {
  std::vector<Vec3> waypoints;
};

/// L-shaped route between cell centers: east-west travel happens in the EW
/// layer, north-south travel in the NS layer, and altitude changes pass
/// through the transition layer. The origin's own layer is used first.
Route route_in_corridors(const Vec3& origin, const Vec3& destination, const CorridorPlan& plan);

/// Ordered corridors traversed by the route. Returns nullopt if part of the
/// route lies outside every corridor.
std::optional<std::vector<std::string>> corridor_path(const Route& route,
                                                      const CorridorPlan& plan);

struct FlightRequest {
  std::string id;
  Vec3 origin = Vec3::Zero();
  Vec3 destination = Vec3::Zero();
  double r_min = 1.0;
};

enum class RejectReason { Capacity, Geofence, NoRoute };
std::string_view to_string(RejectReason reason);

struct AdmissionDecision {
  bool admitted = false;
  std::optional<RejectReason> reason;
  std::string detail;
  std::vector<std::string> corridor_path;
  Route route;
};

/// Admitted flights and per-corridor counts.
struct LiveOccupancy {
  std::map<std::string, int> per_corridor;
  std::map<std::string, std::vector<std::string>> active_flights;

  int count(const std::string& corridor_id) const;
};

/// Admits iff the deterministic route stays in corridors, touches no
/// geofence and every traversed corridor is below its cap. On admission the
/// occupancy of every traversed corridor is incremented.
AdmissionDecision admit(const FlightRequest& request, LiveOccupancy& live,
                        const CorridorPlan& plan, const std::vector<BeamBudget>& budgets);

/// Frees the corridors held by an admitted flight. False if unknown.
bool release(const std::string& request_id, LiveOccupancy& live);

/// Serialized decision point over a plan and its budgets.
class AdmissionController {
 public:
  AdmissionController(CorridorPlan plan, std::vector<BeamBudget> budgets);

  AdmissionDecision admit(const FlightRequest& request);
  bool release(const std::string& request_id);

  LiveOccupancy snapshot() const;
  const CorridorPlan& plan() const { return plan_; }
  const std::vector<BeamBudget>& budgets() const { return budgets_; }

 private:
  CorridorPlan plan_;
  std::vector<BeamBudget> budgets_;
  mutable std::mutex mutex_;
  LiveOccupancy live_;
};

struct AdmissionLogEntry {
  double timestamp = 0.0;
  std::string request_id;
  std::string decision;  // admitted | rejected | released | unknown
  std::string reason;
  std::vector<std::string> corridor_path;
};

void write_admission_log(const std::filesystem::path& path,
                         const std::vector<AdmissionLogEntry>& entries);

}  // namespace lawnsim::corridor
