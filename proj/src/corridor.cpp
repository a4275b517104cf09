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

#include "lawnsim/corridor.hpp"

#include "lawnsim/csv.hpp"
#include "lawnsim/error.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace lawnsim::corridor {

namespace {

constexpr double kGapTol = 1e-9;

std::string_view role_prefix(LayerRole role) {
  switch (role) {
    case LayerRole::DirectionalEW: return "ew";
    case LayerRole::Transition: return "transition";
    case LayerRole::DirectionalNS: return "ns";
  }
  return "?";
}

nlohmann::json vec_json(const Vec3& v) {
  // Numbers go through format_number so the text is stable across builds.
  return nlohmann::json::array(
      {format_number(v.x()), format_number(v.y()), format_number(v.z())});
}

nlohmann::json box_json(const Box& b) {
  return nlohmann::json{{"min", vec_json(b.min)}, {"max", vec_json(b.max)}};
}

}  // namespace

std::string_view to_string(LayerRole role) {
  switch (role) {
    case LayerRole::DirectionalEW: return "directional_ew";
    case LayerRole::Transition: return "transition";
    case LayerRole::DirectionalNS: return "directional_ns";
  }
  return "unknown";
}

std::string_view to_string(Heading heading) {
  return heading == Heading::EastWest ? "east_west" : "north_south";
}

std::string_view to_string(GeofenceKind kind) {
  return kind == GeofenceKind::NoFly ? "no_fly" : "buffer";
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::Capacity: return "capacity";
    case RejectReason::Geofence: return "geofence";
    case RejectReason::NoRoute: return "no-route";
  }
  return "unknown";
}

LayerRole parse_layer_role(std::string_view text) {
  if (text == "directional_ew" || text == "east_west") return LayerRole::DirectionalEW;
  if (text == "directional_ns" || text == "north_south") return LayerRole::DirectionalNS;
  if (text == "transition") return LayerRole::Transition;
  throw ValidationError("unknown layer role '" + std::string(text) + "'");
}

const Corridor* CorridorPlan::find(std::string_view id) const {
  for (const auto& c : corridors) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

const Corridor* CorridorPlan::containing(const Vec3& p) const {
  for (const auto& c : corridors) {
    if (c.volume.contains(p)) return &c;
  }
  return nullptr;
}

std::vector<Box> subtract(const Box& a, const Box& b) {
  if (!a.overlaps(b)) return {a};
  std::vector<Box> pieces;
  Box rest = a;
  for (int axis = 0; axis < 3; ++axis) {
    if (b.min[axis] > rest.min[axis]) {
      Box lower = rest;
      lower.max[axis] = b.min[axis];
      pieces.push_back(lower);
      rest.min[axis] = b.min[axis];
    }
    if (b.max[axis] < rest.max[axis]) {
      Box upper = rest;
      upper.min[axis] = b.max[axis];
      pieces.push_back(upper);
      rest.max[axis] = b.max[axis];
    }
  }
  // `rest` is now a ∩ b and is dropped.
  return pieces;
}

CorridorPlan build_layered_plan(const airspace::GridSpec& grid,
                                const std::array<AltitudeBand, 3>& layer_altitudes,
                                const std::vector<Geofence>& nofly_list,
                                const PlanOptions& options) {
  if (options.bottom_role == LayerRole::Transition) {
    throw ValidationError("bottom layer must be a directional layer");
  }
  if (!(options.buffer_margin >= 0.0)) {
    throw ValidationError("buffer_margin must be non-negative");
  }
  const double z_tol = 1e-9 * (grid.bounds_max.z() - grid.bounds_min.z());
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& band = layer_altitudes[i];
    if (!(band.high > band.low)) {
      throw ValidationError("layer " + std::to_string(i) + " altitude band is empty or inverted");
    }
    if (band.low < grid.bounds_min.z() - z_tol || band.high > grid.bounds_max.z() + z_tol) {
      throw ValidationError("layer " + std::to_string(i) + " altitude band leaves the grid");
    }
    if (i > 0 && band.low < layer_altitudes[i - 1].high) {
      throw ValidationError("layer " + std::to_string(i) + " overlaps the layer below");
    }
  }

  CorridorPlan plan;
  plan.grid = grid;
  plan.bands = layer_altitudes;
  const LayerRole top_role = options.bottom_role == LayerRole::DirectionalEW
                                 ? LayerRole::DirectionalNS
                                 : LayerRole::DirectionalEW;
  plan.layer_order = {options.bottom_role, LayerRole::Transition, top_role};

  std::vector<Box> cutouts;
  for (const auto& fence : nofly_list) {
    if (fence.volume.degenerate()) {
      throw ValidationError("geofence '" + fence.id + "' has a degenerate volume");
    }
    Geofence nofly = fence;
    nofly.kind = GeofenceKind::NoFly;
    plan.geofences.push_back(nofly);
    if (options.buffer_margin > 0.0) {
      plan.geofences.push_back(Geofence{fence.id + "-buffer",
                                        fence.volume.expanded(options.buffer_margin),
                                        GeofenceKind::Buffer});
      cutouts.push_back(fence.volume.expanded(options.buffer_margin));
    } else {
      cutouts.push_back(fence.volume);
    }
  }

  for (std::size_t layer = 0; layer < 3; ++layer) {
    const auto& band = layer_altitudes[layer];
    Box layer_box(Vec3(grid.bounds_min.x(), grid.bounds_min.y(), band.low),
                  Vec3(grid.bounds_max.x(), grid.bounds_max.y(), band.high));
    std::vector<Box> pieces{layer_box};
    for (const auto& cut : cutouts) {
      std::vector<Box> next;
      for (const auto& piece : pieces) {
        auto parts = subtract(piece, cut);
        next.insert(next.end(), parts.begin(), parts.end());
      }
      pieces = std::move(next);
    }
    if (pieces.empty()) {
      throw ValidationError("no-fly volumes cover the entire layer " + std::to_string(layer));
    }
    const LayerRole role = plan.layer_order[layer];
    for (std::size_t i = 0; i < pieces.size(); ++i) {
      Corridor c;
      c.id = std::string(role_prefix(role)) + "-" + std::to_string(i);
      c.volume = pieces[i];
      c.layer_role = role;
      c.altitude_band = band;
      if (role == LayerRole::DirectionalEW) c.direction_class = Heading::EastWest;
      if (role == LayerRole::DirectionalNS) c.direction_class = Heading::NorthSouth;
      plan.corridors.push_back(std::move(c));
    }
  }
  validate_plan(plan);
  return plan;
}

void validate_plan(const CorridorPlan& plan) {
  for (std::size_t i = 1; i < 3; ++i) {
    if (plan.bands[i].low < plan.bands[i - 1].high) {
      throw ValidationError("corridor layers are not altitude-disjoint");
    }
  }
  for (const auto& c : plan.corridors) {
    if (!plan.grid.bounds().encloses(c.volume)) {
      throw ValidationError("corridor '" + c.id + "' leaves the grid");
    }
    if (c.volume.min.z() < c.altitude_band.low || c.volume.max.z() > c.altitude_band.high) {
      throw ValidationError("corridor '" + c.id + "' leaves its altitude band");
    }
    for (const auto& g : plan.geofences) {
      if (g.kind == GeofenceKind::NoFly && c.volume.overlaps(g.volume)) {
        throw ValidationError("corridor '" + c.id + "' intersects no-fly zone '" + g.id + "'");
      }
    }
  }
}

std::string serialize_plan(const CorridorPlan& plan) {
  nlohmann::json j;
  j["grid"] = {{"bounds", box_json(plan.grid.bounds())},
               {"cell_size", vec_json(plan.grid.cell_size)},
               {"counts", {plan.grid.counts[0], plan.grid.counts[1], plan.grid.counts[2]}}};
  nlohmann::json layers = nlohmann::json::array();
  for (std::size_t i = 0; i < 3; ++i) {
    layers.push_back({{"role", to_string(plan.layer_order[i])},
                      {"low", format_number(plan.bands[i].low)},
                      {"high", format_number(plan.bands[i].high)}});
  }
  j["layers"] = layers;
  nlohmann::json corridors = nlohmann::json::array();
  for (const auto& c : plan.corridors) {
    nlohmann::json cj{{"id", c.id},
                      {"layer_role", to_string(c.layer_role)},
                      {"volume", box_json(c.volume)},
                      {"altitude_band", {format_number(c.altitude_band.low),
                                         format_number(c.altitude_band.high)}}};
    cj["direction_class"] = c.direction_class ? nlohmann::json(to_string(*c.direction_class))
                                              : nlohmann::json(nullptr);
    corridors.push_back(std::move(cj));
  }
  j["corridors"] = corridors;
  nlohmann::json fences = nlohmann::json::array();
  for (const auto& g : plan.geofences) {
    fences.push_back({{"id", g.id}, {"kind", to_string(g.kind)}, {"volume", box_json(g.volume)}});
  }
  j["geofences"] = fences;
  return j.dump(2) + "\n";
}

std::vector<std::size_t> cells_in(const Box& volume, const airspace::GridSpec& grid) {
  std::array<long long, 3> lo{};
  std::array<long long, 3> hi{};
  for (int a = 0; a < 3; ++a) {
    const double from = (volume.min[a] - grid.bounds_min[a]) / grid.cell_size[a];
    const double to = (volume.max[a] - grid.bounds_min[a]) / grid.cell_size[a];
    lo[a] = std::max<long long>(0, static_cast<long long>(std::floor(from)));
    hi[a] = std::min<long long>(static_cast<long long>(grid.counts[a]) - 1,
                                static_cast<long long>(std::ceil(to)) - 1);
    if (hi[a] < lo[a]) return {};
  }
  std::vector<std::size_t> cells;
  for (long long ix = lo[0]; ix <= hi[0]; ++ix) {
    for (long long iy = lo[1]; iy <= hi[1]; ++iy) {
      for (long long iz = lo[2]; iz <= hi[2]; ++iz) {
        const std::size_t cell = grid.flat_index(static_cast<std::size_t>(ix),
                                                 static_cast<std::size_t>(iy),
                                                 static_cast<std::size_t>(iz));
        if (grid.cell_box(cell).overlaps(volume)) cells.push_back(cell);
      }
    }
  }
  return cells;
}

BeamBudget corridor_beam_budget(const Corridor& corridor, const channel::BeamPlan& beam_plan,
                                const airspace::GridSpec& grid, double rho, double r_min) {
  if (beam_plan.cell_to_beam.size() != grid.total_cells()) {
    throw ValidationError("beam plan does not match the grid");
  }
  const auto cells = cells_in(corridor.volume, grid);
  if (cells.empty()) {
    throw ValidationError("corridor '" + corridor.id + "' covers no grid cell");
  }
  std::set<int> beams;
  for (std::size_t cell : cells) beams.insert(beam_plan.cell_to_beam[cell]);

  BeamBudget budget;
  budget.corridor_id = corridor.id;
  budget.beams_in_corridor = static_cast<int>(beams.size());
  budget.rho = rho;
  budget.r_min = r_min;
  const auto bound = channel::qos_capacity_bound(budget.beams_in_corridor, rho, r_min);
  budget.qos_bound = bound.value;
  budget.critical_capacity = channel::critical_capacity(budget.beams_in_corridor, rho);
  budget.feasible = bound.feasible && !bound.below_single_occupancy;
  if (budget.feasible) {
    const double cap = std::floor(bound.value);
    budget.max_concurrent = cap >= 1e9 ? 1000000000 : static_cast<int>(cap);
  }
  return budget;
}

int effective_cap(const BeamBudget& budget, double r_min) {
  if (r_min <= budget.r_min) return budget.max_concurrent;
  const auto bound = channel::qos_capacity_bound(budget.beams_in_corridor, budget.rho, r_min);
  if (!bound.feasible || bound.below_single_occupancy) return 0;
  const double cap = std::floor(bound.value);
  return std::min(budget.max_concurrent, cap >= 1e9 ? 1000000000 : static_cast<int>(cap));
}

std::optional<std::array<double, 2>> clip_segment(const Vec3& a, const Vec3& b, const Box& box) {
  double t0 = 0.0;
  double t1 = 1.0;
  const Vec3 d = b - a;
  for (int axis = 0; axis < 3; ++axis) {
    if (d[axis] == 0.0) {
      if (a[axis] < box.min[axis] || a[axis] > box.max[axis]) return std::nullopt;
      continue;
    }
    double ta = (box.min[axis] - a[axis]) / d[axis];
    double tb = (box.max[axis] - a[axis]) / d[axis];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return std::nullopt;
  }
  return std::array<double, 2>{t0, t1};
}

std::vector<GeofenceViolation> check_geofence(const std::vector<Vec3>& waypoints,
                                              const std::vector<Geofence>& geofences,
                                              double step) {
  if (waypoints.empty()) throw ValidationError("waypoint list is empty");
  if (!(step > 0.0)) throw ValidationError("geofence sampling step must be positive");
  std::vector<GeofenceViolation> out;
  const std::size_t segments = waypoints.size() > 1 ? waypoints.size() - 1 : 0;
  for (std::size_t i = 0; i < waypoints.size(); ++i) {
    for (const auto& g : geofences) {
      if (g.kind != GeofenceKind::NoFly) continue;
      if (g.volume.contains(waypoints[i])) {
        GeofenceViolation v;
        v.geofence_id = g.id;
        v.segment = segments == 0 ? 0 : std::min(i, segments - 1);
        v.waypoint = i;
        v.point = waypoints[i];
        out.push_back(std::move(v));
      }
    }
    if (i + 1 == waypoints.size()) break;
    const Vec3& a = waypoints[i];
    const Vec3& b = waypoints[i + 1];
    for (const auto& g : geofences) {
      if (g.kind != GeofenceKind::NoFly) continue;
      if (g.volume.contains(a) || g.volume.contains(b)) continue;
      if (auto hit = clip_segment(a, b, g.volume)) {
        // First sample on the step grid inside the fence; the exact entry
        // point when the clip is thinner than one step.
        const double length = (b - a).norm();
        GeofenceViolation v;
        v.geofence_id = g.id;
        v.segment = i;
        v.point = a + (*hit)[0] * (b - a);
        if (length > 0.0) {
          const double first = std::ceil((*hit)[0] * length / step) * step;
          if (first <= (*hit)[1] * length) v.point = a + (first / length) * (b - a);
        }
        out.push_back(std::move(v));
      }
    }
  }
  return out;
}

namespace {

struct LayerInfo {
  std::size_t index;
  LayerRole role;
};

std::optional<LayerInfo> layer_of(const Vec3& p, const CorridorPlan& plan) {
  const Corridor* c = plan.containing(p);
  if (c == nullptr) return std::nullopt;
  for (std::size_t i = 0; i < 3; ++i) {
    if (plan.layer_order[i] == c->layer_role) return LayerInfo{i, c->layer_role};
  }
  return std::nullopt;
}

std::size_t layer_index(const CorridorPlan& plan, LayerRole role) {
  for (std::size_t i = 0; i < 3; ++i) {
    if (plan.layer_order[i] == role) return i;
  }
  return 1;
}

bool in_band(double z, const AltitudeBand& band) { return z >= band.low && z <= band.high; }

// Cruise altitude for a layer: the center of the grid cell holding the band's
// mid-altitude, or the mid-altitude itself when that center leaves the band.
double cruise_altitude(const CorridorPlan& plan, std::size_t layer, const Vec3& at) {
  const auto& band = plan.bands[layer];
  const double mid = 0.5 * (band.low + band.high);
  const Vec3 probe(at.x(), at.y(), mid);
  const double z = plan.grid.cell_center(airspace::cell_of(probe, plan.grid)).z();
  return in_band(z, band) ? z : mid;
}

}  // namespace

Route route_in_corridors(const Vec3& origin, const Vec3& destination, const CorridorPlan& plan) {
  const auto from = layer_of(origin, plan);
  const auto to = layer_of(destination, plan);
  if (!from) throw ValidationError("origin lies in no corridor");
  if (!to) throw ValidationError("destination lies in no corridor");

  const Vec3 start = plan.grid.cell_center(airspace::cell_of(origin, plan.grid));
  const Vec3 goal = plan.grid.cell_center(airspace::cell_of(destination, plan.grid));

  Route route;
  route.waypoints.push_back(start);
  Vec3 cur = start;
  auto move_to = [&](const Vec3& next) {
    if (next != cur) {
      cur = next;
      route.waypoints.push_back(cur);
    }
  };

  std::array<int, 2> axes{0, 1};
  if (from->role == LayerRole::DirectionalNS) axes = {1, 0};

  for (int axis : axes) {
    if (cur[axis] == goal[axis]) continue;
    const LayerRole role = axis == 0 ? LayerRole::DirectionalEW : LayerRole::DirectionalNS;
    const std::size_t layer = layer_index(plan, role);
    if (!in_band(cur.z(), plan.bands[layer])) {
      const double z = to->role == role ? goal.z() : cruise_altitude(plan, layer, cur);
      move_to(Vec3(cur.x(), cur.y(), z));
    }
    Vec3 next = cur;
    next[axis] = goal[axis];
    move_to(next);
  }
  move_to(goal);
  return route;
}

std::optional<std::vector<std::string>> corridor_path(const Route& route,
                                                      const CorridorPlan& plan) {
  std::vector<std::string> path;
  auto append = [&](const std::string& id) {
    if (path.empty() || path.back() != id) path.push_back(id);
  };
  if (route.waypoints.empty()) return path;
  if (route.waypoints.size() == 1) {
    const Corridor* c = plan.containing(route.waypoints.front());
    if (c == nullptr) return std::nullopt;
    append(c->id);
    return path;
  }
  for (std::size_t i = 0; i + 1 < route.waypoints.size(); ++i) {
    const Vec3& a = route.waypoints[i];
    const Vec3& b = route.waypoints[i + 1];
    struct Span {
      double t0, t1;
      std::size_t corridor;
    };
    std::vector<Span> spans;
    for (std::size_t c = 0; c < plan.corridors.size(); ++c) {
      if (auto hit = clip_segment(a, b, plan.corridors[c].volume)) {
        if ((*hit)[1] - (*hit)[0] > kGapTol) spans.push_back({(*hit)[0], (*hit)[1], c});
      }
    }
    std::sort(spans.begin(), spans.end(), [](const Span& x, const Span& y) {
      return x.t0 != y.t0 ? x.t0 < y.t0 : x.corridor < y.corridor;
    });
    double covered = 0.0;
    for (const auto& s : spans) {
      if (s.t0 > covered + kGapTol) return std::nullopt;
      if (s.t1 > covered + kGapTol) append(plan.corridors[s.corridor].id);
      covered = std::max(covered, s.t1);
    }
    if (covered < 1.0 - kGapTol) return std::nullopt;
  }
  return path;
}

int LiveOccupancy::count(const std::string& corridor_id) const {
  auto it = per_corridor.find(corridor_id);
  return it == per_corridor.end() ? 0 : it->second;
}

AdmissionDecision admit(const FlightRequest& request, LiveOccupancy& live,
                        const CorridorPlan& plan, const std::vector<BeamBudget>& budgets) {
  const Box bounds = plan.grid.bounds();
  if (!bounds.contains(request.origin)) {
    throw ValidationError("request '" + request.id + "': origin outside the grid");
  }
  if (!bounds.contains(request.destination)) {
    throw ValidationError("request '" + request.id + "': destination outside the grid");
  }
  if (!(request.r_min > 0.0)) {
    throw ValidationError("request '" + request.id + "': r_min must be positive");
  }
  if (live.active_flights.count(request.id) != 0) {
    throw ValidationError("request '" + request.id + "' is already admitted");
  }

  AdmissionDecision decision;
  auto reject = [&](RejectReason reason, std::string detail) {
    decision.admitted = false;
    decision.reason = reason;
    decision.detail = std::move(detail);
    return decision;
  };

  for (const auto& g : plan.geofences) {
    if (g.volume.contains(request.origin) || g.volume.contains(request.destination)) {
      return reject(RejectReason::Geofence, "endpoint inside " + g.id);
    }
  }

  try {
    decision.route = route_in_corridors(request.origin, request.destination, plan);
  } catch (const ValidationError& e) {
    return reject(RejectReason::NoRoute, e.what());
  }

  const auto violations = check_geofence(decision.route.waypoints, plan.geofences);
  if (!violations.empty()) {
    return reject(RejectReason::Geofence, "route crosses " + violations.front().geofence_id);
  }
  for (const auto& g : plan.geofences) {
    if (g.kind != GeofenceKind::Buffer) continue;
    for (std::size_t i = 0; i < decision.route.waypoints.size(); ++i) {
      const Vec3& a = decision.route.waypoints[i];
      const Vec3& b = i + 1 < decision.route.waypoints.size() ? decision.route.waypoints[i + 1] : a;
      if (clip_segment(a, b, g.volume)) {
        return reject(RejectReason::Geofence, "route enters buffer " + g.id);
      }
    }
  }

  auto path = corridor_path(decision.route, plan);
  if (!path || path->empty()) {
    return reject(RejectReason::NoRoute, "route leaves corridor space");
  }
  decision.corridor_path = *path;

  for (const auto& id : decision.corridor_path) {
    auto it = std::find_if(budgets.begin(), budgets.end(),
                           [&](const BeamBudget& b) { return b.corridor_id == id; });
    if (it == budgets.end()) {
      return reject(RejectReason::NoRoute, "no budget for corridor " + id);
    }
    if (live.count(id) >= effective_cap(*it, request.r_min)) {
      return reject(RejectReason::Capacity, "corridor " + id + " at capacity");
    }
  }

  // Distinct corridors only: a route may re-enter a corridor it left.
  std::vector<std::string> held;
  for (const auto& id : decision.corridor_path) {
    if (std::find(held.begin(), held.end(), id) == held.end()) held.push_back(id);
  }
  for (const auto& id : held) ++live.per_corridor[id];
  live.active_flights[request.id] = held;
  decision.admitted = true;
  return decision;
}

bool release(const std::string& request_id, LiveOccupancy& live) {
  auto it = live.active_flights.find(request_id);
  if (it == live.active_flights.end()) return false;
  for (const auto& id : it->second) --live.per_corridor[id];
  live.active_flights.erase(it);
  return true;
}

AdmissionController::AdmissionController(CorridorPlan plan, std::vector<BeamBudget> budgets)
    : plan_(std::move(plan)), budgets_(std::move(budgets)) {
  for (const auto& c : plan_.corridors) live_.per_corridor[c.id] = 0;
}

AdmissionDecision AdmissionController::admit(const FlightRequest& request) {
  std::lock_guard<std::mutex> lock(mutex_);
  return corridor::admit(request, live_, plan_, budgets_);
}

bool AdmissionController::release(const std::string& request_id) {
  std::lock_guard<std::mutex> lock(mutex_);
  return corridor::release(request_id, live_);
}

LiveOccupancy AdmissionController::snapshot() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return live_;
}

void write_admission_log(const std::filesystem::path& path,
                         const std::vector<AdmissionLogEntry>& entries) {
  CsvWriter csv(path, "timestamp,request_id,decision,reason,corridor_path");
  for (const auto& e : entries) {
    std::string joined;
    for (std::size_t i = 0; i < e.corridor_path.size(); ++i) {
      if (i > 0) joined += ';';
      joined += e.corridor_path[i];
    }
    csv.field(e.timestamp).field(e.request_id).field(e.decision).field(e.reason).field(joined);
    csv.end_row();
  }
}

}  // namespace lawnsim::corridor
