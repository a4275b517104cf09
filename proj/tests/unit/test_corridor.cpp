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

#include <gtest/gtest.h>

#include <filesystem>
#include <limits>
#include <random>
#include <set>

namespace lawnsim::corridor {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

airspace::GridSpec city_grid() {
  return airspace::discretize(Box(Vec3(0, 0, 0), Vec3(1000, 1000, 300)), Vec3(100, 100, 100));
}

const std::array<AltitudeBand, 3> kThirds{{{0, 100}, {100, 200}, {200, 300}}};

Geofence nofly(const std::string& id, Vec3 lo, Vec3 hi) {
  return Geofence{id, Box(lo, hi), GeofenceKind::NoFly};
}

std::vector<BeamBudget> budgets_for(const CorridorPlan& plan, const channel::BeamPlan& beams,
                                    double rho, double r_min) {
  std::vector<BeamBudget> out;
  for (const auto& c : plan.corridors) {
    out.push_back(corridor_beam_budget(c, beams, plan.grid, rho, r_min));
  }
  return out;
}

TEST(Subtract, PiecesTileTheDifference) {
  const Box a(Vec3(0, 0, 0), Vec3(10, 10, 10));
  const Box b(Vec3(3, 4, -1), Vec3(6, 12, 5));
  const auto pieces = subtract(a, b);
  double volume = 0.0;
  for (std::size_t i = 0; i < pieces.size(); ++i) {
    EXPECT_FALSE(pieces[i].overlaps(b));
    EXPECT_TRUE(a.encloses(pieces[i]));
    volume += pieces[i].volume();
    for (std::size_t j = i + 1; j < pieces.size(); ++j) EXPECT_FALSE(pieces[i].overlaps(pieces[j]));
  }
  EXPECT_DOUBLE_EQ(volume, 1000.0 - 3.0 * 6.0 * 5.0);
  EXPECT_LE(pieces.size(), 6u);
}

TEST(Subtract, DisjointAndCovering) {
  const Box a(Vec3(0, 0, 0), Vec3(1, 1, 1));
  EXPECT_EQ(subtract(a, Box(Vec3(2, 2, 2), Vec3(3, 3, 3))).size(), 1u);
  EXPECT_TRUE(subtract(a, Box(Vec3(-1, -1, -1), Vec3(2, 2, 2))).empty());
}

TEST(LayeredPlan, NoFencesGivesThreeFullLayers) {
  const auto plan = build_layered_plan(city_grid(), kThirds, {});
  ASSERT_EQ(plan.corridors.size(), 3u);
  EXPECT_EQ(plan.corridors[0].layer_role, LayerRole::DirectionalEW);
  EXPECT_EQ(plan.corridors[1].layer_role, LayerRole::Transition);
  EXPECT_EQ(plan.corridors[2].layer_role, LayerRole::DirectionalNS);
  EXPECT_EQ(plan.corridors[0].direction_class, Heading::EastWest);
  EXPECT_FALSE(plan.corridors[1].direction_class.has_value());
  // layers tile the vertical extent
  double total = 0.0;
  for (const auto& c : plan.corridors) total += c.volume.volume();
  EXPECT_DOUBLE_EQ(total, plan.grid.bounds().volume());
  EXPECT_EQ(plan.corridors[0].volume.min.z(), 0.0);
  EXPECT_EQ(plan.corridors[2].volume.max.z(), 300.0);
}

TEST(LayeredPlan, DirectionalRolesAreConfigurable) {
  PlanOptions opts;
  opts.bottom_role = LayerRole::DirectionalNS;
  const auto plan = build_layered_plan(city_grid(), kThirds, {}, opts);
  EXPECT_EQ(plan.layer_order[0], LayerRole::DirectionalNS);
  EXPECT_EQ(plan.layer_order[2], LayerRole::DirectionalEW);
  opts.bottom_role = LayerRole::Transition;
  EXPECT_THROW(build_layered_plan(city_grid(), kThirds, {}, opts), ValidationError);
}

TEST(LayeredPlan, CentredFenceSplitsBottomLayer) {
  const auto fence = nofly("tower", Vec3(400, 400, 20), Vec3(600, 600, 80));
  const auto plan = build_layered_plan(city_grid(), kThirds, {fence});
  int bottom = 0;
  double bottom_volume = 0.0;
  for (const auto& c : plan.corridors) {
    EXPECT_FALSE(c.volume.overlaps(fence.volume)) << c.id;
    if (c.layer_role == LayerRole::DirectionalEW) {
      ++bottom;
      bottom_volume += c.volume.volume();
    }
  }
  EXPECT_GE(bottom, 2);
  EXPECT_DOUBLE_EQ(bottom_volume, 1000.0 * 1000.0 * 100.0 - fence.volume.volume());
}

TEST(LayeredPlan, Errors) {
  const std::array<AltitudeBand, 3> overlap{{{0, 120}, {100, 200}, {200, 300}}};
  EXPECT_THROW(build_layered_plan(city_grid(), overlap, {}), ValidationError);
  const std::array<AltitudeBand, 3> outside{{{0, 100}, {100, 200}, {200, 400}}};
  EXPECT_THROW(build_layered_plan(city_grid(), outside, {}), ValidationError);
  EXPECT_THROW(build_layered_plan(city_grid(), kThirds,
                                  {nofly("all", Vec3(-1, -1, 90), Vec3(1001, 1001, 210))}),
               ValidationError);
}

TEST(LayeredPlan, BufferZonesAreCarved) {
  PlanOptions opts;
  opts.buffer_margin = 25.0;
  const auto fence = nofly("tower", Vec3(400, 400, 0), Vec3(600, 600, 300));
  const auto plan = build_layered_plan(city_grid(), kThirds, {fence}, opts);
  ASSERT_EQ(plan.geofences.size(), 2u);
  EXPECT_EQ(plan.geofences[1].kind, GeofenceKind::Buffer);
  for (const auto& c : plan.corridors) EXPECT_FALSE(c.volume.overlaps(plan.geofences[1].volume));
}

TEST(LayeredPlan, SerializationIsDeterministic) {
  const auto fence = nofly("tower", Vec3(400, 400, 0), Vec3(600, 600, 300));
  const auto a = serialize_plan(build_layered_plan(city_grid(), kThirds, {fence}));
  const auto b = serialize_plan(build_layered_plan(city_grid(), kThirds, {fence}));
  EXPECT_EQ(a, b);
  EXPECT_NE(a.find("\"tower\""), std::string::npos);
}

TEST(Budget, FourBeamsInfiniteSnr) {
  const auto grid = airspace::discretize(Box(Vec3(0, 0, 0), Vec3(4, 1, 3)), Vec3(1, 1, 1));
  const auto plan = build_layered_plan(grid, {{{0, 1}, {1, 2}, {2, 3}}}, {});
  const auto beams = channel::BeamPlan::by_column(grid, 4);
  const auto b = corridor_beam_budget(plan.corridors[0], beams, grid, kInf, 1.0);
  EXPECT_EQ(b.beams_in_corridor, 4);
  EXPECT_EQ(b.max_concurrent, 8);
  EXPECT_TRUE(b.feasible);
}

TEST(Budget, SingleBeamUnitSnr) {
  const auto grid = airspace::discretize(Box(Vec3(0, 0, 0), Vec3(1, 1, 3)), Vec3(1, 1, 1));
  const auto plan = build_layered_plan(grid, {{{0, 1}, {1, 2}, {2, 3}}}, {});
  const auto beams = channel::BeamPlan::round_robin(grid.total_cells(), 1);
  EXPECT_EQ(corridor_beam_budget(plan.corridors[0], beams, grid, 1.0, 1.0).max_concurrent, 1);
}

TEST(Budget, UnreachableRateIsZeroAndInfeasible) {
  const auto plan = build_layered_plan(city_grid(), kThirds, {});
  const auto beams = channel::BeamPlan::round_robin(300, 16);
  for (double r : {4.0, 10.0, 50.0}) {
    const auto b = corridor_beam_budget(plan.corridors[0], beams, plan.grid, 10.0, r);
    EXPECT_EQ(b.max_concurrent, 0) << r;
    EXPECT_FALSE(b.feasible);
  }
}

TEST(Budget, MonotoneInSnrAndRate) {
  const auto plan = build_layered_plan(city_grid(), kThirds, {});
  const auto beams = channel::BeamPlan::round_robin(300, 16);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> db(-10, 40);
  std::uniform_real_distribution<double> rate(0.05, 6.0);
  for (int i = 0; i < 500; ++i) {
    double r1 = channel::db_to_linear(db(rng)), r2 = channel::db_to_linear(db(rng));
    if (r1 > r2) std::swap(r1, r2);
    double q1 = rate(rng), q2 = rate(rng);
    if (q1 > q2) std::swap(q1, q2);
    const auto& c = plan.corridors[0];
    ASSERT_LE(corridor_beam_budget(c, beams, plan.grid, r1, q1).max_concurrent,
              corridor_beam_budget(c, beams, plan.grid, r2, q1).max_concurrent);
    ASSERT_GE(corridor_beam_budget(c, beams, plan.grid, r1, q1).max_concurrent,
              corridor_beam_budget(c, beams, plan.grid, r1, q2).max_concurrent);
  }
}

TEST(Budget, EmptyCorridorThrows) {
  const auto grid = city_grid();
  Corridor c;
  c.id = "outside";
  c.volume = Box(Vec3(2000, 0, 0), Vec3(2100, 100, 100));
  EXPECT_THROW(corridor_beam_budget(c, channel::BeamPlan::round_robin(300, 4), grid, 1.0, 1.0),
               ValidationError);
}

TEST(Geofence, ClearPathIsEmpty) {
  const std::vector<Geofence> fences{nofly("z", Vec3(10, 10, 0), Vec3(20, 20, 10))};
  EXPECT_TRUE(check_geofence({Vec3(0, 0, 5), Vec3(30, 0, 5), Vec3(30, 30, 5)}, fences).empty());
}

TEST(Geofence, SegmentCrossingIsOneViolation) {
  const std::vector<Geofence> fences{nofly("z", Vec3(10, -5, 0), Vec3(20, 5, 10))};
  const auto v = check_geofence({Vec3(0, 0, 5), Vec3(30, 0, 5)}, fences);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].segment, 0u);
  EXPECT_FALSE(v[0].waypoint.has_value());
  EXPECT_TRUE(fences[0].volume.contains(v[0].point));
  EXPECT_DOUBLE_EQ(v[0].point.x(), 10.0);
}

TEST(Geofence, ThinCrossingBetweenSamplesIsCaught) {
  // A 0.2 m slab between 1 m samples.
  const std::vector<Geofence> fences{nofly("slab", Vec3(5.4, -1, -1), Vec3(5.6, 1, 1))};
  const auto v = check_geofence({Vec3(0, 0, 0), Vec3(10, 0, 0)}, fences);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_TRUE(fences[0].volume.contains(v[0].point));
}

TEST(Geofence, WaypointOnFaceViolates) {
  const std::vector<Geofence> fences{nofly("z", Vec3(10, 10, 0), Vec3(20, 20, 10))};
  const auto v = check_geofence({Vec3(0, 0, 0), Vec3(10, 15, 5)}, fences);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].waypoint, std::optional<std::size_t>(1));
  EXPECT_EQ(v[0].segment, 0u);
}

TEST(Geofence, BufferIsAdvisoryAndEmptyListThrows) {
  const std::vector<Geofence> fences{{"b", Box(Vec3(0, 0, 0), Vec3(1, 1, 1)), GeofenceKind::Buffer}};
  EXPECT_TRUE(check_geofence({Vec3(0.5, 0.5, 0.5)}, fences).empty());
  EXPECT_THROW(check_geofence({}, fences), ValidationError);
}

TEST(Route, SameCorridorSameHeadingIsStraight) {
  const auto plan = build_layered_plan(city_grid(), kThirds, {});
  const auto r = route_in_corridors(Vec3(50, 50, 50), Vec3(950, 50, 50), plan);
  ASSERT_EQ(r.waypoints.size(), 2u);
  EXPECT_EQ(r.waypoints[0], Vec3(50, 50, 50));
  EXPECT_EQ(r.waypoints[1], Vec3(950, 50, 50));
}

TEST(Route, HeadingChangeUsesTransitionLayer) {
  const auto plan = build_layered_plan(city_grid(), kThirds, {});
  const auto r = route_in_corridors(Vec3(50, 50, 50), Vec3(950, 950, 250), plan);
  const std::vector<Vec3> expected{Vec3(50, 50, 50), Vec3(950, 50, 50), Vec3(950, 50, 250),
                                   Vec3(950, 950, 250)};
  EXPECT_EQ(r.waypoints, expected);
  const auto path = corridor_path(r, plan);
  ASSERT_TRUE(path.has_value());
  EXPECT_EQ(*path, (std::vector<std::string>{"ew-0", "transition-0", "ns-0"}));
}

TEST(Route, ReturnsToBottomLayerWhenNeeded) {
  const auto plan = build_layered_plan(city_grid(), kThirds, {});
  const auto r = route_in_corridors(Vec3(50, 50, 50), Vec3(950, 950, 50), plan);
  const std::vector<Vec3> expected{Vec3(50, 50, 50), Vec3(950, 50, 50), Vec3(950, 50, 250),
                                   Vec3(950, 950, 250), Vec3(950, 950, 50)};
  EXPECT_EQ(r.waypoints, expected);
}

TEST(Route, NorthSouthOriginGoesYFirst) {
  const auto plan = build_layered_plan(city_grid(), kThirds, {});
  const auto r = route_in_corridors(Vec3(50, 50, 250), Vec3(950, 950, 50), plan);
  const std::vector<Vec3> expected{Vec3(50, 50, 250), Vec3(50, 950, 250), Vec3(50, 950, 50),
                                   Vec3(950, 950, 50)};
  EXPECT_EQ(r.waypoints, expected);
}

TEST(Route, EndpointInVoidThrows) {
  const auto plan = build_layered_plan(city_grid(), kThirds,
                                       {nofly("z", Vec3(400, 400, 0), Vec3(600, 600, 300))});
  EXPECT_THROW(route_in_corridors(Vec3(500, 500, 50), Vec3(50, 50, 50), plan), ValidationError);
}

struct AdmissionFixture : ::testing::Test {
  CorridorPlan plan = build_layered_plan(
      city_grid(), kThirds, {nofly("stadium", Vec3(400, 400, 0), Vec3(600, 600, 300))});
  channel::BeamPlan beams = channel::BeamPlan::round_robin(300, 16);
};

TEST_F(AdmissionFixture, EmptyAirspaceAdmits) {
  LiveOccupancy live;
  const auto d = admit({"a", Vec3(50, 50, 50), Vec3(950, 50, 50), 1.0}, live, plan,
                       budgets_for(plan, beams, 10.0, 1.0));
  EXPECT_TRUE(d.admitted);
  ASSERT_FALSE(d.corridor_path.empty());
  for (const auto& id : d.corridor_path) EXPECT_EQ(live.count(id), 1);
}

TEST_F(AdmissionFixture, FullCorridorRejectsOnCapacity) {
  auto budgets = budgets_for(plan, beams, 10.0, 1.0);
  LiveOccupancy live;
  const auto first = admit({"a", Vec3(50, 50, 50), Vec3(350, 50, 50), 1.0}, live, plan, budgets);
  ASSERT_TRUE(first.admitted);
  const std::string corridor = first.corridor_path.front();
  const auto it = std::find_if(budgets.begin(), budgets.end(),
                               [&](const BeamBudget& b) { return b.corridor_id == corridor; });
  const int cap = it->max_concurrent;
  int admitted = 1;
  int rejected = 0;
  for (int i = 1; i <= cap; ++i) {
    const auto d = admit({"f" + std::to_string(i), Vec3(50, 50, 50), Vec3(350, 50, 50), 1.0}, live,
                         plan, budgets);
    if (d.admitted) {
      ++admitted;
    } else {
      ++rejected;
      EXPECT_EQ(d.reason, RejectReason::Capacity);
    }
  }
  EXPECT_EQ(admitted, cap);
  EXPECT_EQ(rejected, 1);
  EXPECT_EQ(live.count(corridor), cap);
  EXPECT_TRUE(release("a", live));
  EXPECT_FALSE(release("a", live));
  EXPECT_EQ(live.count(corridor), cap - 1);
}

TEST_F(AdmissionFixture, GeofenceRejections) {
  const auto budgets = budgets_for(plan, beams, 10.0, 1.0);
  LiveOccupancy live;
  auto d = admit({"in", Vec3(50, 50, 50), Vec3(500, 500, 50), 1.0}, live, plan, budgets);
  EXPECT_FALSE(d.admitted);
  EXPECT_EQ(d.reason, RejectReason::Geofence);
  d = admit({"cross", Vec3(50, 450, 50), Vec3(950, 450, 50), 1.0}, live, plan, budgets);
  EXPECT_FALSE(d.admitted);
  EXPECT_EQ(d.reason, RejectReason::Geofence);
  EXPECT_TRUE(live.active_flights.empty());
}

TEST_F(AdmissionFixture, StricterRequestRateTightensCap) {
  auto budgets = budgets_for(plan, beams, 10.0, 1.0);
  LiveOccupancy live;
  // log2(1 + 10) ~ 3.46 bits: a 3.5 bit request cannot be served at all.
  const auto d = admit({"greedy", Vec3(50, 50, 50), Vec3(350, 50, 50), 3.5}, live, plan, budgets);
  EXPECT_FALSE(d.admitted);
  EXPECT_EQ(d.reason, RejectReason::Capacity);
}

TEST_F(AdmissionFixture, ErrorsForOutsideGridAndDuplicates) {
  const auto budgets = budgets_for(plan, beams, 10.0, 1.0);
  LiveOccupancy live;
  EXPECT_THROW(admit({"x", Vec3(-10, 0, 0), Vec3(50, 50, 50), 1.0}, live, plan, budgets),
               ValidationError);
  ASSERT_TRUE(admit({"dup", Vec3(50, 50, 50), Vec3(150, 50, 50), 1.0}, live, plan, budgets).admitted);
  EXPECT_THROW(admit({"dup", Vec3(50, 50, 50), Vec3(150, 50, 50), 1.0}, live, plan, budgets),
               ValidationError);
}

TEST_F(AdmissionFixture, RandomOperationsRespectBudgets) {
  const auto budgets = budgets_for(plan, beams, 1.0, 0.5);
  std::map<std::string, int> cap;
  for (const auto& b : budgets) cap[b.corridor_id] = b.max_concurrent;
  AdmissionController ctl(plan, budgets);
  std::map<std::string, std::vector<std::string>> active;
  std::mt19937_64 rng(1234);
  std::uniform_real_distribution<double> xy(0, 1000), z(0, 300);
  int next_id = 0;
  for (int op = 0; op < 3000; ++op) {
    if (!active.empty() && rng() % 3 == 0) {
      auto it = active.begin();
      std::advance(it, static_cast<long>(rng() % active.size()));
      ASSERT_TRUE(ctl.release(it->first));
      active.erase(it);
    } else {
      const std::string id = "r" + std::to_string(next_id++);
      const auto d = ctl.admit({id, Vec3(xy(rng), xy(rng), z(rng)), Vec3(xy(rng), xy(rng), z(rng)), 0.5});
      if (d.admitted) {
        ASSERT_TRUE(check_geofence(d.route.waypoints, plan.geofences).empty());
        active[id] = d.corridor_path;
      }
    }
    std::map<std::string, int> count;
    for (const auto& [id, path] : active) {
      for (const auto& c : std::set<std::string>(path.begin(), path.end())) ++count[c];
    }
    const auto snap = ctl.snapshot();
    for (const auto& [c, n] : count) {
      ASSERT_LE(n, cap[c]);
      ASSERT_EQ(snap.count(c), n);
    }
  }
}

TEST(AdmissionLog, Header) {
  const auto path = std::filesystem::temp_directory_path() / "lawnsim_admission.csv";
  write_admission_log(path, {{1.5, "a", "admitted", "", {"ew-0", "transition-0"}}});
  const auto rows = read_csv(path);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"timestamp", "request_id", "decision", "reason",
                                               "corridor_path"}));
  EXPECT_EQ(rows[1][4], "ew-0;transition-0");
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace lawnsim::corridor
