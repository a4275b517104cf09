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

#include "lawnsim/harness.hpp"

#include "lawnsim/beamforming.hpp"
#include "lawnsim/csv.hpp"
#include "lawnsim/error.hpp"
#include "lawnsim/random.hpp"
#include "lawnsim/sensing_control.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace lawnsim::harness {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kCommands[] = {"capacity-sweep", "control-sim", "corridor-demo"};

// Non-finite doubles become strings so the summary stays valid JSON.
json num(double x) {
  if (std::isfinite(x)) return x;
  return format_number(x);
}

class Run {
 public:
  Run(std::string command, const ScenarioConfig& cfg) {
    art_.command = std::move(command);
    art_.output_dir = cfg.output_dir;
    art_.config_hash = config_hash(cfg);
    fs::create_directories(art_.output_dir);
  }

  fs::path file(const std::string& name) {
    art_.files.push_back(name);
    return art_.output_dir / name;
  }

  void check(std::string name, bool passed, std::string detail) {
    art_.checks.push_back({std::move(name), passed, std::move(detail)});
  }

  RunArtifacts finish(json data) {
    const std::string summary_name = summary_file_name(art_.command);
    art_.files.push_back(summary_name);
    json checks = json::array();
    for (const auto& c : art_.checks) {
      checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    }
    json doc = {{"command", art_.command},
                {"config_hash", art_.config_hash},
                {"files", art_.files},
                {"summary", std::move(data)},
                {"checks", checks}};
    art_.summary_json = doc.dump(2) + "\n";
    std::ofstream out(art_.output_dir / summary_name, std::ios::binary);
    out << art_.summary_json;
    if (!out) throw std::runtime_error("cannot write " + (art_.output_dir / summary_name).string());
    return art_;
  }

 private:
  RunArtifacts art_;
};

std::vector<int> k_range(const CapacityConfig& cap) {
  std::vector<int> ks;
  for (int k = cap.k_min; k <= cap.k_max; k += cap.k_step) ks.push_back(k);
  return ks;
}

std::uint64_t point_seed(std::uint64_t seed, std::size_t index) {
  return derive_stream(seed, {0x636f6e74ULL, index})();
}

control::Vector initial_state(const ControlConfig& ctl) {
  if (ctl.initial_state.size() > 0) return ctl.initial_state;
  return control::Vector::Ones(ctl.A.rows());
}

double closed_loop_radius(const ControlConfig& ctl) {
  const control::Matrix m = ctl.A - ctl.B * ctl.gain;
  return m.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace

bool RunArtifacts::all_checks_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

std::string summary_file_name(const std::string& command) {
  return "summary_" + command + ".json";
}

airspace::GridSpec build_grid(const ScenarioConfig& cfg) {
  return airspace::discretize(Box(cfg.grid.bounds_min, cfg.grid.bounds_max), cfg.grid.cell_size);
}

channel::BeamPlan build_beam_plan(const ScenarioConfig& cfg, const airspace::GridSpec& grid) {
  if (cfg.beams.mapping == "by_column") return channel::BeamPlan::by_column(grid, cfg.beams.num_beams);
  return channel::BeamPlan::round_robin(grid.total_cells(), cfg.beams.num_beams);
}

corridor::CorridorPlan build_corridor_plan(const ScenarioConfig& cfg,
                                           const airspace::GridSpec& grid) {
  const auto& cor = cfg.corridors;
  std::array<corridor::AltitudeBand, 3> bands{};
  if (cor.layers.empty()) {
    const double lo = grid.bounds_min.z();
    const double step = (grid.bounds_max.z() - lo) / 3.0;
    bands = {{{lo, lo + step}, {lo + step, lo + 2.0 * step}, {lo + 2.0 * step, grid.bounds_max.z()}}};
  } else {
    for (std::size_t i = 0; i < 3; ++i) bands[i] = cor.layers[i];
  }
  std::vector<corridor::Geofence> fences;
  for (const auto& z : cor.nofly) {
    fences.push_back({z.id, Box(z.min, z.max), corridor::GeofenceKind::NoFly});
  }
  corridor::PlanOptions opts;
  opts.bottom_role = corridor::parse_layer_role(cor.bottom_role);
  opts.buffer_margin = cor.buffer_margin;
  return corridor::build_layered_plan(grid, bands, fences, opts);
}

RunArtifacts run_capacity_sweep(const ScenarioConfig& cfg) {
  Run run("capacity-sweep", cfg);
  const auto& cap = cfg.capacity;
  const int L = cfg.beams.num_beams;
  const std::vector<int> ks = k_range(cap);
  std::vector<double> rhos;
  for (double db : cap.rho_db) rhos.push_back(channel::db_to_linear(db));

  std::vector<channel::SeRow> rows;
  for (const auto& name : cap.policies) {
    const auto policy = channel::parse_policy(name);
    auto part = channel::per_uav_se_curve(ks, L, rhos, policy, cfg.replicates, cfg.seed);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  channel::write_curve_csv(run.file("capacity_curve.csv"), rows);

  json boundaries = json::array();
  {
    CsvWriter csv(run.file("capacity_boundaries.csv"),
                  "rho_db,num_beams,noise_masked_max_k,c_crit,c_air_max,r_min,feasible");
    for (std::size_t i = 0; i < rhos.size(); ++i) {
      const double c_crit = channel::critical_capacity(L, rhos[i]);
      const auto bound = channel::qos_capacity_bound(L, rhos[i], cap.r_min);
      csv.field(cap.rho_db[i]).field(L).field(L).field(c_crit).field(bound.value)
          .field(cap.r_min).field(bound.feasible && !bound.below_single_occupancy ? 1 : 0);
      csv.end_row();
      boundaries.push_back({{"rho_db", cap.rho_db[i]},
                            {"num_beams", L},
                            {"noise_masked_max_k", L},
                            {"c_crit", num(c_crit)},
                            {"c_air_max", num(bound.value)},
                            {"r_min", cap.r_min},
                            {"feasible", bound.feasible && !bound.below_single_occupancy}});
    }
  }

  // Balanced rows must sit on the noise-masked plateau up to L and fall
  // strictly after it.
  bool plateau = true;
  bool decreasing = true;
  bool regimes = true;
  std::string plateau_detail;
  std::string decreasing_detail;
  std::map<std::size_t, double> last_se;
  for (const auto& r : rows) {
    const std::size_t ri = static_cast<std::size_t>(
        std::find(rhos.begin(), rhos.end(), r.rho) - rhos.begin());
    if (r.regime != channel::classify_regime(r.k, L, r.rho)) regimes = false;
    if (r.policy != channel::AllocationPolicy::Balanced) continue;
    if (r.k <= L && r.mean_se != std::log2(1.0 + r.rho)) {
      plateau = false;
      plateau_detail = "K=" + std::to_string(r.k) + " rho_db=" + format_number(cap.rho_db[ri]);
    }
    if (r.k > L) {
      auto it = last_se.find(ri);
      if (it != last_se.end() && !(r.mean_se < it->second)) {
        decreasing = false;
        decreasing_detail = "K=" + std::to_string(r.k) + " rho_db=" + format_number(cap.rho_db[ri]);
      }
    }
    last_se[ri] = r.mean_se;
  }
  const bool has_balanced =
      std::find(cap.policies.begin(), cap.policies.end(), "balanced") != cap.policies.end();
  if (has_balanced) {
    run.check("noise_masked_plateau", plateau, plateau_detail);
    run.check("strictly_decreasing_above_L", decreasing, decreasing_detail);
  }
  run.check("regime_labels", regimes, "");

  return run.finish({{"num_beams", L},
                     {"k_min", cap.k_min},
                     {"k_max", ks.back()},
                     {"policies", cap.policies},
                     {"boundaries", boundaries}});
}

RunArtifacts run_control_experiment(const ScenarioConfig& cfg) {
  Run run("control-sim", cfg);
  const auto& ctl = cfg.control;
  const control::PlantModel plant{ctl.A, ctl.B, ctl.process_noise};
  const control::ControllerGain gains{ctl.gain, ctl.lyapunov, ctl.eta};
  const control::LinkReliability link{ctl.steepness, channel::db_to_linear(ctl.gamma_th_db)};
  const double entropy = control::topological_entropy(ctl.A);
  const double gamma_c = control::critical_sinr(entropy, ctl.bandwidth);
  const control::Vector q0 = initial_state(ctl);

  control::SimulationOptions sim_opts;
  sim_opts.initial_state = q0;
  sim_opts.divergence_ceiling = ctl.divergence_ceiling;

  struct PointResult {
    double sinr_db = 0.0;
    double sinr = 0.0;
    double p = 0.0;
    double diverged = 0.0;
    double packet_rate = 0.0;
    bool p1_feasible = false;
    std::string p1_reason;
    double p1_power = 0.0;
    double p1_kappa = 0.0;
    std::string p1_binding;
  };
  std::vector<PointResult> points;

  for (std::size_t i = 0; i < ctl.sinr_db.size(); ++i) {
    PointResult pr;
    pr.sinr_db = ctl.sinr_db[i];
    pr.sinr = ctl.sinr_relative_to_critical ? gamma_c * channel::db_to_linear(pr.sinr_db)
                                            : channel::db_to_linear(pr.sinr_db);
    pr.p = control::packet_success_prob(pr.sinr, link);

    if (ctl.p1.enabled) {
      beamforming::P1Problem problem;
      problem.theta = ctl.p1.theta;
      problem.array = {ctl.p1.num_elements, ctl.p1.spacing};
      problem.plant = plant;
      problem.gains = gains;
      problem.link = link;
      problem.sensing = ctl.sensing;
      problem.gamma_critical = pr.sinr;
      problem.q_current = q0;
      problem.noise_var = ctl.p1.noise_var;
      problem.beta = ctl.p1.channel_gain;
      beamforming::SolverOptions opts;
      opts.kappa_points = ctl.p1.kappa_points;
      opts.power_cap = ctl.p1.power_cap;
      const auto sol = beamforming::solve_p1(problem, opts);
      beamforming::write_solver_csv(run.file("p1_" + std::to_string(i) + ".csv"), sol);
      pr.p1_feasible = sol.feasible;
      pr.p1_reason = sol.infeasible_reason;
      pr.p1_power = sol.feasible ? sol.power : std::numeric_limits<double>::infinity();
      pr.p1_kappa = sol.kappa;
      pr.p1_binding = std::string(beamforming::to_string(sol.binding));
    }

    const std::vector<control::ScheduleStep> schedule{{pr.sinr, ctl.sensing_beam_gain}};
    const auto stats =
        control::simulate_closed_loop(plant, gains, link, ctl.sensing, schedule, ctl.horizon,
                                      cfg.replicates, point_seed(cfg.seed, i), sim_opts);
    control::write_trajectory_csv(run.file("trajectory_" + std::to_string(i) + ".csv"), stats);
    pr.diverged = stats.final_diverged_frac;
    pr.packet_rate = stats.packet_success_rate;
    points.push_back(pr);
  }

  json survival = json::array();
  {
    CsvWriter csv(run.file("survival.csv"),
                  "point,sinr_db,sinr,sinr_over_gamma_c,packet_prob,packet_rate,diverged_frac,"
                  "p1_feasible,p1_power");
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& pr = points[i];
      const double ratio = gamma_c > 0.0 ? pr.sinr / gamma_c : std::numeric_limits<double>::infinity();
      csv.field(i).field(pr.sinr_db).field(pr.sinr).field(ratio).field(pr.p)
          .field(pr.packet_rate).field(pr.diverged);
      if (ctl.p1.enabled) {
        csv.field(pr.p1_feasible ? 1 : 0).field(pr.p1_power);
      } else {
        csv.field("").field("");
      }
      csv.end_row();
      json row = {{"point", i},
                  {"sinr_db", pr.sinr_db},
                  {"sinr", num(pr.sinr)},
                  {"packet_prob", num(pr.p)},
                  {"diverged_frac", num(pr.diverged)}};
      if (ctl.p1.enabled) {
        row["p1"] = {{"feasible", pr.p1_feasible},
                     {"reason", pr.p1_reason},
                     {"power", num(pr.p1_power)},
                     {"kappa", num(pr.p1_kappa)},
                     {"binding", pr.p1_binding}};
      }
      survival.push_back(row);
    }
  }

  // The threshold checks only apply to the setting they describe: a
  // stabilizing gain and a steep sigmoid centred on the critical SINR.
  const bool threshold_setting =
      gamma_c > 0.0 && ctl.steepness >= 10.0 && closed_loop_radius(ctl) < 1.0 &&
      std::abs(link.gamma_th - gamma_c) <= 1e-9 * gamma_c;
  if (threshold_setting) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& pr = points[i];
      const std::string tag = "point " + std::to_string(i) + " diverged_frac=" + format_number(pr.diverged);
      if (pr.sinr <= gamma_c / 100.0 * (1.0 + 1e-9)) {
        run.check("diverges_below_critical", pr.diverged > 0.95, tag);
      } else if (pr.sinr >= 4.0 * gamma_c * (1.0 - 1e-9)) {
        run.check("survives_above_critical", pr.diverged < 0.05, tag);
      }
    }
  }

  return run.finish({{"entropy_bits", num(entropy)},
                     {"gamma_critical", num(gamma_c)},
                     {"bandwidth", ctl.bandwidth},
                     {"horizon", ctl.horizon},
                     {"replicates", cfg.replicates},
                     {"survival", survival}});
}

RunArtifacts run_corridor_demo(const ScenarioConfig& cfg) {
  Run run("corridor-demo", cfg);
  const auto grid = build_grid(cfg);
  const auto beams = build_beam_plan(cfg, grid);
  const auto plan = build_corridor_plan(cfg, grid);
  const double rho = channel::db_to_linear(cfg.corridors.rho_db);

  {
    std::ofstream out(run.file("corridor_plan.json"), std::ios::binary);
    out << corridor::serialize_plan(plan) << "\n";
  }

  std::vector<corridor::BeamBudget> budgets;
  for (const auto& c : plan.corridors) {
    budgets.push_back(corridor::corridor_beam_budget(c, beams, grid, rho, cfg.corridors.r_min));
  }
  {
    CsvWriter csv(run.file("budgets.csv"),
                  "corridor_id,beams,rho_db,r_min,max_concurrent,qos_bound,c_crit,feasible");
    for (const auto& b : budgets) {
      csv.field(b.corridor_id).field(b.beams_in_corridor).field(cfg.corridors.rho_db)
          .field(b.r_min).field(b.max_concurrent).field(b.qos_bound)
          .field(b.critical_capacity).field(b.feasible ? 1 : 0);
      csv.end_row();
    }
  }
  std::map<std::string, int> caps;
  for (const auto& b : budgets) caps[b.corridor_id] = b.max_concurrent;

  // Stable order by time; ties keep script order.
  std::vector<std::size_t> order(cfg.corridors.requests.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return cfg.corridors.requests[a].time < cfg.corridors.requests[b].time;
  });

  corridor::AdmissionController controller(plan, budgets);
  std::vector<corridor::AdmissionLogEntry> log;
  std::map<std::string, std::vector<std::string>> held;  // brute-force shadow
  int admitted = 0;
  int rejected = 0;
  std::map<std::string, int> reject_counts;
  bool within_budget = true;
  bool routes_clear = true;
  std::string budget_detail;
  std::string route_detail;

  for (std::size_t idx : order) {
    const auto& req = cfg.corridors.requests[idx];
    corridor::AdmissionLogEntry entry;
    entry.timestamp = req.time;
    entry.request_id = req.id;
    if (req.action == "release") {
      const bool known = controller.release(req.id);
      entry.decision = known ? "released" : "unknown";
      if (known) {
        entry.corridor_path = held[req.id];
        held.erase(req.id);
      }
    } else {
      const auto d = controller.admit({req.id, req.origin, req.destination, req.r_min});
      entry.corridor_path = d.corridor_path;
      if (d.admitted) {
        ++admitted;
        entry.decision = "admitted";
        held[req.id] = d.corridor_path;
        if (!corridor::check_geofence(d.route.waypoints, plan.geofences).empty()) {
          routes_clear = false;
          route_detail = req.id;
        }
      } else {
        ++rejected;
        entry.decision = "rejected";
        entry.reason = std::string(corridor::to_string(*d.reason));
        ++reject_counts[entry.reason];
      }
    }
    std::map<std::string, int> count;
    for (const auto& [id, path] : held) {
      for (const auto& c : std::set<std::string>(path.begin(), path.end())) ++count[c];
    }
    for (const auto& [c, n] : count) {
      if (n > caps[c]) {
        within_budget = false;
        budget_detail = c + " at " + req.id;
      }
    }
    log.push_back(std::move(entry));
  }
  corridor::write_admission_log(run.file("admission_log.csv"), log);

  const auto live = controller.snapshot();
  json occupancy = json::array();
  {
    CsvWriter csv(run.file("occupancy.csv"), "corridor_id,occupancy,max_concurrent");
    for (const auto& b : budgets) {
      const int n = live.count(b.corridor_id);
      csv.field(b.corridor_id).field(n).field(b.max_concurrent);
      csv.end_row();
      occupancy.push_back({{"corridor_id", b.corridor_id},
                           {"occupancy", n},
                           {"max_concurrent", b.max_concurrent}});
    }
  }

  run.check("occupancy_within_budget", within_budget, budget_detail);
  run.check("admitted_routes_clear_of_geofences", routes_clear, route_detail);

  return run.finish({{"corridors", plan.corridors.size()},
                     {"geofences", plan.geofences.size()},
                     {"requests", cfg.corridors.requests.size()},
                     {"admitted", admitted},
                     {"rejected", rejected},
                     {"rejections", reject_counts},
                     {"occupancy", occupancy}});
}

namespace {

std::string text(const json& v) {
  if (v.is_number()) return format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

void print_summary(const json& doc, std::ostream& out) {
  const std::string command = doc.at("command").get<std::string>();
  const json& s = doc.at("summary");
  out << "== " << command << " (config " << doc.at("config_hash").get<std::string>() << ")\n";
  if (command == "capacity-sweep") {
    out << "rho_db  L  C_crit  C_air_max  feasible\n";
    for (const auto& b : s.at("boundaries")) {
      out << text(b.at("rho_db")) << "  " << text(b.at("num_beams")) << "  "
          << text(b.at("c_crit")) << "  " << text(b.at("c_air_max")) << "  "
          << (b.at("feasible").get<bool>() ? "yes" : "no") << "\n";
    }
  } else if (command == "control-sim") {
    out << "entropy " << text(s.at("entropy_bits")) << " bits, gamma_critical "
        << text(s.at("gamma_critical")) << "\n";
    out << "sinr_db  sinr  packet_prob  diverged_frac\n";
    for (const auto& r : s.at("survival")) {
      out << text(r.at("sinr_db")) << "  " << text(r.at("sinr")) << "  "
          << text(r.at("packet_prob")) << "  " << text(r.at("diverged_frac"));
      if (r.contains("p1")) {
        const auto& p1 = r.at("p1");
        out << "  p1 " << (p1.at("feasible").get<bool>() ? "power " + text(p1.at("power"))
                                                         : "infeasible (" + text(p1.at("reason")) + ")");
      }
      out << "\n";
    }
  } else if (command == "corridor-demo") {
    out << "admitted " << text(s.at("admitted")) << ", rejected " << text(s.at("rejected")) << "\n";
    for (const auto& o : s.at("occupancy")) {
      out << text(o.at("corridor_id")) << "  " << text(o.at("occupancy")) << "/"
          << text(o.at("max_concurrent")) << "\n";
    }
  }
  for (const auto& c : doc.at("checks")) {
    out << (c.at("passed").get<bool>() ? "PASS " : "FAIL ") << c.at("name").get<std::string>();
    const std::string detail = c.at("detail").get<std::string>();
    if (!detail.empty()) out << " (" << detail << ")";
    out << "\n";
  }
}

}  // namespace

bool report_summary(const fs::path& dir, std::ostream& out) {
  bool found = false;
  bool ok = true;
  for (const char* command : kCommands) {
    const fs::path path = dir / summary_file_name(command);
    if (!fs::exists(path)) continue;
    found = true;
    std::ifstream in(path, std::ios::binary);
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ": unreadable summary");
    }
    for (const auto& f : doc.at("files")) {
      const fs::path p = dir / f.get<std::string>();
      if (!fs::exists(p) || fs::file_size(p) == 0) {
        throw ValidationError("missing or empty artifact " + p.string());
      }
    }
    print_summary(doc, out);
    for (const auto& c : doc.at("checks")) ok = ok && c.at("passed").get<bool>();
  }
  if (!found) throw ValidationError("no run summary in " + dir.string());
  return ok;
}

}  // namespace lawnsim::harness
