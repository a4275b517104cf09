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

#include "lawnsim/config.hpp"

#include "lawnsim/airspace.hpp"
#include "lawnsim/beamforming.hpp"
#include "lawnsim/channel.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace lawnsim::harness {

namespace {

using nlohmann::json;

// Walks one JSON object, remembering which keys were consumed so leftovers
// can be rejected as unknown.
class ObjectReader {
 public:
  ObjectReader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ConfigError(display(path_), "expected an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json* take(const std::string& key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void read(const std::string& key, double& out) {
    if (const json* v = take(key)) out = as_number(*v, child(key));
  }

  void read(const std::string& key, int& out) {
    if (const json* v = take(key)) out = as_int(*v, child(key));
  }

  void read(const std::string& key, bool& out) {
    if (const json* v = take(key)) {
      if (!v->is_boolean()) throw ConfigError(child(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void read(const std::string& key, std::string& out) {
    if (const json* v = take(key)) {
      if (!v->is_string()) throw ConfigError(child(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void read(const std::string& key, std::vector<double>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) throw ConfigError(child(key), "expected an array of numbers");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        out.push_back(as_number((*v)[i], child(key) + "[" + std::to_string(i) + "]"));
      }
    }
  }

  void read(const std::string& key, std::vector<std::string>& out) {
    if (const json* v = take(key)) {
      if (!v->is_array()) throw ConfigError(child(key), "expected an array of strings");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_string()) {
          throw ConfigError(child(key) + "[" + std::to_string(i) + "]", "expected a string");
        }
        out.push_back((*v)[i].get<std::string>());
      }
    }
  }

  void read(const std::string& key, Vec3& out) {
    if (const json* v = take(key)) {
      if (!v->is_array() || v->size() != 3) {
        throw ConfigError(child(key), "expected an array of three numbers");
      }
      for (int i = 0; i < 3; ++i) {
        out[i] = as_number((*v)[static_cast<std::size_t>(i)],
                           child(key) + "[" + std::to_string(i) + "]");
      }
    }
  }

  void read(const std::string& key, control::Matrix& out) {
    if (const json* v = take(key)) {
      const std::string where = child(key);
      if (!v->is_array() || v->empty()) throw ConfigError(where, "expected a non-empty matrix");
      const std::size_t rows = v->size();
      std::size_t cols = 0;
      for (std::size_t r = 0; r < rows; ++r) {
        const json& row = (*v)[r];
        if (!row.is_array() || row.empty()) {
          throw ConfigError(where + "[" + std::to_string(r) + "]", "expected a non-empty row");
        }
        if (r == 0) cols = row.size();
        if (row.size() != cols) {
          throw ConfigError(where + "[" + std::to_string(r) + "]", "ragged matrix row");
        }
      }
      out.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = as_number(
              (*v)[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
        }
      }
    }
  }

  void read(const std::string& key, control::Vector& out) {
    if (const json* v = take(key)) {
      std::vector<double> tmp;
      if (!v->is_array()) throw ConfigError(child(key), "expected an array of numbers");
      for (std::size_t i = 0; i < v->size(); ++i) {
        tmp.push_back(as_number((*v)[i], child(key) + "[" + std::to_string(i) + "]"));
      }
      out = Eigen::Map<control::Vector>(tmp.data(), static_cast<Eigen::Index>(tmp.size()));
    }
  }

  void read(const std::string& key, std::complex<double>& out) {
    if (const json* v = take(key)) {
      if (v->is_number()) {
        out = {as_number(*v, child(key)), 0.0};
      } else if (v->is_array() && v->size() == 2) {
        out = {as_number((*v)[0], child(key) + "[0]"), as_number((*v)[1], child(key) + "[1]")};
      } else {
        throw ConfigError(child(key), "expected a number or [re, im]");
      }
    }
  }

  void finish() const {
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (seen_.count(it.key()) == 0) throw ConfigError(child(it.key()), "unknown key");
    }
  }

  static double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw ConfigError(where, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(where, "must be finite");
    return x;
  }

  static int as_int(const json& v, const std::string& where) {
    if (v.is_number_integer()) {
      const auto x = v.get<long long>();
      if (x < -2147483647LL || x > 2147483647LL) throw ConfigError(where, "integer out of range");
      return static_cast<int>(x);
    }
    if (v.is_number_float()) {
      const double x = v.get<double>();
      if (std::floor(x) == x && std::abs(x) < 2147483647.0) return static_cast<int>(x);
    }
    throw ConfigError(where, "expected an integer");
  }

 private:
  static std::string display(const std::string& path) { return path.empty() ? "<root>" : path; }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_grid(ObjectReader& parent, GridConfig& grid) {
  const json* node = parent.take("grid");
  if (node == nullptr) return;
  ObjectReader r(*node, parent.child("grid"));
  r.read("bounds_min", grid.bounds_min);
  r.read("bounds_max", grid.bounds_max);
  r.read("cell_size", grid.cell_size);
  r.read("c_geo", grid.c_geo);
  r.finish();
}

void read_beams(ObjectReader& parent, BeamConfig& beams) {
  const json* node = parent.take("beams");
  if (node == nullptr) return;
  ObjectReader r(*node, parent.child("beams"));
  r.read("num_beams", beams.num_beams);
  r.read("mapping", beams.mapping);
  r.finish();
}

void read_capacity(ObjectReader& parent, CapacityConfig& cap) {
  const json* node = parent.take("capacity");
  if (node == nullptr) return;
  ObjectReader r(*node, parent.child("capacity"));
  r.read("rho_db", cap.rho_db);
  r.read("k_min", cap.k_min);
  r.read("k_max", cap.k_max);
  r.read("k_step", cap.k_step);
  r.read("policies", cap.policies);
  r.read("r_min", cap.r_min);
  r.finish();
}

void read_corridors(ObjectReader& parent, CorridorConfig& cor) {
  const json* node = parent.take("corridors");
  if (node == nullptr) return;
  const std::string base = parent.child("corridors");
  ObjectReader r(*node, base);
  if (const json* layers = r.take("layers")) {
    const std::string where = r.child("layers");
    if (!layers->is_array() || layers->size() != 3) {
      throw ConfigError(where, "expected three [low, high] altitude bands");
    }
    cor.layers.clear();
    for (std::size_t i = 0; i < 3; ++i) {
      const json& band = (*layers)[i];
      const std::string bw = where + "[" + std::to_string(i) + "]";
      if (!band.is_array() || band.size() != 2) throw ConfigError(bw, "expected [low, high]");
      cor.layers.push_back({ObjectReader::as_number(band[0], bw + "[0]"),
                            ObjectReader::as_number(band[1], bw + "[1]")});
    }
  }
  r.read("bottom_role", cor.bottom_role);
  r.read("buffer_margin", cor.buffer_margin);
  r.read("rho_db", cor.rho_db);
  r.read("r_min", cor.r_min);
  if (const json* list = r.take("nofly")) {
    if (!list->is_array()) throw ConfigError(r.child("nofly"), "expected an array");
    cor.nofly.clear();
    for (std::size_t i = 0; i < list->size(); ++i) {
      ObjectReader z((*list)[i], r.child("nofly") + "[" + std::to_string(i) + "]");
      NoFlyConfig fence;
      fence.id = "nofly-" + std::to_string(i);
      z.read("id", fence.id);
      z.read("min", fence.min);
      z.read("max", fence.max);
      z.finish();
      cor.nofly.push_back(fence);
    }
  }
  if (const json* list = r.take("requests")) {
    if (!list->is_array()) throw ConfigError(r.child("requests"), "expected an array");
    cor.requests.clear();
    for (std::size_t i = 0; i < list->size(); ++i) {
      const std::string where = r.child("requests") + "[" + std::to_string(i) + "]";
      ObjectReader q((*list)[i], where);
      RequestConfig req;
      req.id = "req-" + std::to_string(i);
      req.time = static_cast<double>(i);
      q.read("id", req.id);
      q.read("time", req.time);
      q.read("action", req.action);
      q.read("origin", req.origin);
      q.read("destination", req.destination);
      q.read("r_min", req.r_min);
      q.finish();
      if (req.action != "admit" && req.action != "release") {
        throw ConfigError(where + ".action", "expected 'admit' or 'release'");
      }
      if (req.action == "admit" && !(q.has("origin") && q.has("destination"))) {
        throw ConfigError(where, "admit requests need origin and destination");
      }
      cor.requests.push_back(req);
    }
  }
  r.finish();
}

void read_control(ObjectReader& parent, ControlConfig& ctl) {
  const json* node = parent.take("control");
  if (node == nullptr) return;
  ObjectReader r(*node, parent.child("control"));
  if (const json* plant = r.take("plant")) {
    ObjectReader p(*plant, r.child("plant"));
    p.read("A", ctl.A);
    p.read("B", ctl.B);
    p.read("process_noise", ctl.process_noise);
    p.finish();
    // A dimension change without an explicit noise matrix means no noise.
    if (!p.has("process_noise") && ctl.process_noise.rows() != ctl.A.rows()) {
      ctl.process_noise = control::Matrix::Zero(ctl.A.rows(), ctl.A.rows());
    }
  }
  if (const json* c = r.take("controller")) {
    ObjectReader g(*c, r.child("controller"));
    g.read("gain", ctl.gain);
    g.read("lyapunov", ctl.lyapunov);
    g.read("eta", ctl.eta);
    g.finish();
  }
  if (const json* l = r.take("link")) {
    ObjectReader k(*l, r.child("link"));
    k.read("steepness", ctl.steepness);
    k.read("gamma_th_db", ctl.gamma_th_db);
    k.finish();
  }
  if (const json* s = r.take("sensing")) {
    ObjectReader k(*s, r.child("sensing"));
    k.read("noise_var", ctl.sensing.noise_var);
    k.read("snapshots", ctl.sensing.snapshots);
    k.read("rx_antennas", ctl.sensing.rx_antennas);
    k.read("channel_gain", ctl.sensing.channel_gain);
    k.read("slant_range", ctl.sensing.slant_range);
    k.read("velocity_factor", ctl.sensing.velocity_factor);
    k.read("control_period", ctl.sensing.control_period);
    k.read("position_dims", ctl.sensing.position_dims);
    k.finish();
  }
  r.read("sensing_beam_gain", ctl.sensing_beam_gain);
  r.read("bandwidth", ctl.bandwidth);
  r.read("sinr_db", ctl.sinr_db);
  r.read("sinr_relative_to_critical", ctl.sinr_relative_to_critical);
  r.read("horizon", ctl.horizon);
  r.read("initial_state", ctl.initial_state);
  r.read("divergence_ceiling", ctl.divergence_ceiling);
  if (const json* p1 = r.take("p1")) {
    ObjectReader k(*p1, r.child("p1"));
    k.read("enabled", ctl.p1.enabled);
    k.read("theta", ctl.p1.theta);
    k.read("num_elements", ctl.p1.num_elements);
    k.read("spacing", ctl.p1.spacing);
    k.read("noise_var", ctl.p1.noise_var);
    k.read("channel_gain", ctl.p1.channel_gain);
    k.read("kappa_points", ctl.p1.kappa_points);
    k.read("power_cap", ctl.p1.power_cap);
    k.finish();
  }
  r.finish();
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i + 1 < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

// Rethrows module validation failures with the config section they came from.
template <typename Fn>
void check_section(const std::string& where, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const ValidationError& e) {
    throw ConfigError(where, e.what());
  }
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json matrix_json(const control::Matrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(row);
  }
  return rows;
}

json complex_json(std::complex<double> z) { return json::array({z.real(), z.imag()}); }

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col),
                      "parse error");
  }
  ScenarioConfig cfg;
  ObjectReader r(root, "");
  const json* seed = r.take("seed");
  if (seed == nullptr) throw ConfigError("seed", "required (no wall-clock seeding)");
  if (!seed->is_number_unsigned() && !(seed->is_number_integer() && seed->get<long long>() >= 0)) {
    throw ConfigError("seed", "expected a non-negative integer");
  }
  cfg.seed = seed->get<std::uint64_t>();
  r.read("replicates", cfg.replicates);
  r.read("output_dir", cfg.output_dir);
  read_grid(r, cfg.grid);
  read_beams(r, cfg.beams);
  read_capacity(r, cfg.capacity);
  read_corridors(r, cfg.corridors);
  read_control(r, cfg.control);
  r.finish();
  validate_config(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path.string());
}

void validate_config(const ScenarioConfig& cfg) {
  if (cfg.replicates < 1) throw ConfigError("replicates", "must be >= 1");
  if (cfg.output_dir.empty()) throw ConfigError("output_dir", "must not be empty");

  airspace::GridSpec grid;
  check_section("grid", [&] {
    grid = airspace::discretize(Box(cfg.grid.bounds_min, cfg.grid.bounds_max),
                                cfg.grid.cell_size);
  });
  if (cfg.grid.c_geo < 0) throw ConfigError("grid.c_geo", "must be non-negative");

  if (cfg.beams.num_beams < 1) throw ConfigError("beams.num_beams", "must be >= 1");
  if (cfg.beams.mapping != "round_robin" && cfg.beams.mapping != "by_column") {
    throw ConfigError("beams.mapping", "expected 'round_robin' or 'by_column'");
  }

  const auto& cap = cfg.capacity;
  if (cap.rho_db.empty()) throw ConfigError("capacity.rho_db", "must not be empty");
  if (cap.k_min < 1) throw ConfigError("capacity.k_min", "must be >= 1");
  if (cap.k_max < cap.k_min) throw ConfigError("capacity.k_max", "must be >= k_min");
  if (cap.k_step < 1) throw ConfigError("capacity.k_step", "must be >= 1");
  if (cap.policies.empty()) throw ConfigError("capacity.policies", "must not be empty");
  for (std::size_t i = 0; i < cap.policies.size(); ++i) {
    check_section("capacity.policies[" + std::to_string(i) + "]",
                  [&] { channel::parse_policy(cap.policies[i]); });
  }
  if (!(cap.r_min > 0.0)) throw ConfigError("capacity.r_min", "must be positive");

  const auto& cor = cfg.corridors;
  if (!(cor.r_min > 0.0)) throw ConfigError("corridors.r_min", "must be positive");
  std::set<std::string> ids;
  for (std::size_t i = 0; i < cor.requests.size(); ++i) {
    const auto& req = cor.requests[i];
    const std::string where = "corridors.requests[" + std::to_string(i) + "]";
    if (!(req.r_min > 0.0)) throw ConfigError(where + ".r_min", "must be positive");
    if (req.action == "admit") {
      if (!grid.bounds().contains(req.origin)) throw ConfigError(where + ".origin", "outside the grid");
      if (!grid.bounds().contains(req.destination)) {
        throw ConfigError(where + ".destination", "outside the grid");
      }
    }
  }
  check_section("corridors", [&] {
    corridor::parse_layer_role(cor.bottom_role);
    std::vector<corridor::Geofence> fences;
    for (const auto& z : cor.nofly) {
      if (!ids.insert(z.id).second) throw ValidationError("duplicate no-fly id '" + z.id + "'");
      fences.push_back({z.id, Box(z.min, z.max), corridor::GeofenceKind::NoFly});
    }
    std::array<corridor::AltitudeBand, 3> bands{};
    if (cor.layers.empty()) {
      const double lo = grid.bounds_min.z();
      const double step = (grid.bounds_max.z() - lo) / 3.0;
      bands = {{{lo, lo + step}, {lo + step, lo + 2 * step}, {lo + 2 * step, grid.bounds_max.z()}}};
    } else {
      for (int i = 0; i < 3; ++i) bands[static_cast<std::size_t>(i)] = cor.layers[static_cast<std::size_t>(i)];
    }
    corridor::PlanOptions opts;
    opts.bottom_role = corridor::parse_layer_role(cor.bottom_role);
    opts.buffer_margin = cor.buffer_margin;
    corridor::build_layered_plan(grid, bands, fences, opts);
  });

  const auto& ctl = cfg.control;
  control::PlantModel plant{ctl.A, ctl.B, ctl.process_noise};
  check_section("control.plant", [&] { plant.validate(); });
  control::ControllerGain gains{ctl.gain, ctl.lyapunov, ctl.eta};
  check_section("control.controller", [&] { gains.validate(plant); });
  check_section("control.link", [&] {
    control::LinkReliability{ctl.steepness, channel::db_to_linear(ctl.gamma_th_db)}.validate();
  });
  check_section("control.sensing", [&] { ctl.sensing.validate(); });
  if (!(ctl.sensing_beam_gain >= 0.0)) {
    throw ConfigError("control.sensing_beam_gain", "must be non-negative");
  }
  if (!(ctl.bandwidth > 0.0)) throw ConfigError("control.bandwidth", "must be positive");
  if (ctl.sinr_db.empty()) throw ConfigError("control.sinr_db", "must not be empty");
  if (ctl.horizon < 1) throw ConfigError("control.horizon", "must be >= 1");
  if (ctl.initial_state.size() != 0 && ctl.initial_state.size() != ctl.A.rows()) {
    throw ConfigError("control.initial_state", "dimension must match A");
  }
  if (!(ctl.divergence_ceiling > 0.0)) {
    throw ConfigError("control.divergence_ceiling", "must be positive");
  }
  if (ctl.sinr_relative_to_critical &&
      control::critical_sinr(control::topological_entropy(ctl.A), ctl.bandwidth) <= 0.0) {
    throw ConfigError("control.sinr_relative_to_critical",
                      "plant has no unstable modes, so the critical SINR is zero");
  }
  check_section("control.p1", [&] {
    beamforming::ArrayGeometry array{ctl.p1.num_elements, ctl.p1.spacing};
    array.validate();
    if (ctl.p1.enabled && array.num_elements < 2) {
      throw ValidationError("num_elements must be >= 2 for sensing");
    }
    if (!(std::abs(ctl.p1.theta) < 1.5707963267948966)) {
      throw ValidationError("theta must satisfy |theta| < pi/2");
    }
    if (!(ctl.p1.noise_var > 0.0)) throw ValidationError("noise_var must be positive");
    if (!(std::abs(ctl.p1.channel_gain) > 0.0)) throw ValidationError("channel_gain must be non-zero");
    if (ctl.p1.kappa_points < 1) throw ValidationError("kappa_points must be >= 1");
    if (!(ctl.p1.power_cap > 0.0)) throw ValidationError("power_cap must be positive");
  });
}

std::string canonical_config(const ScenarioConfig& cfg) {
  json j;
  j["seed"] = cfg.seed;
  j["replicates"] = cfg.replicates;
  j["grid"] = {{"bounds_min", vec_json(cfg.grid.bounds_min)},
               {"bounds_max", vec_json(cfg.grid.bounds_max)},
               {"cell_size", vec_json(cfg.grid.cell_size)},
               {"c_geo", cfg.grid.c_geo}};
  j["beams"] = {{"num_beams", cfg.beams.num_beams}, {"mapping", cfg.beams.mapping}};
  j["capacity"] = {{"rho_db", cfg.capacity.rho_db},   {"k_min", cfg.capacity.k_min},
                   {"k_max", cfg.capacity.k_max},     {"k_step", cfg.capacity.k_step},
                   {"policies", cfg.capacity.policies}, {"r_min", cfg.capacity.r_min}};
  json layers = json::array();
  for (const auto& b : cfg.corridors.layers) layers.push_back({b.low, b.high});
  json nofly = json::array();
  for (const auto& z : cfg.corridors.nofly) {
    nofly.push_back({{"id", z.id}, {"min", vec_json(z.min)}, {"max", vec_json(z.max)}});
  }
  json requests = json::array();
  for (const auto& q : cfg.corridors.requests) {
    requests.push_back({{"id", q.id},
                        {"time", q.time},
                        {"action", q.action},
                        {"origin", vec_json(q.origin)},
                        {"destination", vec_json(q.destination)},
                        {"r_min", q.r_min}});
  }
  j["corridors"] = {{"layers", layers},         {"bottom_role", cfg.corridors.bottom_role},
                    {"buffer_margin", cfg.corridors.buffer_margin},
                    {"nofly", nofly},           {"rho_db", cfg.corridors.rho_db},
                    {"r_min", cfg.corridors.r_min}, {"requests", requests}};
  const auto& ctl = cfg.control;
  std::vector<double> q0(ctl.initial_state.data(), ctl.initial_state.data() + ctl.initial_state.size());
  j["control"] = {
      {"plant", {{"A", matrix_json(ctl.A)}, {"B", matrix_json(ctl.B)},
                 {"process_noise", matrix_json(ctl.process_noise)}}},
      {"controller", {{"gain", matrix_json(ctl.gain)}, {"lyapunov", matrix_json(ctl.lyapunov)},
                      {"eta", ctl.eta}}},
      {"link", {{"steepness", ctl.steepness}, {"gamma_th_db", ctl.gamma_th_db}}},
      {"sensing", {{"noise_var", ctl.sensing.noise_var},
                   {"snapshots", ctl.sensing.snapshots},
                   {"rx_antennas", ctl.sensing.rx_antennas},
                   {"channel_gain", complex_json(ctl.sensing.channel_gain)},
                   {"slant_range", ctl.sensing.slant_range},
                   {"velocity_factor", ctl.sensing.velocity_factor},
                   {"control_period", ctl.sensing.control_period},
                   {"position_dims", ctl.sensing.position_dims}}},
      {"sensing_beam_gain", ctl.sensing_beam_gain},
      {"bandwidth", ctl.bandwidth},
      {"sinr_db", ctl.sinr_db},
      {"sinr_relative_to_critical", ctl.sinr_relative_to_critical},
      {"horizon", ctl.horizon},
      {"initial_state", q0},
      {"divergence_ceiling", ctl.divergence_ceiling},
      {"p1", {{"enabled", ctl.p1.enabled}, {"theta", ctl.p1.theta},
              {"num_elements", ctl.p1.num_elements}, {"spacing", ctl.p1.spacing},
              {"noise_var", ctl.p1.noise_var}, {"channel_gain", complex_json(ctl.p1.channel_gain)},
              {"kappa_points", ctl.p1.kappa_points}, {"power_cap", ctl.p1.power_cap}}}};
  return j.dump();
}

std::string config_hash(const ScenarioConfig& config) {
  const std::string text = canonical_config(config);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace lawnsim::harness
