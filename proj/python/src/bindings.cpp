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

#include "lawnsim/beamforming.hpp"
#include "lawnsim/channel.hpp"
#include "lawnsim/config.hpp"
#include "lawnsim/error.hpp"
#include "lawnsim/harness.hpp"
#include "lawnsim/sensing_control.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>

namespace py = pybind11;
using namespace lawnsim;

namespace {

py::dict artifacts_to_dict(const harness::RunArtifacts& art) {
  py::list checks;
  for (const auto& c : art.checks) {
    py::dict d;
    d["name"] = c.name;
    d["passed"] = c.passed;
    d["detail"] = c.detail;
    checks.append(d);
  }
  py::dict out;
  out["command"] = art.command;
  out["output_dir"] = art.output_dir.string();
  out["files"] = art.files;
  out["config_hash"] = art.config_hash;
  out["summary_json"] = art.summary_json;
  out["checks"] = checks;
  out["all_checks_passed"] = art.all_checks_passed();
  return out;
}

harness::ScenarioConfig load_with_overrides(const std::string& path, py::object seed,
                                            py::object out, py::object replicates) {
  auto cfg = harness::load_config(path);
  if (!seed.is_none()) cfg.seed = seed.cast<std::uint64_t>();
  if (!out.is_none()) cfg.output_dir = out.cast<std::string>();
  if (!replicates.is_none()) cfg.replicates = replicates.cast<int>();
  harness::validate_config(cfg);
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_lawnsim, m) {
  m.doc() = "Low-altitude wireless network simulator core";
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);

  // channel
  m.def("sinr", &channel::sinr, py::arg("mu"), py::arg("rho"));
  m.def("spectral_efficiency", &channel::spectral_efficiency, py::arg("gamma"));
  m.def("critical_capacity", &channel::critical_capacity, py::arg("num_beams"), py::arg("rho"));
  m.def(
      "classify_regime",
      [](double c_air, int num_beams, double rho) {
        return std::string(channel::to_string(channel::classify_regime(c_air, num_beams, rho)));
      },
      py::arg("c_air"), py::arg("num_beams"), py::arg("rho"));
  m.def(
      "qos_capacity_bound",
      [](int num_beams, double rho, double r_min) {
        const auto b = channel::qos_capacity_bound(num_beams, rho, r_min);
        py::dict d;
        d["value"] = b.value;
        d["raw"] = b.raw;
        d["feasible"] = b.feasible;
        d["below_single_occupancy"] = b.below_single_occupancy;
        return d;
      },
      py::arg("num_beams"), py::arg("rho"), py::arg("r_min"));
  m.def("balanced_mean_se", &channel::balanced_mean_se, py::arg("k"), py::arg("num_beams"),
        py::arg("rho"));
  m.def("db_to_linear", &channel::db_to_linear, py::arg("db"));

  // sensing and control
  m.def(
      "packet_success_prob",
      [](double sinr, double steepness, double gamma_th) {
        return control::packet_success_prob(sinr, {steepness, gamma_th});
      },
      py::arg("sinr"), py::arg("steepness"), py::arg("gamma_th"));
  m.def("topological_entropy", &control::topological_entropy, py::arg("A"));
  m.def("critical_sinr", &control::critical_sinr, py::arg("entropy_bits"), py::arg("bandwidth"));
  m.def(
      "expected_drift",
      [](const control::Vector& q, double p, const control::Matrix& sigma,
         const control::Matrix& A, const control::Matrix& B, const control::Matrix& process_noise,
         const control::Matrix& gain, const control::Matrix& lyapunov) {
        return control::expected_drift(q, p, sigma, {A, B, process_noise},
                                       {gain, lyapunov, 0.5});
      },
      py::arg("q"), py::arg("p"), py::arg("sigma"), py::arg("A"), py::arg("B"),
      py::arg("process_noise"), py::arg("gain"), py::arg("lyapunov"));

  // beamforming
  m.def(
      "steering_vector",
      [](double theta, int num_elements, double spacing) {
        return beamforming::steering_vector(theta, {num_elements, spacing});
      },
      py::arg("theta"), py::arg("num_elements"), py::arg("spacing") = 0.5);
  m.def(
      "steering_derivative",
      [](double theta, int num_elements, double spacing) {
        return beamforming::steering_derivative(theta, {num_elements, spacing});
      },
      py::arg("theta"), py::arg("num_elements"), py::arg("spacing") = 0.5);

  // scenarios
  m.def(
      "config_hash",
      [](const std::string& path) { return harness::config_hash(harness::load_config(path)); },
      py::arg("path"));
  m.def(
      "capacity_sweep",
      [](const std::string& config, py::object seed, py::object out, py::object replicates) {
        return artifacts_to_dict(
            harness::run_capacity_sweep(load_with_overrides(config, seed, out, replicates)));
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("out") = py::none(),
      py::arg("replicates") = py::none());
  m.def(
      "control_sim",
      [](const std::string& config, py::object seed, py::object out, py::object replicates) {
        return artifacts_to_dict(
            harness::run_control_experiment(load_with_overrides(config, seed, out, replicates)));
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("out") = py::none(),
      py::arg("replicates") = py::none());
  m.def(
      "corridor_demo",
      [](const std::string& config, py::object seed, py::object out, py::object replicates) {
        return artifacts_to_dict(
            harness::run_corridor_demo(load_with_overrides(config, seed, out, replicates)));
      },
      py::arg("config"), py::arg("seed") = py::none(), py::arg("out") = py::none(),
      py::arg("replicates") = py::none());
}
