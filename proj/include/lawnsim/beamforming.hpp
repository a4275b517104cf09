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

#include "lawnsim/sensing_control.hpp"

#include <Eigen/Dense>

#include <complex>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace lawnsim::beamforming {

using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

/// Uniform linear array; spacing in wavelengths.
struct ArrayGeometry {
  int num_elements = 4;
  double spacing = 0.5;

  void validate() const;
};

/// a_n = exp(j 2 pi spacing n sin(theta)), n = 0..N-1. |theta| < pi/2.
CVector steering_vector(double theta, const ArrayGeometry& array);

/// d a / d theta.
CVector steering_derivative(double theta, const ArrayGeometry& array);

/// |beta|^2 |a(theta)^H w|^2 / noise_var. Interference-free control link.
double link_sinr(const CVector& w, double theta, Complex beta, double noise_var,
                 const ArrayGeometry& array);

/// |a_dot(theta)^H w|^2, the beam-dependent factor of the angle CRB.
double sensing_gain(const CVector& w, double theta, const ArrayGeometry& array);

/// Survival-constrained power minimization for one decision instant.
struct P1Problem {
  double theta = 0.0;
  ArrayGeometry array;
  control::PlantModel plant;
  control::ControllerGain gains;
  control::LinkReliability link;
  control::SensingSpec sensing;
  double gamma_critical = 0.0;
  control::Vector q_current;
  double noise_var = 1.0;
  /// Communication channel gain seen by link_sinr.
  Complex beta{1.0, 0.0};

  void validate() const;
};

struct SolverOptions {
  int kappa_points = 101;
  double rel_tol = 1e-6;
  double power_cap = 1e6;
  /// Geometric probes between the SINR-only minimum and the cap used to
  /// bracket the drift constraint before bisection.
  int bracket_points = 400;
};

enum class Binding { None, Sinr, Drift, Both, Infeasible };
std::string_view to_string(Binding binding);

struct ConstraintReport {
  double sinr = 0.0;
  double sinr_margin = 0.0;  ///< SINR - gamma_critical
  bool sinr_satisfied = false;
  double drift_expected = 0.0;
  double drift_margin = 0.0;  ///< eta V(q) - E[V(q')]
  bool drift_satisfied = false;
  bool sensing_blind = false;

  bool satisfied() const { return sinr_satisfied && drift_satisfied; }
};

/// Both P1 constraints for a given beam. The drift uses p from link_sinr and
/// Sigma from the CRB of sensing_gain(w); a sensing-blind beam counts as an
/// outage (p = 0). Satisfied means margin >= -1e-9 (scaled by the constraint
/// magnitude).
ConstraintReport feasibility(const CVector& w, const P1Problem& problem);

/// w(kappa, c) = c [(1 - kappa) a_hat + kappa d_hat], where d_hat is the
/// component of a_dot orthogonal to a, normalized.
CVector beam_family(double kappa, double c, double theta, const ArrayGeometry& array);

struct KappaResult {
  double kappa = 0.0;
  bool feasible = false;
  double c = 0.0;
  double power = 0.0;
  double sinr_margin = 0.0;
  double drift_margin = 0.0;
  Binding binding = Binding::Infeasible;
};

struct P1Solution {
  bool feasible = false;
  std::string infeasible_reason;  ///< "power-cap" | "entropy"
  CVector w_star;
  double kappa = 0.0;
  double c = 0.0;
  double power = 0.0;
  Binding binding = Binding::Infeasible;
  ConstraintReport report;
  std::vector<KappaResult> scan;
};

/// Grid over kappa; for each kappa the smallest feasible c is found by
/// bracketing from the SINR-only minimum and bisecting to rel_tol. Ties in
/// power go to the smaller kappa.
P1Solution solve_p1(const P1Problem& problem, const SolverOptions& options = {});

void write_solver_csv(const std::filesystem::path& path, const P1Solution& solution);

}  // namespace lawnsim::beamforming
