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

#include "lawnsim/csv.hpp"
#include "lawnsim/error.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace lawnsim::beamforming {

namespace {

constexpr double kMarginTol = 1e-9;

void require_angle(double theta) {
  if (!std::isfinite(theta) || std::abs(theta) >= std::numbers::pi / 2.0) {
    throw ValidationError("steering angle must satisfy |theta| < pi/2");
  }
}

}  // namespace

void ArrayGeometry::validate() const {
  if (num_elements < 1) throw ValidationError("array needs at least one element");
  if (!(spacing > 0.0)) throw ValidationError("element spacing must be positive");
}

CVector steering_vector(double theta, const ArrayGeometry& array) {
  array.validate();
  require_angle(theta);
  CVector a(array.num_elements);
  const double phase = 2.0 * std::numbers::pi * array.spacing * std::sin(theta);
  for (int n = 0; n < array.num_elements; ++n) {
    a[n] = std::polar(1.0, phase * n);
  }
  return a;
}

CVector steering_derivative(double theta, const ArrayGeometry& array) {
  CVector a = steering_vector(theta, array);
  const double rate = 2.0 * std::numbers::pi * array.spacing * std::cos(theta);
  for (int n = 0; n < array.num_elements; ++n) {
    a[n] *= Complex(0.0, rate * n);
  }
  return a;
}

double link_sinr(const CVector& w, double theta, Complex beta, double noise_var,
                 const ArrayGeometry& array) {
  if (!(noise_var > 0.0)) throw ValidationError("noise variance must be positive");
  if (w.size() != array.num_elements) throw ValidationError("beam length does not match the array");
  const Complex response = steering_vector(theta, array).dot(w);  // a^H w
  return std::norm(beta) * std::norm(response) / noise_var;
}

double sensing_gain(const CVector& w, double theta, const ArrayGeometry& array) {
  if (w.size() != array.num_elements) throw ValidationError("beam length does not match the array");
  return std::norm(steering_derivative(theta, array).dot(w));
}

void P1Problem::validate() const {
  array.validate();
  if (array.num_elements < 2) {
    throw ValidationError("derivative-based sensing needs at least two elements");
  }
  require_angle(theta);
  plant.validate();
  gains.validate(plant);
  link.validate();
  sensing.validate();
  if (std::isnan(gamma_critical) || gamma_critical < 0.0) {
    throw ValidationError("gamma_critical must be non-negative");
  }
  if (q_current.size() != plant.state_dim()) {
    throw ValidationError("decision state dimension mismatch");
  }
  if (!(noise_var > 0.0)) throw ValidationError("noise variance must be positive");
  if (!(std::abs(beta) > 0.0)) throw ValidationError("channel gain must be non-zero");
}

std::string_view to_string(Binding binding) {
  switch (binding) {
    case Binding::None: return "none";
    case Binding::Sinr: return "sinr";
    case Binding::Drift: return "drift";
    case Binding::Both: return "both";
    case Binding::Infeasible: return "infeasible";
  }
  return "unknown";
}

ConstraintReport feasibility(const CVector& w, const P1Problem& problem) {
  ConstraintReport r;
  r.sinr = link_sinr(w, problem.theta, problem.beta, problem.noise_var, problem.array);
  r.sinr_margin = r.sinr - problem.gamma_critical;
  r.sinr_satisfied = r.sinr_margin >= -kMarginTol * std::max(1.0, problem.gamma_critical);

  const int d = problem.plant.state_dim();
  const double crb = control::crb_angle(sensing_gain(w, problem.theta, problem.array), problem.sensing);
  const auto cov = control::sensing_error_cov(crb, problem.sensing, d);
  r.sensing_blind = cov.unbounded;
  const double p = cov.unbounded ? 0.0 : control::packet_success_prob(r.sinr, problem.link);
  const auto cert = control::drift_certificate(problem.q_current, p, cov.sigma, problem.plant,
                                               problem.gains);
  r.drift_expected = cert.expected;
  r.drift_margin = cert.margin;
  r.drift_satisfied =
      r.drift_margin >= -kMarginTol * std::max(1.0, problem.gains.eta * cert.value);
  return r;
}

CVector beam_family(double kappa, double c, double theta, const ArrayGeometry& array) {
  const CVector a = steering_vector(theta, array);
  const CVector a_dot = steering_derivative(theta, array);
  const CVector a_hat = a / a.norm();
  CVector ortho = a_dot - a_hat * a_hat.dot(a_dot);
  const double ortho_norm = ortho.norm();
  const CVector d_hat = ortho_norm > 0.0 ? CVector(ortho / ortho_norm) : CVector::Zero(a.size());
  return c * ((1.0 - kappa) * a_hat + kappa * d_hat);
}

namespace {

KappaResult solve_for_kappa(double kappa, const P1Problem& problem, const SolverOptions& options) {
  KappaResult out;
  out.kappa = kappa;
  const double direction_power = (1.0 - kappa) * (1.0 - kappa) + kappa * kappa;
  const double c_cap = std::sqrt(options.power_cap / direction_power);
  const CVector unit = beam_family(kappa, 1.0, problem.theta, problem.array);
  auto report_at = [&](double c) { return feasibility(c * unit, problem); };

  // SINR scales with c^2, so the SINR-only minimum is closed form.
  const double unit_sinr =
      link_sinr(unit, problem.theta, problem.beta, problem.noise_var, problem.array);
  double c_sinr = 0.0;
  if (problem.gamma_critical > 0.0) {
    if (unit_sinr <= 0.0) return out;
    c_sinr = std::sqrt(problem.gamma_critical / unit_sinr);
  }
  if (c_sinr > c_cap) return out;

  auto accept = [&](double c, Binding binding) {
    const auto r = report_at(c);
    out.feasible = true;
    out.c = c;
    out.power = c * c * direction_power;
    out.sinr_margin = r.sinr_margin;
    out.drift_margin = r.drift_margin;
    out.binding = binding;
    return out;
  };

  const auto at_min = report_at(c_sinr);
  if (at_min.satisfied()) {
    if (problem.gamma_critical == 0.0 && c_sinr == 0.0) return accept(0.0, Binding::None);
    const bool drift_tight =
        at_min.drift_margin <= options.rel_tol * std::max(1.0, std::abs(at_min.drift_expected));
    return accept(c_sinr, drift_tight ? Binding::Both : Binding::Sinr);
  }

  // Drift-limited: bracket on a geometric ladder, then bisect in log c.
  double lo = c_sinr > 0.0 ? c_sinr : c_cap * 1e-12;
  if (c_sinr == 0.0 && report_at(lo).satisfied()) return accept(lo, Binding::Drift);
  const double ratio = std::pow(c_cap / lo, 1.0 / options.bracket_points);
  double hi = 0.0;
  double prev = lo;
  for (int k = 1; k <= options.bracket_points; ++k) {
    const double c = k == options.bracket_points ? c_cap : lo * std::pow(ratio, k);
    if (report_at(c).satisfied()) {
      hi = c;
      lo = prev;
      break;
    }
    prev = c;
  }
  if (hi == 0.0) return out;
  while ((hi - lo) > options.rel_tol * hi) {
    const double mid = std::sqrt(lo * hi);
    if (report_at(mid).satisfied()) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const auto final_report = report_at(hi);
  const bool sinr_tight =
      problem.gamma_critical > 0.0 &&
      final_report.sinr_margin <= options.rel_tol * 2.0 * problem.gamma_critical;
  return accept(hi, sinr_tight ? Binding::Both : Binding::Drift);
}

}  // namespace

P1Solution solve_p1(const P1Problem& problem, const SolverOptions& options) {
  problem.validate();
  if (options.kappa_points < 1) throw ValidationError("kappa grid needs at least one point");
  if (!(options.rel_tol > 0.0)) throw ValidationError("rel_tol must be positive");
  if (!(options.power_cap > 0.0)) throw ValidationError("power cap must be positive");
  if (options.bracket_points < 1) throw ValidationError("bracket_points must be >= 1");

  P1Solution sol;
  if (std::isinf(problem.gamma_critical)) {
    sol.infeasible_reason = "entropy";
    return sol;
  }
  sol.scan.reserve(static_cast<std::size_t>(options.kappa_points));
  for (int i = 0; i < options.kappa_points; ++i) {
    const double kappa =
        options.kappa_points == 1 ? 0.0 : static_cast<double>(i) / (options.kappa_points - 1);
    sol.scan.push_back(solve_for_kappa(kappa, problem, options));
  }
  const KappaResult* best = nullptr;
  for (const auto& r : sol.scan) {
    if (r.feasible && (best == nullptr || r.power < best->power)) best = &r;
  }
  if (best == nullptr) {
    sol.infeasible_reason = "power-cap";
    return sol;
  }
  sol.feasible = true;
  sol.kappa = best->kappa;
  sol.c = best->c;
  sol.power = best->power;
  sol.binding = best->binding;
  sol.w_star = beam_family(best->kappa, best->c, problem.theta, problem.array);
  sol.report = feasibility(sol.w_star, problem);
  return sol;
}

void write_solver_csv(const std::filesystem::path& path, const P1Solution& solution) {
  CsvWriter csv(path, "kappa,power,sinr_margin,drift_margin,binding");
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : solution.scan) {
    csv.field(r.kappa)
        .field(r.feasible ? r.power : std::numeric_limits<double>::infinity())
        .field(r.feasible ? r.sinr_margin : nan)
        .field(r.feasible ? r.drift_margin : nan)
        .field(to_string(r.binding));
    csv.end_row();
  }
}

}  // namespace lawnsim::beamforming
