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

#include "oracles.hpp"
#include "p1_instance.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

namespace lawnsim::beamforming {
namespace {

using control::Matrix;
using control::Vector;

constexpr double kPi = oracle::kPi;

using testing_support::to_problem;

// Drift constraint slack for any beam: A - BG = A with G = 0 and |A| small.
oracle::ScalarP1 slack_instance() {
  oracle::ScalarP1 s;
  s.a = 0.5;
  s.g = 0.0;
  s.eta = 0.5;
  s.qn = 0.0;
  return s;
}

TEST(Steering, Examples) {
  const CVector broadside = steering_vector(0.0, {4, 0.5});
  for (int i = 0; i < 4; ++i) EXPECT_EQ(broadside[i], Complex(1.0, 0.0));
  const CVector a = steering_vector(kPi / 6, {2, 0.5});
  EXPECT_NEAR(std::abs(a[0] - Complex(1, 0)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(a[1] - Complex(0, 1)), 0.0, 1e-15);
  EXPECT_THROW(steering_vector(kPi / 2, {4, 0.5}), ValidationError);
  EXPECT_THROW(steering_vector(0.1, {0, 0.5}), ValidationError);
}

TEST(Steering, MatchesOracleAndHasUnitModulus) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-1.5, 1.5);
  for (int i = 0; i < 100; ++i) {
    const double theta = angle(rng);
    const CVector a = steering_vector(theta, {8, 0.37});
    ASSERT_LT((a - oracle::steering(theta, 8, 0.37)).norm(), 1e-12);
    for (int n = 0; n < 8; ++n) ASSERT_NEAR(std::abs(a[n]), 1.0, 1e-14);
  }
}

TEST(SteeringDerivative, BroadsideExample) {
  const CVector d = steering_derivative(0.0, {2, 0.5});
  EXPECT_NEAR(std::abs(d[0]), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(d[1] - Complex(0, kPi)), 0.0, 1e-14);
}

TEST(SteeringDerivative, MatchesFiniteDifference) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> angle(-1.4, 1.4);
  for (int i = 0; i < 100; ++i) {
    const double theta = angle(rng);
    const CVector exact = steering_derivative(theta, {6, 0.5});
    const auto fd = oracle::steering_fd(theta, 6, 0.5, 1e-5);
    ASSERT_LT((exact - fd).norm() / exact.norm(), 1e-6) << theta;
  }
}

TEST(LinkSinr, Examples) {
  const ArrayGeometry arr{4, 0.5};
  const CVector a = steering_vector(0.3, arr);
  EXPECT_NEAR(link_sinr(a, 0.3, {1, 0}, 1.0, arr), 16.0, 1e-12);
  EXPECT_NEAR(link_sinr(a / 2.0, 0.3, {0, 2}, 4.0, arr), 4.0, 1e-12);
  EXPECT_THROW(link_sinr(a, 0.3, {1, 0}, 0.0, arr), ValidationError);
  EXPECT_THROW(link_sinr(CVector::Ones(3), 0.3, {1, 0}, 1.0, arr), ValidationError);
}

TEST(LinkSinr, PhaseInvariantAndNullable) {
  const ArrayGeometry arr{4, 0.5};
  const CVector w = CVector::Random(4);
  const double base = link_sinr(w, 0.2, {1, 0}, 1.0, arr);
  EXPECT_NEAR(link_sinr(w * std::polar(1.0, 1.1), 0.2, {1, 0}, 1.0, arr), base, 1e-12 * base);
  const CVector a = steering_vector(0.2, arr);
  const CVector null = w - a * (a.dot(w) / a.squaredNorm());
  EXPECT_NEAR(link_sinr(null, 0.2, {1, 0}, 1.0, arr), 0.0, 1e-24);
}

TEST(SensingGain, BroadsideExample) {
  const ArrayGeometry arr{2, 0.5};
  CVector w(2);
  w << 0, 1;
  EXPECT_NEAR(sensing_gain(w, 0.0, arr), kPi * kPi, 1e-12);
}

TEST(SolveP1, SingleElementArrayIsRejected) {
  oracle::ScalarP1 s;
  s.elements = 1;
  EXPECT_THROW(solve_p1(to_problem(s)), ValidationError);
}

TEST(SensingGain, BoundedByCauchySchwarz) {
  const ArrayGeometry arr{6, 0.5};
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const CVector w = CVector::Random(6);
    const double theta = -1.0 + 0.02 * i;
    const double bound = steering_derivative(theta, arr).squaredNorm() * w.squaredNorm();
    ASSERT_LE(sensing_gain(w, theta, arr), bound * (1 + 1e-12));
  }
}

TEST(CrbScaling, InverseQuadraticInBeamAmplitude) {
  const ArrayGeometry arr{4, 0.5};
  control::SensingSpec spec;
  const CVector w = beam_family(0.4, 1.0, 0.25, arr);
  const double base = control::crb_angle(sensing_gain(w, 0.25, arr), spec);
  for (double c : {0.1, 0.5, 3.0, 17.0}) {
    const double got = control::crb_angle(sensing_gain(c * w, 0.25, arr), spec);
    ASSERT_NEAR(got * c * c / base, 1.0, 1e-12) << c;
  }
}

TEST(BeamFamily, EndpointsAreOrthonormalDirections) {
  const ArrayGeometry arr{5, 0.5};
  const CVector a_hat = beam_family(0.0, 1.0, 0.4, arr);
  const CVector d_hat = beam_family(1.0, 1.0, 0.4, arr);
  EXPECT_NEAR(a_hat.norm(), 1.0, 1e-14);
  EXPECT_NEAR(d_hat.norm(), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(a_hat.dot(d_hat)), 0.0, 1e-14);
  EXPECT_LT((beam_family(0.3, 2.0, 0.4, arr) - oracle::family_beam([] {
               oracle::ScalarP1 s;
               s.elements = 5;
               s.theta = 0.4;
               return s;
             }(), 0.3, 2.0)).norm(),
            1e-12);
}

TEST(Feasibility, ZeroBeamViolatesAndIsBlind) {
  const P1Problem p = to_problem(oracle::ScalarP1{});
  const auto r = feasibility(CVector::Zero(4), p);
  EXPECT_TRUE(r.sensing_blind);
  EXPECT_FALSE(r.sinr_satisfied);
  EXPECT_FALSE(r.drift_satisfied);
  EXPECT_FALSE(r.satisfied());
}

TEST(SolveP1, KappaZeroClosedFormWhenDriftSlack) {
  auto s = slack_instance();
  for (double gamma : {0.25, 1.0, 7.0}) {
    s.gamma_critical = gamma;
    const auto sol = solve_p1(to_problem(s));
    ASSERT_TRUE(sol.feasible);
    const double expected = gamma * s.noise_var / (std::norm(s.beta) * s.elements);
    EXPECT_NEAR(sol.power, expected, 1e-12 * expected);
    EXPECT_EQ(sol.kappa, 0.0);
    EXPECT_EQ(sol.binding, Binding::Sinr);
    EXPECT_TRUE(sol.report.satisfied());
  }
}

TEST(SolveP1, ZeroThresholdOnStablePlantNeedsNoPower) {
  auto s = slack_instance();
  s.gamma_critical = 0.0;
  const auto sol = solve_p1(to_problem(s));
  ASSERT_TRUE(sol.feasible);
  EXPECT_LT(sol.power, 1e-9);
}

TEST(SolveP1, PowerIsMonotoneInThreshold) {
  oracle::ScalarP1 s;
  double prev = 0.0;
  for (double gamma = 0.0; gamma <= 6.0; gamma += 0.5) {
    s.gamma_critical = gamma;
    const auto sol = solve_p1(to_problem(s));
    ASSERT_TRUE(sol.feasible) << gamma;
    EXPECT_GE(sol.power, prev * (1.0 - 1e-5)) << gamma;
    prev = sol.power;
  }
}

TEST(SolveP1, OptimumSatisfiesBothConstraints) {
  oracle::ScalarP1 s;
  const auto p = to_problem(s);
  const auto sol = solve_p1(p);
  ASSERT_TRUE(sol.feasible);
  const auto r = feasibility(sol.w_star, p);
  EXPECT_TRUE(r.satisfied());
  EXPECT_TRUE(oracle::p1_feasible(s, sol.w_star));
  EXPECT_NEAR(sol.w_star.squaredNorm(), sol.power, 1e-9 * sol.power);
  // Shaving 1% off the amplitude breaks a constraint.
  EXPECT_FALSE(feasibility(0.99 * sol.w_star, p).satisfied());
}

TEST(SolveP1, EntropyAndPowerCapInfeasibility) {
  oracle::ScalarP1 s;
  s.gamma_critical = std::numeric_limits<double>::infinity();
  const auto entropy = solve_p1(to_problem(s));
  EXPECT_FALSE(entropy.feasible);
  EXPECT_EQ(entropy.infeasible_reason, "entropy");

  s.gamma_critical = 1.0;
  SolverOptions tight;
  tight.power_cap = 1e-3;
  const auto capped = solve_p1(to_problem(s), tight);
  EXPECT_FALSE(capped.feasible);
  EXPECT_EQ(capped.infeasible_reason, "power-cap");

  // Unstabilizable under this gain: |A - BG| exceeds sqrt(eta).
  s.g = 0.1;
  const auto hopeless = solve_p1(to_problem(s));
  EXPECT_FALSE(hopeless.feasible);
}

TEST(SolveP1, MatchesGridSearchOnRandomScalarPlants) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    oracle::ScalarP1 s;
    s.a = 1.1 + 0.7 * u(rng);
    s.g = s.a + (u(rng) - 0.5);
    s.eta = 0.6 + 0.3 * u(rng);
    s.steepness = 1.0 + 4.0 * u(rng);
    s.gamma_th = 0.5 + 1.5 * u(rng);
    s.gamma_critical = s.a - 1.0;
    s.theta = -0.8 + 1.6 * u(rng);
    SolverOptions opts;
    opts.kappa_points = 101;
    const auto sol = solve_p1(to_problem(s), opts);
    const double grid = oracle::p1_grid_min_power(s, 101, 1001, 0.1, 10.0);
    ASSERT_TRUE(std::isfinite(grid)) << trial;
    ASSERT_TRUE(sol.feasible) << trial;
    EXPECT_LE(sol.power, grid * (1.0 + 1e-6)) << trial;
    EXPECT_GE(sol.power, grid / 1.01) << trial;
  }
}

TEST(SolveP1, NoRandomBeamBeatsMatchedFilterWhenDriftSlack) {
  auto s = slack_instance();
  s.elements = 8;
  s.gamma_critical = 2.0;
  const auto p = to_problem(s);
  const auto sol = solve_p1(p);
  ASSERT_TRUE(sol.feasible);
  std::mt19937_64 rng(99);
  for (int i = 0; i < 2000; ++i) {
    CVector w = CVector::Random(8);
    // Scale to exactly meet the SINR floor, then compare power.
    const double sinr = link_sinr(w, s.theta, s.beta, s.noise_var, p.array);
    w *= std::sqrt(s.gamma_critical / sinr);
    ASSERT_GE(w.squaredNorm(), sol.power * (1.0 - 1e-9));
  }
}

TEST(SolveP1, RejectsBadInput) {
  oracle::ScalarP1 s;
  s.gamma_critical = -1.0;
  EXPECT_THROW(solve_p1(to_problem(s)), ValidationError);
  s.gamma_critical = 1.0;
  auto p = to_problem(s);
  p.q_current = Vector::Ones(2);
  EXPECT_THROW(solve_p1(p), ValidationError);
  SolverOptions bad;
  bad.kappa_points = 0;
  EXPECT_THROW(solve_p1(to_problem(s), bad), ValidationError);
}

TEST(SolverCsv, OneRowPerKappa) {
  SolverOptions opts;
  opts.kappa_points = 11;
  const auto sol = solve_p1(to_problem(oracle::ScalarP1{}), opts);
  const auto path = std::filesystem::temp_directory_path() / "lawnsim_p1.csv";
  write_solver_csv(path, sol);
  const auto rows = read_csv(path);
  ASSERT_EQ(rows.size(), 12u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"kappa", "power", "sinr_margin", "drift_margin",
                                               "binding"}));
  EXPECT_EQ(rows[11][0], "1");
  EXPECT_EQ(rows[11][4], "infeasible");  // pure sensing beam carries no link
  std::filesystem::remove(path);
}

}  // namespace
}  // namespace lawnsim::beamforming
