// Copyright 2026 The epp Authors
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

#include <gtest/gtest.h>

#include <cmath>

#include "epp/battery.hpp"
#include "epp/energy.hpp"
#include "epp/purification.hpp"
#include "epp/quantum.hpp"
#include "epp/sdp.hpp"
#include "oracles.hpp"

namespace epp {
namespace {

namespace oracle = testing_oracle;

ComplexOperator diag01() {
  Matrix h = Matrix::Zero(2, 2);
  h(1, 1) = 1.0;
  return ComplexOperator(h);
}

ComplexOperator mixed(int d) {
  return ComplexOperator::identity(SubsystemSpace{d}) * Complex(1.0 / d);
}

BatteryProblem ising_battery(int n, double gamma, const ComplexOperator& phi,
                             const ComplexOperator& h_r) {
  const auto h = additive_hamiltonian(h_r, ising_all_to_all(n, -0.5, -0.3));
  return BatteryProblem(2, n, gamma, phi, spectral_decompose(h));
}

TEST(Battery, AdditiveHamiltonianByHand) {
  const auto h = additive_hamiltonian(diag01(), diag01());
  Matrix expect = Matrix::Zero(4, 4);
  expect(1, 1) = expect(2, 2) = 1.0;
  expect(3, 3) = 2.0;
  EXPECT_LT((h.matrix() - expect).norm(), 1e-15);
  EXPECT_EQ(h.space().dims(), (std::vector<int>{2, 2}));
}

TEST(Battery, ThermalStateOfQubit) {
  const auto rho = thermal_state(diag01(), 1.0);
  const double z = 1.0 + std::exp(-1.0);
  EXPECT_NEAR(rho.matrix()(0, 0).real(), 1.0 / z, 1e-14);
  EXPECT_NEAR(rho.matrix()(1, 1).real(), std::exp(-1.0) / z, 1e-14);
  EXPECT_LT(std::abs(rho.matrix()(0, 1)), 1e-15);
  EXPECT_NEAR(thermal_state(diag01(), 0.0).matrix()(1, 1).real(), 0.5, 1e-14);
}

TEST(Battery, TrivialBatteryReproducesBatterylessValues) {
  for (int n : {2, 3}) {
    for (double gamma : {0.3, 0.5, 0.9}) {
      const auto plain =
          structural_operators(PurificationProblem(2, n, gamma, ising_all_to_all(n, -0.5, -0.3)));
      const auto plain_sol = solve_max_success(plain);
      const auto one = ComplexOperator::identity(SubsystemSpace{1});
      const auto r = solve_battery(ising_battery(n, gamma, one, ComplexOperator::zero(SubsystemSpace{1})));
      EXPECT_NEAR(r.F_max, plain.F_max, 1e-10) << n << " " << gamma;
      EXPECT_NEAR(r.p_max, plain_sol.p_max, 1e-6) << n << " " << gamma;
      EXPECT_TRUE(r.sdp.certified);
    }
  }
}

TEST(Battery, DegenerateAdditiveBatteryNeverHurts) {
  for (int n : {2, 3}) {
    for (double gamma : {0.2, 0.5, 0.8, 1.0}) {
      const double f =
          structural_operators(PurificationProblem(2, n, gamma, ising_all_to_all(n, -0.5, -0.3)))
              .F_max;
      for (const auto& phi : {mixed(2), thermal_state(diag01(), 1.0)}) {
        const auto bp = ising_battery(n, gamma, phi, ComplexOperator::zero(SubsystemSpace{2}));
        const auto r = solve_battery(bp);
        EXPECT_GE(r.F_max, f - 1e-8) << n << " " << gamma;
        EXPECT_LE(r.F_max, 1.0 + 1e-9);
        EXPECT_TRUE(r.sdp.certified) << r.sdp.solver_status;
        EXPECT_LE(r.sdp.gap, 1e-6 * std::max(1.0, r.p_max));
      }
    }
  }
}

TEST(Battery, EnergeticBatteryCertified) {
  const auto bp = ising_battery(2, 0.5, thermal_state(diag01(), 0.7), diag01());
  const auto s = battery_structural(bp);
  const auto r = solve_battery(bp);
  EXPECT_TRUE(r.sdp.certified);
  EXPECT_GE(r.F_max, baseline_fidelity(0.5, 2) - 1e-9);
  const auto cert = dual_certificate_check(r.sdp, s);
  EXPECT_TRUE(cert.passed) << cert.message;
  const auto nogo = evaluate_nogo(s);
  EXPECT_TRUE(nogo.agree);
}

TEST(Battery, OperatorsMatchHaarOracle) {
  const auto phi = thermal_state(diag01(), 0.8);
  const auto bp = ising_battery(2, 0.5, phi, diag01());
  const auto a = build_battery_A(bp);
  const auto c = build_battery_C(bp);
  EXPECT_EQ(a.space().dims(), bp.choi_space().dims());
  CounterRng rng(21);
  const auto g = random_epo_choi(bp.energy(), rng);
  const auto e = oracle::haar_estimate(g.matrix(), 2, 2, 0.5, 100000, 91, phi.matrix());
  EXPECT_NEAR(trace_product(g, a).real(), e.num, 3.0 * e.num_se + 1e-12);
  EXPECT_NEAR(trace_product(g, c).real(), e.den, 3.0 * e.den_se + 1e-12);
}

TEST(Battery, NogoRoutesAgree) {
  for (double gamma : {0.25, 0.6, 1.0}) {
    const auto s = battery_structural(
        ising_battery(2, gamma, mixed(2), ComplexOperator::zero(SubsystemSpace{2})));
    const auto rep = evaluate_nogo(s);
    EXPECT_TRUE(rep.agree) << gamma;
    EXPECT_EQ(rep.operator_route, rep.scalar_route) << gamma;
  }
}

TEST(Battery, RejectsBadInputs) {
  Matrix pure = Matrix::Zero(2, 2);
  pure(0, 0) = 1.0;
  EXPECT_THROW(ising_battery(2, 0.5, ComplexOperator(pure), diag01()), Error);
  EXPECT_THROW(ising_battery(2, 1.5, mixed(2), diag01()), Error);
  // Joint Hamiltonian on the wrong space.
  EXPECT_THROW(BatteryProblem(2, 2, 0.5, mixed(2),
                              spectral_decompose(ising_all_to_all(2, -0.5, -0.3))),
               Error);
}

}  // namespace
}  // namespace epp
