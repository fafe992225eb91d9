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

#include "epp/battery.hpp"

#include <cmath>
#include <numeric>

#include "epp/quantum.hpp"

namespace epp {

BatteryProblem::BatteryProblem(int d, int n, double gamma, ComplexOperator phi,
                               EnergyStructure joint)
    : d_(d), n_(n), gamma_(gamma), phi_(std::move(phi)) {
  if (d < 2 || n < 1) throw Error("BatteryProblem: need d ≥ 2 and n ≥ 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw Error("BatteryProblem: gamma must lie in (0, 1]");
  }
  if (!phi_.is_hermitian(1e-10) ||
      std::abs(phi_.trace().real() - 1.0) > 1e-9) {
    throw Error("BatteryProblem: φ must be a density operator");
  }
  if (min_eigenvalue(hermitian_part(phi_)) <= kDefaultRankTol) {
    throw Error("BatteryProblem: battery state φ must have full rank");
  }
  phi_ = ComplexOperator(hermitian_part(phi_).matrix(),
                         SubsystemSpace({static_cast<int>(phi_.dim())}));
  const auto space = system_space();
  if (joint.dim() != space.total()) {
    throw DimensionError("BatteryProblem: joint Hamiltonian has dimension " +
                         std::to_string(joint.dim()) + ", expected " +
                         std::to_string(space.total()));
  }
  joint_ = joint.space() == space
               ? std::move(joint)
               : spectral_decompose(
                     ComplexOperator(joint.hamiltonian().matrix(), space),
                     joint.cluster_tol());
}

SubsystemSpace BatteryProblem::system_space() const {
  return SubsystemSpace({battery_dim()}).concat(SubsystemSpace::uniform(d_, n_));
}

SubsystemSpace BatteryProblem::choi_space() const {
  const auto s = system_space();
  return s.concat(s);
}

ComplexOperator additive_hamiltonian(const ComplexOperator& h_battery,
                                     const ComplexOperator& h_system) {
  return kron(h_battery, ComplexOperator::identity(h_system.space())) +
         kron(ComplexOperator::identity(h_battery.space()), h_system);
}

ComplexOperator thermal_state(const ComplexOperator& h, double beta) {
  const auto eig = eigh(h);
  const double e0 = eig.values.minCoeff();
  RealVector w = (-beta * (eig.values.array() - e0)).exp();
  w /= w.sum();
  return {eig.vectors * w.asDiagonal() * eig.vectors.adjoint(), h.space()};
}

ComplexOperator build_battery_A(const BatteryProblem& p) {
  const int n = p.n();
  const int dr = p.battery_dim();
  auto core = purified_slot_operator(p.d(), n, p.gamma());
  auto widened = kron(core, ComplexOperator::identity(SubsystemSpace({dr})));
  std::vector<int> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  perm.push_back(n + 1);
  perm.push_back(n);
  widened = permute_subsystems(widened, perm);
  std::vector<ComplexOperator> factors{p.phi().transpose(), widened};
  if (n > 1) {
    factors.push_back(
        ComplexOperator::identity(SubsystemSpace::uniform(p.d(), n - 1)));
  }
  auto a = kron(factors);
  return {a.matrix(), p.choi_space()};
}

ComplexOperator build_battery_C(const BatteryProblem& p) {
  const auto rho = noisy_symmetric_input(p.d(), p.n(), p.gamma());
  const auto input = kron(p.phi(), rho);
  const auto lifted =
      kron(input.transpose(), ComplexOperator::identity(p.system_space()));
  const Matrix& pi = p.energy().pi().matrix();
  return {pi * lifted.matrix() * pi, p.choi_space()};
}

StructuralOperators battery_structural(const BatteryProblem& p,
                                       const Tolerances& tol) {
  return assemble_structural(build_battery_A(p), build_battery_C(p),
                             ComplexOperator(p.energy().pi().matrix(), p.choi_space()),
                             p.system_space(), p.n() + 1,
                             baseline_fidelity(p.gamma(), p.d()),
                             p.gamma() < 1.0, tol);
}

BatteryResult solve_battery(const BatteryProblem& p, const Tolerances& tol,
                            const SdpOptions& options) {
  const auto s = battery_structural(p, tol);
  BatteryResult r;
  r.F_max = s.F_max;
  r.sdp = solve_max_success(s, options);
  r.p_max = r.sdp.p_max;
  return r;
}

}  // namespace epp
