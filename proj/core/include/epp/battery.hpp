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

#pragma once

#include "epp/energy.hpp"
#include "epp/purification.hpp"
#include "epp/sdp.hpp"

namespace epp {

/// Purification assisted by a battery R in a fixed full-rank state φ. The
/// protocol acts energy-preservingly on R ⊗ S^{⊗n} under the joint Hamiltonian
/// and the battery is discarded afterwards.
class BatteryProblem {
 public:
  /// `joint` lives on [d_r, d, …, d] (n copies); φ is a d_r × d_r state.
  BatteryProblem(int d, int n, double gamma, ComplexOperator phi,
                 EnergyStructure joint);

  int d() const { return d_; }
  int n() const { return n_; }
  int battery_dim() const { return static_cast<int>(phi_.dim()); }
  double gamma() const { return gamma_; }
  const ComplexOperator& phi() const { return phi_; }
  const EnergyStructure& energy() const { return joint_; }
  /// [r, s_1 … s_n].
  SubsystemSpace system_space() const;
  /// [r_in, s_in…, r_out, s_out…].
  SubsystemSpace choi_space() const;

 private:
  int d_;
  int n_;
  double gamma_;
  ComplexOperator phi_;
  EnergyStructure joint_;
};

/// H_R ⊗ I + I ⊗ H_S on [r, system…].
ComplexOperator additive_hamiltonian(const ComplexOperator& h_battery,
                                     const ComplexOperator& h_system);

/// e^{−βH}/Z.
ComplexOperator thermal_state(const ComplexOperator& h, double beta);

ComplexOperator build_battery_A(const BatteryProblem& p);
ComplexOperator build_battery_C(const BatteryProblem& p);

StructuralOperators battery_structural(const BatteryProblem& p,
                                       const Tolerances& tol = {});

struct BatteryResult {
  double F_max = 0.0;
  double p_max = 0.0;
  SdpSolution sdp;
};

BatteryResult solve_battery(const BatteryProblem& p, const Tolerances& tol = {},
                            const SdpOptions& options = {});

}  // namespace epp
