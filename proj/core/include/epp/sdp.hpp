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

#include <string>

#include "epp/lmi.hpp"
#include "epp/purification.hpp"

namespace epp {

struct SdpOptions {
  LmiOptions lmi;
  /// Certified duality gap must be at most this times max(1, p_max).
  double certificate_gap = 1e-6;
  /// Residual budget for positivity, Tr_out ⪯ I and the subspace condition.
  double residual_tol = 1e-8;
};

struct SdpResiduals {
  double psd_min_eig = 0.0;        // λ_min(Γ*)
  double trout_violation = 0.0;    // max(0, λ_max(Tr_out Γ*) − 1)
  double subspace_residual = 0.0;  // ‖TΓ*T† − Γ*‖, T = C^{-1/2}P_m C^{1/2}
  double energy_residual = 0.0;    // ‖Γ* − ΠΓ*Π‖
};

/// Optimal fidelity-maximizing protocol with the largest success probability.
struct SdpSolution {
  ComplexOperator choi_star;
  double p_max = 0.0;       // certified primal value Tr(Γ*C)
  double dual_bound = 0.0;  // certified upper bound on p_max
  double gap = 0.0;         // dual_bound − p_max
  double fidelity = 0.0;    // Tr(Γ*A)/Tr(Γ*C)
  SdpResiduals residuals;
  int iterations = 0;
  std::string solver_status;
  bool certified = false;
  /// False in the no-go regime; Γ* is then an optimal protocol that does not
  /// beat the identity.
  bool purification_exists = false;
  NogoReport nogo;

  Matrix reduced_primal;  // M with Γ* = G M G†, G = C^{-1/2}B
  Matrix dual_y;          // certified dual variable on the input space
};

/// Solves max Tr(ΓC) over CPTN Γ supported on C^{-1/2}P_m C^{1/2}, in the
/// reduced form Γ = G M G†. The returned values are post-processed into a
/// feasible primal point and a feasible dual point before reporting.
SdpSolution solve_max_success(const StructuralOperators& s,
                              const SdpOptions& options = {});

struct CertificateReport {
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 0.0;
  SdpResiduals residuals;
  bool passed = false;
  std::string message;
};

/// Recomputes every certificate quantity from Γ* and Y in the original
/// complex operators.
CertificateReport dual_certificate_check(const SdpSolution& sol,
                                         const StructuralOperators& s,
                                         const SdpOptions& options = {});

/// Same program with the full Choi operator as variable: Γ = W N W† with W an
/// orthonormal basis of range(T) taken from an SVD of T, objective and
/// constraints evaluated on Γ itself. Used to cross-check the reduction.
SdpSolution solve_max_success_direct(const StructuralOperators& s,
                                     const SdpOptions& options = {});

SdpResiduals protocol_residuals(const ComplexOperator& choi,
                                const StructuralOperators& s);

}  // namespace epp
