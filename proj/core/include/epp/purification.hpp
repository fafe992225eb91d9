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
#include "epp/operator.hpp"

namespace epp {

/// Numerical knobs shared by the whole pipeline.
struct Tolerances {
  double rank_tol = kDefaultRankTol;        // pseudo-inverse / support cut
  double cluster_tol = kDefaultClusterTol;  // energy degeneracy grouping
  double max_eig_tol = 1e-9;                // membership in the top eigenspace
  double sdp_gap = 1e-10;                   // interior-point stopping gap
};

/// n noisy copies of a d-level system under depolarizing noise of strength
/// gamma, governed by an n-copy Hamiltonian.
class PurificationProblem {
 public:
  /// gamma must lie in (0, 1]; dim(H) must equal d^n. The energy structure is
  /// re-derived when its space is not [d, …, d].
  PurificationProblem(int d, int n, double gamma, EnergyStructure energy);
  PurificationProblem(int d, int n, double gamma, const ComplexOperator& h,
                      double cluster_tol = kDefaultClusterTol);

  int d() const { return d_; }
  int n() const { return n_; }
  double gamma() const { return gamma_; }
  const EnergyStructure& energy() const { return energy_; }
  SubsystemSpace system_space() const { return SubsystemSpace::uniform(d_, n_); }
  /// [in_1 … in_n, out_1 … out_n]; out_1 is the purified output.
  SubsystemSpace choi_space() const {
    return SubsystemSpace::uniform(d_, 2 * n_);
  }

 private:
  int d_;
  int n_;
  double gamma_;
  EnergyStructure energy_;
};

/// Everything derived from (A, C, Π) used by the solver and the no-go test.
struct StructuralOperators {
  ComplexOperator A;
  ComplexOperator C;
  ComplexOperator C_sqrt;
  ComplexOperator C_inv_sqrt;
  ComplexOperator K;  // C^{-1/2} A C^{-1/2}
  ComplexOperator P_m;
  ComplexOperator pi;
  ComplexOperator support_C;  // C^{1/2} C^{-1/2}
  Matrix top_basis;           // orthonormal columns spanning range(P_m)
  RealVector K_spectrum;      // ascending

  double F_max = 0.0;
  double baseline = 0.0;
  int support_rank = 0;  // rank(C)
  int pi_rank = 0;
  int rank_Pm = 0;
  /// rank(C) == rank(Π); holds whenever the noisy input has full rank.
  bool full_support = false;
  double support_residual = 0.0;  // ‖C^{1/2}C^{-1/2} − Π‖ when full_support

  SubsystemSpace in_space;  // system the protocol acts on
  int out_count = 0;        // trailing subsystems of the Choi space
  Tolerances tol;
};

double baseline_fidelity(double gamma, int d);

ComplexOperator build_A(const PurificationProblem& p);
ComplexOperator build_C(const PurificationProblem& p);

/// [(N^{⊗n} ⊗ id)(s_{n+1})]^{T_{1…n}} on [in_1 … in_n, out_1].
ComplexOperator purified_slot_operator(int d, int n, double gamma);
/// N^{⊗n}(s_n).
ComplexOperator noisy_symmetric_input(int d, int n, double gamma);

/// Assembles C^{±1/2}, K, F_max and P_m from A, C and Π. Throws when the
/// support of C escapes Π, or when `expect_full_support` and rank(C) ≠ rank(Π).
StructuralOperators assemble_structural(ComplexOperator a, ComplexOperator c,
                                        ComplexOperator pi,
                                        SubsystemSpace in_space, int out_count,
                                        double baseline,
                                        bool expect_full_support,
                                        const Tolerances& tol);

StructuralOperators structural_operators(const PurificationProblem& p,
                                         const Tolerances& tol = {});

struct NogoReport {
  bool operator_route = false;  // Γ_id fixed by the P_m sandwich
  bool scalar_route = false;    // |F_max − baseline| ≤ tol
  bool agree = false;
  double operator_residual = 0.0;  // ‖T Γ_id T† − Γ_id‖, T = C^{-1/2}P_m C^{1/2}
  double sigma_residual = 0.0;     // ‖P_m σ_id P_m − σ_id‖
  double identity_fidelity = 0.0;  // Tr(Γ_id A)/Tr(Γ_id C)
  double gap = 0.0;                // F_max − baseline
  /// True when the literal operator equation was used; false when C lacks
  /// full Π-support (γ = 1) and the equivalent σ-form decided the route.
  bool literal_form = true;
};

/// Evaluates both routes of the no-purification criterion. Never throws on
/// disagreement; see `nogo_condition`.
NogoReport evaluate_nogo(const StructuralOperators& s, double tol = 1e-8);
/// True when no purification protocol exists. Throws NumericalError when the
/// operator and scalar routes disagree.
bool nogo_condition(const StructuralOperators& s, double tol = 1e-8);

struct ProtocolMetrics {
  double fidelity = 0.0;
  double probability = 0.0;
};

/// probability = Tr(Γ·C), fidelity = Tr(Γ·A)/Tr(Γ·C) for energy-preserving Γ.
ProtocolMetrics protocol_metrics(const ComplexOperator& choi,
                                 const StructuralOperators& s);

/// ‖Tr_out(C^{-1/2} σ C^{-1/2})‖^{-1}, the largest admissible q for σ.
double max_success_scale(const ComplexOperator& sigma,
                         const StructuralOperators& s);

/// Γ = q·C^{-1/2} σ C^{-1/2}.
ComplexOperator protocol_from_sigma(const ComplexOperator& sigma, double q,
                                    const StructuralOperators& s);

/// σ = C^{1/2} Γ C^{1/2} / Tr(Γ C), the inverse of protocol_from_sigma.
ComplexOperator sigma_from_protocol(const ComplexOperator& choi,
                                    const StructuralOperators& s);

}  // namespace epp
