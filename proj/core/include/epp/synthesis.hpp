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

#include <vector>

#include <nlohmann/json.hpp>

#include "epp/energy.hpp"
#include "epp/operator.hpp"

namespace epp {

/// Kraus operators of a square Choi operator on [in, out] (both `space`), from
/// its eigendecomposition. Eigenvalues below rank_tol·λ_max are dropped.
std::vector<ComplexOperator> kraus_from_choi(const ComplexOperator& choi,
                                             const SubsystemSpace& space,
                                             double rank_tol = kDefaultRankTol);

/// Eigenbasis of H adapted to Γ*: inside every energy cluster the columns also
/// diagonalize Λ*†(I) = (Tr_out Γ*)ᵀ. Columns grouped by cluster.
Matrix instrument_eigenbasis(const ComplexOperator& choi_star,
                             const EnergyStructure& es);

/// Failure branch Γ# = Σ_i |ī⟩⟨ī| ⊗ ρ_i over the adapted eigenbasis, with
/// ρ_i = Λ*(|i⟩⟨i|)/t_i − Λ*(|i⟩⟨i|) when t_i = Tr Λ*(|i⟩⟨i|) > 0 and
/// ρ_i = |i⟩⟨i| otherwise. Γ* + Γ# is then an energy-preserving channel.
ComplexOperator complement_choi(const ComplexOperator& choi_star,
                                const EnergyStructure& es);

/// Energy-conserving unitary dilation: U|i⟩|φ₁⟩ = Σ_k M_k|i⟩|φ_k⟩ on every
/// eigenvector |i⟩ of H, with success heralded by Q = Σ_{k ≤ r} |φ_k⟩⟨φ_k|.
struct DilationSpec {
  std::vector<ComplexOperator> kraus_success;
  std::vector<ComplexOperator> kraus_fail;
  ComplexOperator hamiltonian;
  int env_dim = 0;
  Matrix unitary;  // on system ⊗ environment, environment least significant
  Matrix q_env;
  int ground_index = 1;  // 1-based label of φ₁

  int system_dim() const { return static_cast<int>(hamiltonian.dim()); }
};

/// Builds the dilation of Γ* together with its complement.
DilationSpec build_dilation(const ComplexOperator& choi_star,
                            const EnergyStructure& es,
                            double rank_tol = kDefaultRankTol);

/// Same from explicit Kraus lists; Σ M†M must be I and every M_k must commute
/// with H.
DilationSpec build_dilation_from_kraus(std::vector<ComplexOperator> success,
                                       std::vector<ComplexOperator> fail,
                                       const EnergyStructure& es);

struct DilationReport {
  double choi_residual = 0.0;        // ‖Γ_U − Γ*‖
  double unitarity_residual = 0.0;   // ‖U†U − I‖
  double commutator_residual = 0.0;  // ‖[U, H ⊗ I]‖
  double isometry_residual = 0.0;    // max_i ‖U|i⟩|φ₁⟩ − Σ_k M_k|i⟩|φ_k⟩‖
  bool passed(double tol = 1e-8) const;
};

/// Choi operator of ρ ↦ Tr_env[(I ⊗ Q) U (ρ ⊗ |φ₁⟩⟨φ₁|) U†].
ComplexOperator dilation_choi(const DilationSpec& spec);

DilationReport verify_dilation(const DilationSpec& spec,
                               const ComplexOperator& choi_star);

nlohmann::json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const nlohmann::json& j);
nlohmann::json dilation_to_json(const DilationSpec& spec);
DilationSpec dilation_from_json(const nlohmann::json& j);

}  // namespace epp
