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

#include <functional>
#include <vector>

#include "epp/operator.hpp"
#include "epp/random.hpp"

namespace epp {

/// Choi operators use Γ = Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|) on [in…, out…].
struct ChannelRep {
  ComplexOperator choi;
  SubsystemSpace in;
  SubsystemSpace out;

  ChannelRep(ComplexOperator choi, SubsystemSpace in, SubsystemSpace out);

  /// Indices of the input subsystems inside the Choi space.
  std::vector<int> input_indices() const;
  /// Tr_out(Γ), an operator on the input space.
  ComplexOperator trace_out() const;
};

/// (1−γ)·Tr(X)·I/d + γ·X.
ComplexOperator depolarizing_apply(const ComplexOperator& x, double gamma);
/// Depolarizing channel on the listed subsystems, identity elsewhere.
ComplexOperator depolarize_subsystems(const ComplexOperator& x, double gamma,
                                      std::span<const int> subsystems);

/// Permutation operator W_π on `k` copies of C^d: W_π|i_1…i_k⟩ = |i_{π⁻¹(1)}…⟩.
ComplexOperator permutation_operator(int d, std::span<const int> perm);
/// Projector onto the symmetric subspace of (C^d)^{⊗k}.
ComplexOperator sym_projector(int d, int k);
/// Maximally mixed state on the symmetric subspace, s_k.
ComplexOperator sym_mixed_state(int d, int k);

/// Normalized vector of i.i.d. complex Gaussians.
Vector haar_random_vector(int d, CounterRng& rng);
ComplexOperator haar_random_state(int d, CounterRng& rng);
ComplexOperator haar_random_state(int d, std::uint64_t seed);
/// Haar-random unitary (QR of a Ginibre matrix with phase correction).
Matrix haar_random_unitary(int d, CounterRng& rng);

ComplexOperator choi_of_identity(int dim);
ComplexOperator choi_of_identity(const SubsystemSpace& space);

/// Builds a Choi operator by applying `action` to every |i⟩⟨j| of `in`.
ComplexOperator choi_from_action(
    const std::function<ComplexOperator(const ComplexOperator&)>& action,
    const SubsystemSpace& in, const SubsystemSpace& out);

/// Choi operator Σ_k vec(M_k)vec(M_k)† of a Kraus list (operators on one
/// space, square).
ComplexOperator choi_from_kraus(std::span<const ComplexOperator> kraus);

/// Λ(ρ) = Tr_in[(ρᵀ ⊗ I)·Γ], evaluated as Σ_ij ρ_ij Γ_block(i, j).
ComplexOperator apply_channel_via_choi(const ComplexOperator& choi,
                                       const SubsystemSpace& out,
                                       const ComplexOperator& rho);

/// Tr_out of a Choi operator whose last `out_count` subsystems are outputs.
ComplexOperator choi_trace_out(const ComplexOperator& choi, int out_count);

/// Completely-positive check residuals.
struct ChoiValidity {
  double psd_min_eig = 0.0;      // min eigenvalue of Γ
  double trout_excess = 0.0;     // max eigenvalue of Tr_out(Γ) − I
  double trout_deficit = 0.0;    // ‖Tr_out(Γ) − I‖ (for CPTP)
  bool cptn(double tol = 1e-9) const;
  bool cptp(double tol = 1e-9) const;
};
ChoiValidity check_choi(const ComplexOperator& choi, int out_count);

}  // namespace epp
