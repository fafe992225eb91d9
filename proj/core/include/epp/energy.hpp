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
#include <vector>

#include "epp/operator.hpp"
#include "epp/random.hpp"

namespace epp {

inline constexpr double kDefaultClusterTol = 1e-8;

/// Clustered spectral decomposition H = Σ_E E·P_E together with the
/// constraint projector Π that characterizes energy-preserving Choi operators.
///
/// Π is formed as Σ_E P̄_E ⊗ P_E on [in, out]. For real Hamiltonians P̄_E = P_E;
/// for complex ones the conjugate on the input leg is what makes Π the
/// projector onto Choi vectors (I ⊗ M)|Ω⟩ with [M, H] = 0.
class EnergyStructure {
 public:
  EnergyStructure() = default;

  const ComplexOperator& hamiltonian() const { return hamiltonian_; }
  const SubsystemSpace& space() const { return hamiltonian_.space(); }
  Eigen::Index dim() const { return hamiltonian_.dim(); }

  /// Distinct cluster energies, ascending.
  const std::vector<double>& energies() const { return energies_; }
  const std::vector<ComplexOperator>& projectors() const { return projectors_; }
  /// Columns: orthonormal eigenvectors, grouped by cluster in ascending order.
  const Matrix& eigenbasis() const { return eigenbasis_; }
  /// Cluster label of each eigenbasis column.
  const std::vector<int>& cluster_of() const { return cluster_of_; }
  /// Projector on the Choi space [in…, out…].
  const ComplexOperator& pi() const { return pi_; }
  double cluster_tol() const { return cluster_tol_; }

  int cluster_count() const { return static_cast<int>(energies_.size()); }
  std::vector<int> degeneracies() const;
  /// e.g. "1,2,1".
  std::string degeneracy_pattern() const;
  /// Σ_E P_E·M·P_E.
  ComplexOperator block_diagonal_part(const ComplexOperator& m) const;
  /// Column indices of the eigenbasis belonging to cluster c.
  std::vector<int> cluster_columns(int c) const;

 private:
  friend EnergyStructure spectral_decompose(const ComplexOperator& h,
                                            double cluster_tol);
  ComplexOperator hamiltonian_;
  std::vector<double> energies_;
  std::vector<ComplexOperator> projectors_;
  Matrix eigenbasis_;
  std::vector<int> cluster_of_;
  ComplexOperator pi_;
  double cluster_tol_ = kDefaultClusterTol;
};

/// Consecutive ascending eigenvalues within cluster_tol·max(1, ‖H‖) share a
/// cluster.
EnergyStructure spectral_decompose(const ComplexOperator& h,
                                   double cluster_tol = kDefaultClusterTol);

/// H = J Σ_{i,j=1}^N Z_i Z_j + h Σ_i X_i with the double sum over all ordered
/// pairs, diagonal included.
ComplexOperator ising_all_to_all(int n_sites, double j, double h);

struct PauliTerm {
  double coeff = 0.0;
  std::string ops;  // over {I, X, Y, Z}, one letter per qubit
};
ComplexOperator pauli_hamiltonian(const std::vector<PauliTerm>& terms);
ComplexOperator pauli_string(const std::string& ops);

struct EpoReport {
  bool energy_preserving = false;
  double sandwich_residual = 0.0;    // ‖Γ − ΠΓΠ‖
  double commutator_residual = 0.0;  // ‖[Γ, Π]‖, diagnostic only
};

/// Decision uses the sandwich form: ‖Γ − ΠΓΠ‖ ≤ tol·max(1, ‖Γ‖).
EpoReport is_energy_preserving(const ComplexOperator& choi,
                               const EnergyStructure& es, double tol = 1e-9);

/// ΠΓΠ.
ComplexOperator energy_sandwich(const ComplexOperator& choi,
                                const EnergyStructure& es);

/// Random CPTN Choi with Γ = ΠΓΠ and max eigenvalue of Tr_out(Γ) equal to 1.
/// rank = 0 draws a full-rank Wishart seed matrix.
ComplexOperator random_epo_choi(const EnergyStructure& es, CounterRng& rng,
                                int rank = 0);
ComplexOperator random_epo_choi(const EnergyStructure& es, std::uint64_t seed,
                                int rank = 0);

/// Random Hermitian matrix from the Gaussian unitary ensemble.
ComplexOperator random_hermitian(const SubsystemSpace& space, CounterRng& rng);

}  // namespace epp
