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

namespace epp {

/// Block-diagonal linear matrix inequality in standard dual form:
///
///   maximize  bᵀy  subject to  Z = F₀ − Σᵢ yᵢ Fᵢ ⪰ 0,
///
/// with real symmetric blocks. The paired primal is
///   minimize ⟨F₀, X⟩ subject to ⟨Fᵢ, X⟩ = bᵢ, X ⪰ 0.
struct LmiProblem {
  std::vector<int> block_sizes;
  std::vector<RealMatrix> f0;                  // per block
  std::vector<std::vector<RealMatrix>> fi;     // fi[i][block]
  RealVector b;

  int variable_count() const { return static_cast<int>(b.size()); }
  void validate() const;
};

struct LmiOptions {
  int max_iterations = 200;
  double gap_tol = 1e-10;    // relative duality gap
  double feas_tol = 1e-10;   // relative primal and dual infeasibility
  double step_fraction = 0.98;
};

enum class LmiStatus { kOptimal, kIterationLimit, kNumericalFailure };
std::string to_string(LmiStatus s);

struct LmiSolution {
  LmiStatus status = LmiStatus::kNumericalFailure;
  RealVector y;
  std::vector<RealMatrix> x;  // primal, one per block
  std::vector<RealMatrix> z;  // slack F₀ − Σ yᵢFᵢ
  double objective = 0.0;     // bᵀy
  double bound = 0.0;         // ⟨F₀, X⟩
  double relative_gap = 0.0;
  double primal_infeasibility = 0.0;
  double dual_infeasibility = 0.0;
  int iterations = 0;
};

/// Infeasible-start primal-dual path following with the HKM direction and a
/// Mehrotra predictor-corrector.
LmiSolution solve_lmi(const LmiProblem& problem, const LmiOptions& options = {});

/// Real symmetric embedding [[Re, −Im], [Im, Re]] of a Hermitian matrix.
RealMatrix real_embedding(const Matrix& h);
/// Inverse pairing: the Hermitian Y with Re Tr(H·Y) = ⟨embed(H), X⟩ for all H.
Matrix hermitian_from_embedding_dual(const RealMatrix& x);

/// Orthonormal (Frobenius) basis of r×r Hermitian matrices, r² elements.
std::vector<Matrix> hermitian_basis(int r);

/// Linear program over Hermitian coordinates:
///
///   maximize Σ_k b_k x_k  s.t.  Σ_k x_k P_k ⪰ 0,  I − Σ_k x_k L_k ⪰ 0.
///
/// P_k and L_k are complex Hermitian images of the k-th coordinate direction.
struct HermitianProgram {
  std::vector<Matrix> psd_images;
  std::vector<Matrix> bound_images;
  RealVector objective;
};

struct HermitianProgramSolution {
  LmiSolution lmi;
  RealVector x;
  Matrix psd_value;    // Σ x_k P_k
  Matrix bound_value;  // Σ x_k L_k
  Matrix dual_psd;     // complex dual of the PSD block
  Matrix dual_bound;   // complex dual of the I − L block
};

HermitianProgramSolution solve_hermitian_program(const HermitianProgram& prog,
                                                 const LmiOptions& options = {});

}  // namespace epp
