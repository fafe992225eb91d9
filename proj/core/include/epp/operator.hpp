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

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace epp {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Default relative threshold below which eigenvalues count as kernel.
inline constexpr double kDefaultRankTol = 1e-10;

/// Ordered list of local dimensions of a tensor-product space.
///
/// Index convention: the first subsystem is the most significant digit of a
/// flat index, i.e. the same ordering `kron` produces.
class SubsystemSpace {
 public:
  SubsystemSpace() = default;
  explicit SubsystemSpace(std::vector<int> dims);
  SubsystemSpace(std::initializer_list<int> dims)
      : SubsystemSpace(std::vector<int>(dims)) {}

  /// `copies` subsystems of local dimension `d`.
  static SubsystemSpace uniform(int d, int copies);

  const std::vector<int>& dims() const { return dims_; }
  int count() const { return static_cast<int>(dims_.size()); }
  int dim(int k) const { return dims_.at(static_cast<std::size_t>(k)); }
  Eigen::Index total() const { return total_; }

  SubsystemSpace concat(const SubsystemSpace& other) const;
  SubsystemSpace select(std::span<const int> indices) const;

  bool operator==(const SubsystemSpace& other) const {
    return dims_ == other.dims_;
  }

  std::string to_string() const;

 private:
  std::vector<int> dims_;
  Eigen::Index total_ = 1;
};

/// Dense complex matrix tagged with the tensor-product space it acts on.
class ComplexOperator {
 public:
  ComplexOperator() = default;
  ComplexOperator(Matrix data, SubsystemSpace space);
  /// Square matrix on a single subsystem of matching dimension.
  explicit ComplexOperator(Matrix data);

  static ComplexOperator identity(const SubsystemSpace& space);
  static ComplexOperator zero(const SubsystemSpace& space);

  const Matrix& matrix() const { return data_; }
  Matrix& matrix() { return data_; }
  const SubsystemSpace& space() const { return space_; }
  Eigen::Index dim() const { return data_.rows(); }

  Complex operator()(Eigen::Index r, Eigen::Index c) const {
    return data_(r, c);
  }

  Complex trace() const { return data_.trace(); }
  ComplexOperator adjoint() const;
  ComplexOperator transpose() const;

  /// ‖M − M†‖ in the max-abs-entry sense, cheap enough for guards.
  double hermitian_residual() const;
  bool is_hermitian(double tol = 1e-12) const;

  ComplexOperator& operator+=(const ComplexOperator& rhs);
  ComplexOperator& operator-=(const ComplexOperator& rhs);
  ComplexOperator& operator*=(Complex s);

  friend ComplexOperator operator+(ComplexOperator a, const ComplexOperator& b) {
    return a += b;
  }
  friend ComplexOperator operator-(ComplexOperator a, const ComplexOperator& b) {
    return a -= b;
  }
  friend ComplexOperator operator*(ComplexOperator a, Complex s) {
    return a *= s;
  }
  friend ComplexOperator operator*(Complex s, ComplexOperator a) {
    return a *= s;
  }
  /// Matrix product; spaces must agree.
  friend ComplexOperator operator*(const ComplexOperator& a,
                                   const ComplexOperator& b);

 private:
  Matrix data_;
  SubsystemSpace space_;
};

struct EigenDecomposition {
  RealVector values;  // ascending
  Matrix vectors;     // unitary, columns are eigenvectors
};

ComplexOperator kron(std::span<const ComplexOperator> factors);
ComplexOperator kron(const ComplexOperator& a, const ComplexOperator& b);

/// Traces out every subsystem not listed in `keep`; kept subsystems retain
/// their relative order.
ComplexOperator partial_trace(const ComplexOperator& m,
                              std::span<const int> keep);
ComplexOperator partial_trace(const ComplexOperator& m,
                              std::initializer_list<int> keep);

ComplexOperator partial_transpose(const ComplexOperator& m,
                                  std::span<const int> subset);
ComplexOperator partial_transpose(const ComplexOperator& m,
                                  std::initializer_list<int> subset);

/// Reorders subsystems: subsystem k of the result is subsystem perm[k] of `m`.
ComplexOperator permute_subsystems(const ComplexOperator& m,
                                   std::span<const int> perm);
ComplexOperator permute_subsystems(const ComplexOperator& m,
                                   std::initializer_list<int> perm);

/// Hermitian eigendecomposition. Inputs with a Hermiticity residual above
/// `herm_tol`·max(1, ‖M‖) are rejected; smaller residuals are symmetrized away.
EigenDecomposition eigh(const ComplexOperator& m, double herm_tol = 1e-12);
EigenDecomposition eigh(const Matrix& m, double herm_tol = 1e-12);

/// M^{1/2} for PSD M (eigenvalues below the rank threshold mapped to 0).
ComplexOperator psd_sqrt(const ComplexOperator& m,
                         double rank_tol = kDefaultRankTol);
/// M^{-1/2} on the support of M, 0 on its kernel.
ComplexOperator psd_sqrt_pinv(const ComplexOperator& m,
                              double rank_tol = kDefaultRankTol);
/// Orthogonal projector onto the support of a PSD (or Hermitian) M.
ComplexOperator support_projector(const ComplexOperator& m,
                                  double rank_tol = kDefaultRankTol);
/// Number of eigenvalues above rank_tol·max|λ|.
int numerical_rank(const ComplexOperator& m, double rank_tol = kDefaultRankTol);

double spectral_norm(const ComplexOperator& m);
double spectral_norm(const Matrix& m);
double min_eigenvalue(const ComplexOperator& m);
double max_eigenvalue(const ComplexOperator& m);

/// (M + M†)/2.
ComplexOperator hermitian_part(const ComplexOperator& m);

/// Frobenius inner product Tr(A† B).
Complex inner(const ComplexOperator& a, const ComplexOperator& b);
/// Tr(A·B) without forming the product.
Complex trace_product(const ComplexOperator& a, const ComplexOperator& b);

/// |v⟩⟨v| on the given space.
ComplexOperator outer(const Vector& v, const SubsystemSpace& space);

}  // namespace epp
