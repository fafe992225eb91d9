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

#include "epp/operator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace epp {

namespace {

using Index = Eigen::Index;

std::vector<Index> strides_of(const std::vector<int>& dims) {
  std::vector<Index> strides(dims.size(), 1);
  for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k) {
    strides[k] = strides[k + 1] * dims[k + 1];
  }
  return strides;
}

std::vector<bool> mask_of(std::span<const int> subset, int count,
                          const char* what) {
  std::vector<bool> mask(static_cast<std::size_t>(count), false);
  for (int k : subset) {
    if (k < 0 || k >= count) {
      throw DimensionError(std::string(what) + ": subsystem index " +
                           std::to_string(k) + " out of range [0, " +
                           std::to_string(count) + ")");
    }
    mask[k] = true;
  }
  return mask;
}

// Flat index → the part of the index carried by masked subsystems.
std::vector<Index> masked_offsets(const SubsystemSpace& space,
                                  const std::vector<bool>& mask) {
  const auto& dims = space.dims();
  const auto strides = strides_of(dims);
  std::vector<Index> out(static_cast<std::size_t>(space.total()), 0);
  for (Index i = 0; i < space.total(); ++i) {
    Index acc = 0;
    for (std::size_t k = 0; k < dims.size(); ++k) {
      if (mask[k]) acc += ((i / strides[k]) % dims[k]) * strides[k];
    }
    out[i] = acc;
  }
  return out;
}

void require_square(const ComplexOperator& m, const char* what) {
  if (m.matrix().rows() != m.matrix().cols()) {
    throw DimensionError(std::string(what) + ": operator must be square");
  }
}

}  // namespace

SubsystemSpace::SubsystemSpace(std::vector<int> dims) : dims_(std::move(dims)) {
  total_ = 1;
  for (int d : dims_) {
    if (d < 1) throw DimensionError("SubsystemSpace: local dimension < 1");
    total_ *= d;
  }
}

SubsystemSpace SubsystemSpace::uniform(int d, int copies) {
  return SubsystemSpace(std::vector<int>(static_cast<std::size_t>(copies), d));
}

SubsystemSpace SubsystemSpace::concat(const SubsystemSpace& other) const {
  std::vector<int> dims = dims_;
  dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
  return SubsystemSpace(std::move(dims));
}

SubsystemSpace SubsystemSpace::select(std::span<const int> indices) const {
  std::vector<int> dims;
  dims.reserve(indices.size());
  for (int k : indices) dims.push_back(dim(k));
  return SubsystemSpace(std::move(dims));
}

std::string SubsystemSpace::to_string() const {
  std::ostringstream os;
  os << '[';
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (k) os << ',';
    os << dims_[k];
  }
  os << ']';
  return os.str();
}

ComplexOperator::ComplexOperator(Matrix data, SubsystemSpace space)
    : data_(std::move(data)), space_(std::move(space)) {
  if (data_.rows() != space_.total() || data_.cols() != space_.total()) {
    throw DimensionError("ComplexOperator: matrix is " +
                         std::to_string(data_.rows()) + "x" +
                         std::to_string(data_.cols()) + " but space " +
                         space_.to_string() + " has dimension " +
                         std::to_string(space_.total()));
  }
}

ComplexOperator::ComplexOperator(Matrix data)
    : ComplexOperator(data, SubsystemSpace({static_cast<int>(data.rows())})) {}

ComplexOperator ComplexOperator::identity(const SubsystemSpace& space) {
  return {Matrix::Identity(space.total(), space.total()), space};
}

ComplexOperator ComplexOperator::zero(const SubsystemSpace& space) {
  return {Matrix::Zero(space.total(), space.total()), space};
}

ComplexOperator ComplexOperator::adjoint() const {
  return {data_.adjoint(), space_};
}

ComplexOperator ComplexOperator::transpose() const {
  return {data_.transpose(), space_};
}

double ComplexOperator::hermitian_residual() const {
  if (data_.size() == 0) return 0.0;
  return (data_ - data_.adjoint()).cwiseAbs().maxCoeff();
}

bool ComplexOperator::is_hermitian(double tol) const {
  const double scale = std::max(1.0, data_.cwiseAbs().maxCoeff());
  return hermitian_residual() <= tol * scale;
}

ComplexOperator& ComplexOperator::operator+=(const ComplexOperator& rhs) {
  if (!(space_ == rhs.space_)) throw DimensionError("operator+: space mismatch");
  data_ += rhs.data_;
  return *this;
}

ComplexOperator& ComplexOperator::operator-=(const ComplexOperator& rhs) {
  if (!(space_ == rhs.space_)) throw DimensionError("operator-: space mismatch");
  data_ -= rhs.data_;
  return *this;
}

ComplexOperator& ComplexOperator::operator*=(Complex s) {
  data_ *= s;
  return *this;
}

ComplexOperator operator*(const ComplexOperator& a, const ComplexOperator& b) {
  if (a.dim() != b.dim()) throw DimensionError("operator*: dimension mismatch");
  return {a.data_ * b.data_, a.space_};
}

ComplexOperator kron(std::span<const ComplexOperator> factors) {
  if (factors.empty()) throw DimensionError("kron: empty factor list");
  Matrix acc = factors.front().matrix();
  SubsystemSpace space = factors.front().space();
  for (std::size_t f = 1; f < factors.size(); ++f) {
    const Matrix& b = factors[f].matrix();
    Matrix next(acc.rows() * b.rows(), acc.cols() * b.cols());
    for (Index i = 0; i < acc.rows(); ++i) {
      for (Index j = 0; j < acc.cols(); ++j) {
        next.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
            acc(i, j) * b;
      }
    }
    acc = std::move(next);
    space = space.concat(factors[f].space());
  }
  return {std::move(acc), std::move(space)};
}

ComplexOperator kron(const ComplexOperator& a, const ComplexOperator& b) {
  const ComplexOperator pair[] = {a, b};
  return kron(pair);
}

ComplexOperator partial_trace(const ComplexOperator& m,
                              std::span<const int> keep) {
  require_square(m, "partial_trace");
  const auto& space = m.space();
  auto keep_mask = mask_of(keep, space.count(), "partial_trace");
  std::vector<int> kept;
  std::vector<bool> traced_mask(keep_mask.size());
  for (int k = 0; k < space.count(); ++k) {
    if (keep_mask[k]) kept.push_back(k);
    traced_mask[k] = !keep_mask[k];
  }
  const SubsystemSpace out_space = space.select(kept);
  const auto traced = masked_offsets(space, traced_mask);
  const auto strides = strides_of(space.dims());
  const auto out_strides = strides_of(out_space.dims());

  // Flat index → flat index within the kept factors.
  std::vector<Index> kept_index(static_cast<std::size_t>(space.total()));
  for (Index i = 0; i < space.total(); ++i) {
    Index acc = 0;
    for (std::size_t q = 0; q < kept.size(); ++q) {
      const int k = kept[q];
      acc += ((i / strides[k]) % space.dim(k)) * out_strides[q];
    }
    kept_index[i] = acc;
  }

  Matrix out = Matrix::Zero(out_space.total(), out_space.total());
  const Matrix& a = m.matrix();
  for (Index c = 0; c < a.cols(); ++c) {
    for (Index r = 0; r < a.rows(); ++r) {
      if (traced[r] == traced[c]) out(kept_index[r], kept_index[c]) += a(r, c);
    }
  }
  return {std::move(out), out_space};
}

ComplexOperator partial_trace(const ComplexOperator& m,
                              std::initializer_list<int> keep) {
  return partial_trace(m, std::span<const int>(keep.begin(), keep.size()));
}

ComplexOperator partial_transpose(const ComplexOperator& m,
                                  std::span<const int> subset) {
  require_square(m, "partial_transpose");
  const auto mask = mask_of(subset, m.space().count(), "partial_transpose");
  const auto part = masked_offsets(m.space(), mask);
  const Matrix& a = m.matrix();
  Matrix out(a.rows(), a.cols());
  for (Index c = 0; c < a.cols(); ++c) {
    for (Index r = 0; r < a.rows(); ++r) {
      const Index r2 = r - part[r] + part[c];
      const Index c2 = c - part[c] + part[r];
      out(r2, c2) = a(r, c);
    }
  }
  return {std::move(out), m.space()};
}

ComplexOperator partial_transpose(const ComplexOperator& m,
                                  std::initializer_list<int> subset) {
  return partial_transpose(m,
                           std::span<const int>(subset.begin(), subset.size()));
}

ComplexOperator permute_subsystems(const ComplexOperator& m,
                                   std::span<const int> perm) {
  require_square(m, "permute_subsystems");
  const auto& space = m.space();
  const int n = space.count();
  if (static_cast<int>(perm.size()) != n) {
    throw DimensionError("permute_subsystems: permutation has wrong length");
  }
  std::vector<int> seen(static_cast<std::size_t>(n), 0);
  for (int p : perm) {
    if (p < 0 || p >= n || seen[p]++) {
      throw DimensionError("permute_subsystems: not a permutation");
    }
  }
  const SubsystemSpace out_space = space.select(perm);
  const auto strides = strides_of(space.dims());
  const auto out_strides = strides_of(out_space.dims());
  std::vector<Index> target(static_cast<std::size_t>(space.total()));
  for (Index i = 0; i < space.total(); ++i) {
    Index acc = 0;
    for (int k = 0; k < n; ++k) {
      acc += ((i / strides[perm[k]]) % space.dim(perm[k])) * out_strides[k];
    }
    target[i] = acc;
  }
  const Matrix& a = m.matrix();
  Matrix out(a.rows(), a.cols());
  for (Index c = 0; c < a.cols(); ++c) {
    for (Index r = 0; r < a.rows(); ++r) out(target[r], target[c]) = a(r, c);
  }
  return {std::move(out), out_space};
}

ComplexOperator permute_subsystems(const ComplexOperator& m,
                                   std::initializer_list<int> perm) {
  return permute_subsystems(m, std::span<const int>(perm.begin(), perm.size()));
}

EigenDecomposition eigh(const Matrix& m, double herm_tol) {
  if (m.rows() != m.cols()) throw DimensionError("eigh: operator must be square");
  if (m.size() == 0) return {};
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  const double residual = (m - m.adjoint()).cwiseAbs().maxCoeff();
  if (residual > herm_tol * scale) {
    throw NumericalError("eigh: input is not Hermitian (residual " +
                         std::to_string(residual) + ")");
  }
  const Matrix sym = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("eigh: eigensolver did not converge");
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

EigenDecomposition eigh(const ComplexOperator& m, double herm_tol) {
  return eigh(m.matrix(), herm_tol);
}

namespace {

// Applies f to the eigenvalues of a PSD operator; eigenvalues at or below the
// rank threshold are sent to zero.
template <typename F>
ComplexOperator psd_function(const ComplexOperator& m, double rank_tol, F f,
                             const char* what) {
  const auto eig = eigh(m, 1e-10);
  if (eig.values.size() == 0) return m;
  const double lmax = eig.values.cwiseAbs().maxCoeff();
  const double cut = rank_tol * lmax;
  if (eig.values.minCoeff() < -std::max(cut, 1e-13)) {
    throw NumericalError(std::string(what) +
                         ": significantly negative eigenvalue " +
                         std::to_string(eig.values.minCoeff()));
  }
  RealVector g(eig.values.size());
  for (Index i = 0; i < g.size(); ++i) {
    g[i] = eig.values[i] > cut ? f(eig.values[i]) : 0.0;
  }
  Matrix out = eig.vectors * g.asDiagonal() * eig.vectors.adjoint();
  return {0.5 * (out + out.adjoint()), m.space()};
}

}  // namespace

ComplexOperator psd_sqrt(const ComplexOperator& m, double rank_tol) {
  return psd_function(m, rank_tol, [](double x) { return std::sqrt(x); },
                      "psd_sqrt");
}

ComplexOperator psd_sqrt_pinv(const ComplexOperator& m, double rank_tol) {
  return psd_function(m, rank_tol, [](double x) { return 1.0 / std::sqrt(x); },
                      "psd_sqrt_pinv");
}

ComplexOperator support_projector(const ComplexOperator& m, double rank_tol) {
  const auto eig = eigh(m, 1e-10);
  if (eig.values.size() == 0) return m;
  const double cut = rank_tol * eig.values.cwiseAbs().maxCoeff();
  RealVector g(eig.values.size());
  for (Index i = 0; i < g.size(); ++i) {
    g[i] = std::abs(eig.values[i]) > cut ? 1.0 : 0.0;
  }
  Matrix out = eig.vectors * g.asDiagonal() * eig.vectors.adjoint();
  return {0.5 * (out + out.adjoint()), m.space()};
}

int numerical_rank(const ComplexOperator& m, double rank_tol) {
  const auto eig = eigh(m, 1e-10);
  if (eig.values.size() == 0) return 0;
  const double cut = rank_tol * eig.values.cwiseAbs().maxCoeff();
  int rank = 0;
  for (Index i = 0; i < eig.values.size(); ++i) {
    if (std::abs(eig.values[i]) > cut) ++rank;
  }
  return rank;
}

double spectral_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  if (std::min(m.rows(), m.cols()) <= 64) {
    Eigen::JacobiSVD<Matrix> svd(m);
    return svd.singularValues()(0);
  }
  const Matrix gram = m.cols() <= m.rows() ? Matrix(m.adjoint() * m)
                                           : Matrix(m * m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, solver.eigenvalues().maxCoeff()));
}

double spectral_norm(const ComplexOperator& m) {
  return spectral_norm(m.matrix());
}

double min_eigenvalue(const ComplexOperator& m) {
  const auto eig = eigh(m, 1e-9);
  return eig.values.size() ? eig.values.minCoeff() : 0.0;
}

double max_eigenvalue(const ComplexOperator& m) {
  const auto eig = eigh(m, 1e-9);
  return eig.values.size() ? eig.values.maxCoeff() : 0.0;
}

ComplexOperator hermitian_part(const ComplexOperator& m) {
  return {0.5 * (m.matrix() + m.matrix().adjoint()), m.space()};
}

Complex inner(const ComplexOperator& a, const ComplexOperator& b) {
  if (a.dim() != b.dim()) throw DimensionError("inner: dimension mismatch");
  return (a.matrix().conjugate().cwiseProduct(b.matrix())).sum();
}

Complex trace_product(const ComplexOperator& a, const ComplexOperator& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("trace_product: dimension mismatch");
  }
  return (a.matrix().transpose().cwiseProduct(b.matrix())).sum();
}

ComplexOperator outer(const Vector& v, const SubsystemSpace& space) {
  return {v * v.adjoint(), space};
}

}  // namespace epp
