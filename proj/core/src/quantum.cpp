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

#include "epp/quantum.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epp {

namespace {

using Index = Eigen::Index;

void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) {
    throw Error("depolarizing: gamma must lie in [0, 1], got " +
                std::to_string(gamma));
  }
}

// Depolarizes subsystem k in place of a (not necessarily Hermitian) operator.
Matrix depolarize_one(const Matrix& x, const SubsystemSpace& space, int k,
                      double gamma) {
  const int d = space.dim(k);
  Index stride = 1;
  for (int q = space.count() - 1; q > k; --q) stride *= space.dim(q);
  const double mix = (1.0 - gamma) / d;
  Matrix out = gamma * x;
  if (mix == 0.0) return out;
  for (Index c = 0; c < x.cols(); ++c) {
    const Index ck = (c / stride) % d;
    const Index c0 = c - ck * stride;
    for (Index r = 0; r < x.rows(); ++r) {
      const Index rk = (r / stride) % d;
      if (rk != ck) continue;
      const Index r0 = r - rk * stride;
      Complex acc = 0.0;
      for (int t = 0; t < d; ++t) acc += x(r0 + t * stride, c0 + t * stride);
      out(r, c) += mix * acc;
    }
  }
  return out;
}

}  // namespace

ChannelRep::ChannelRep(ComplexOperator choi_, SubsystemSpace in_,
                       SubsystemSpace out_)
    : choi(std::move(choi_)), in(std::move(in_)), out(std::move(out_)) {
  if (!(choi.space() == in.concat(out))) {
    throw DimensionError("ChannelRep: Choi space " + choi.space().to_string() +
                         " does not match in ⊗ out");
  }
}

std::vector<int> ChannelRep::input_indices() const {
  std::vector<int> idx(static_cast<std::size_t>(in.count()));
  std::iota(idx.begin(), idx.end(), 0);
  return idx;
}

ComplexOperator ChannelRep::trace_out() const {
  return partial_trace(choi, input_indices());
}

ComplexOperator depolarizing_apply(const ComplexOperator& x, double gamma) {
  check_gamma(gamma);
  if (x.matrix().rows() != x.matrix().cols()) {
    throw DimensionError("depolarizing_apply: operator must be square");
  }
  const double d = static_cast<double>(x.dim());
  Matrix out = gamma * x.matrix();
  out.diagonal().array() += (1.0 - gamma) * x.trace() / d;
  return {std::move(out), x.space()};
}

ComplexOperator depolarize_subsystems(const ComplexOperator& x, double gamma,
                                      std::span<const int> subsystems) {
  check_gamma(gamma);
  Matrix m = x.matrix();
  for (int k : subsystems) {
    if (k < 0 || k >= x.space().count()) {
      throw DimensionError("depolarize_subsystems: index out of range");
    }
    m = depolarize_one(m, x.space(), k, gamma);
  }
  return {std::move(m), x.space()};
}

ComplexOperator permutation_operator(int d, std::span<const int> perm) {
  const int k = static_cast<int>(perm.size());
  const auto space = SubsystemSpace::uniform(d, k);
  const Index dim = space.total();
  std::vector<Index> strides(static_cast<std::size_t>(k), 1);
  for (int q = k - 2; q >= 0; --q) strides[q] = strides[q + 1] * d;
  Matrix w = Matrix::Zero(dim, dim);
  for (Index i = 0; i < dim; ++i) {
    Index j = 0;
    for (int m = 0; m < k; ++m) j += ((i / strides[perm[m]]) % d) * strides[m];
    w(j, i) = 1.0;
  }
  return {std::move(w), space};
}

ComplexOperator sym_projector(int d, int k) {
  if (d < 1 || k < 1) throw DimensionError("sym_projector: need d ≥ 1, k ≥ 1");
  std::vector<int> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  const auto space = SubsystemSpace::uniform(d, k);
  Matrix acc = Matrix::Zero(space.total(), space.total());
  double count = 0.0;
  do {
    acc += permutation_operator(d, perm).matrix();
    count += 1.0;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return {acc / count, space};
}

ComplexOperator sym_mixed_state(int d, int k) {
  auto p = sym_projector(d, k);
  const double tr = p.trace().real();
  return p * Complex(1.0 / tr);
}

Vector haar_random_vector(int d, CounterRng& rng) {
  Vector v(d);
  for (int i = 0; i < d; ++i) {
    const double re = rng.normal();
    const double im = rng.normal();
    v[i] = Complex(re, im);
  }
  return v / v.norm();
}

ComplexOperator haar_random_state(int d, CounterRng& rng) {
  const Vector v = haar_random_vector(d, rng);
  return outer(v, SubsystemSpace({d}));
}

ComplexOperator haar_random_state(int d, std::uint64_t seed) {
  CounterRng rng(seed);
  return haar_random_state(d, rng);
}

Matrix haar_random_unitary(int d, CounterRng& rng) {
  Matrix g(d, d);
  for (int c = 0; c < d; ++c) {
    for (int r = 0; r < d; ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(r, c) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix rmat = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < d; ++i) {
    const Complex diag = rmat(i, i);
    const double mag = std::abs(diag);
    if (mag > 0) q.col(i) *= diag / mag;
  }
  return q;
}

ComplexOperator choi_of_identity(const SubsystemSpace& space) {
  const Index dim = space.total();
  Vector omega = Vector::Zero(dim * dim);
  for (Index i = 0; i < dim; ++i) omega[i * dim + i] = 1.0;
  return outer(omega, space.concat(space));
}

ComplexOperator choi_of_identity(int dim) {
  return choi_of_identity(SubsystemSpace({dim}));
}

ComplexOperator choi_from_action(
    const std::function<ComplexOperator(const ComplexOperator&)>& action,
    const SubsystemSpace& in, const SubsystemSpace& out) {
  const Index din = in.total();
  const Index dout = out.total();
  Matrix choi = Matrix::Zero(din * dout, din * dout);
  for (Index i = 0; i < din; ++i) {
    for (Index j = 0; j < din; ++j) {
      Matrix e = Matrix::Zero(din, din);
      e(i, j) = 1.0;
      const ComplexOperator image = action(ComplexOperator(e, in));
      if (image.dim() != dout) {
        throw DimensionError("choi_from_action: action output has wrong size");
      }
      choi.block(i * dout, j * dout, dout, dout) = image.matrix();
    }
  }
  return {std::move(choi), in.concat(out)};
}

ComplexOperator choi_from_kraus(std::span<const ComplexOperator> kraus) {
  if (kraus.empty()) throw DimensionError("choi_from_kraus: empty Kraus list");
  const auto& space = kraus.front().space();
  const Index dim = space.total();
  Matrix choi = Matrix::Zero(dim * dim, dim * dim);
  Vector v(dim * dim);
  for (const auto& m : kraus) {
    if (!(m.space() == space)) {
      throw DimensionError("choi_from_kraus: Kraus operators on different spaces");
    }
    for (Index i = 0; i < dim; ++i) {
      for (Index a = 0; a < dim; ++a) v[i * dim + a] = m(a, i);
    }
    choi.noalias() += v * v.adjoint();
  }
  return {std::move(choi), space.concat(space)};
}

ComplexOperator apply_channel_via_choi(const ComplexOperator& choi,
                                       const SubsystemSpace& out,
                                       const ComplexOperator& rho) {
  const Index din = rho.dim();
  const Index dout = out.total();
  if (choi.dim() != din * dout) {
    throw DimensionError("apply_channel_via_choi: Choi dimension " +
                         std::to_string(choi.dim()) + " != " +
                         std::to_string(din) + "·" + std::to_string(dout));
  }
  Matrix result = Matrix::Zero(dout, dout);
  const Matrix& g = choi.matrix();
  const Matrix& r = rho.matrix();
  for (Index j = 0; j < din; ++j) {
    for (Index i = 0; i < din; ++i) {
      const Complex w = r(i, j);
      if (w == Complex(0.0)) continue;
      result.noalias() += w * g.block(i * dout, j * dout, dout, dout);
    }
  }
  return {std::move(result), out};
}

ComplexOperator choi_trace_out(const ComplexOperator& choi, int out_count) {
  const int total = choi.space().count();
  if (out_count < 0 || out_count > total) {
    throw DimensionError("choi_trace_out: bad output count");
  }
  std::vector<int> keep(static_cast<std::size_t>(total - out_count));
  std::iota(keep.begin(), keep.end(), 0);
  return partial_trace(choi, keep);
}

bool ChoiValidity::cptn(double tol) const {
  return psd_min_eig >= -tol && trout_excess <= tol;
}

bool ChoiValidity::cptp(double tol) const {
  return psd_min_eig >= -tol && trout_deficit <= tol;
}

ChoiValidity check_choi(const ComplexOperator& choi, int out_count) {
  ChoiValidity v;
  v.psd_min_eig = min_eigenvalue(hermitian_part(choi));
  const auto marginal = hermitian_part(choi_trace_out(choi, out_count));
  const auto eig = eigh(marginal);
  v.trout_excess = eig.values.size() ? eig.values.maxCoeff() - 1.0 : 0.0;
  v.trout_deficit = spectral_norm(
      marginal.matrix() - Matrix::Identity(marginal.dim(), marginal.dim()));
  return v;
}

}  // namespace epp
