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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include <Eigen/SVD>

#include "epp/operator.hpp"

namespace epp {
namespace {

Matrix random_matrix(Eigen::Index dim, std::mt19937_64& gen) {
  std::normal_distribution<double> g;
  Matrix m(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = Complex(g(gen), g(gen));
  }
  return m;
}

ComplexOperator random_op(const SubsystemSpace& space, std::mt19937_64& gen) {
  return ComplexOperator(random_matrix(space.total(), gen), space);
}

// Mixed-radix digits, most significant subsystem first.
std::vector<int> digits(Eigen::Index idx, const std::vector<int>& dims) {
  std::vector<int> out(dims.size());
  for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
    out[k] = static_cast<int>(idx % dims[k]);
    idx /= dims[k];
  }
  return out;
}

Eigen::Index index_of(const std::vector<int>& dig, const std::vector<int>& dims) {
  Eigen::Index idx = 0;
  for (std::size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + dig[k];
  return idx;
}

// Brute-force partial trace keeping `keep`, element by element.
Matrix naive_partial_trace(const ComplexOperator& m, const std::vector<int>& keep) {
  const auto& dims = m.space().dims();
  std::vector<int> kdims;
  for (int k : keep) kdims.push_back(dims[k]);
  Eigen::Index kt = 1;
  for (int v : kdims) kt *= v;
  Matrix out = Matrix::Zero(kt, kt);
  for (Eigen::Index r = 0; r < m.dim(); ++r) {
    for (Eigen::Index c = 0; c < m.dim(); ++c) {
      const auto dr = digits(r, dims);
      const auto dc = digits(c, dims);
      bool diag = true;
      for (std::size_t k = 0; k < dims.size(); ++k) {
        if (std::find(keep.begin(), keep.end(), static_cast<int>(k)) != keep.end()) continue;
        if (dr[k] != dc[k]) diag = false;
      }
      if (!diag) continue;
      std::vector<int> kr, kc;
      for (int k : keep) {
        kr.push_back(dr[k]);
        kc.push_back(dc[k]);
      }
      out(index_of(kr, kdims), index_of(kc, kdims)) += m(r, c);
    }
  }
  return out;
}

TEST(SubsystemSpace, TotalsAndSelection) {
  const SubsystemSpace s{2, 3, 4};
  EXPECT_EQ(s.total(), 24);
  EXPECT_EQ(s.count(), 3);
  const std::vector<int> pick{2, 0};
  EXPECT_EQ(s.select(pick), (SubsystemSpace{4, 2}));
  EXPECT_EQ(s.concat(SubsystemSpace{5}).total(), 120);
  EXPECT_EQ(SubsystemSpace::uniform(2, 3), (SubsystemSpace{2, 2, 2}));
  EXPECT_THROW(SubsystemSpace({2, 0}), DimensionError);
}

TEST(ComplexOperator, RejectsMismatchedSpace) {
  EXPECT_THROW(ComplexOperator(Matrix::Identity(3, 3), SubsystemSpace{2}), DimensionError);
  EXPECT_THROW(ComplexOperator(Matrix::Identity(2, 3)), DimensionError);
  ComplexOperator a(Matrix::Identity(2, 2));
  ComplexOperator b(Matrix::Identity(4, 4), SubsystemSpace{2, 2});
  EXPECT_THROW(a + b, DimensionError);
}

TEST(Kron, MatchesEigenKroneckerAndSpaces) {
  std::mt19937_64 gen(11);
  const auto a = random_op(SubsystemSpace{2}, gen);
  const auto b = random_op(SubsystemSpace{3}, gen);
  const auto ab = kron(a, b);
  EXPECT_EQ(ab.space(), (SubsystemSpace{2, 3}));
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Matrix blk = ab.matrix().block(3 * i, 3 * j, 3, 3);
      EXPECT_LT((blk - a(i, j) * b.matrix()).norm(), 1e-12);
    }
  }
}

TEST(PartialTrace, MatchesBruteForceOnMixedDims) {
  std::mt19937_64 gen(5);
  const SubsystemSpace s{2, 3, 2};
  const auto m = random_op(s, gen);
  for (const std::vector<int>& keep :
       {std::vector<int>{0}, std::vector<int>{1}, std::vector<int>{2},
        std::vector<int>{0, 2}, std::vector<int>{1, 2}, std::vector<int>{}}) {
    const auto pt = partial_trace(m, keep);
    EXPECT_LT((pt.matrix() - naive_partial_trace(m, keep)).norm(), 1e-11)
        << "keep size " << keep.size();
  }
}

TEST(PartialTrace, ProductStateProperty) {
  std::mt19937_64 gen(6);
  const auto a = random_op(SubsystemSpace{3}, gen);
  const auto b = random_op(SubsystemSpace{2}, gen);
  const auto pt = partial_trace(kron(a, b), {0});
  EXPECT_LT((pt.matrix() - b.trace() * a.matrix()).norm(), 1e-11);
}

TEST(PartialTranspose, TwiceIsIdentityAndFullIsTranspose) {
  std::mt19937_64 gen(7);
  const SubsystemSpace s{2, 3, 2};
  const auto m = random_op(s, gen);
  const auto once = partial_transpose(m, {1});
  EXPECT_LT((partial_transpose(once, {1}).matrix() - m.matrix()).norm(), 1e-12);
  EXPECT_LT((partial_transpose(m, {0, 1, 2}).matrix() - m.matrix().transpose()).norm(),
            1e-12);
  const auto a = random_op(SubsystemSpace{2}, gen);
  const auto b = random_op(SubsystemSpace{3}, gen);
  const auto pt = partial_transpose(kron(a, b), {0});
  EXPECT_LT((pt.matrix() - kron(a.transpose(), b).matrix()).norm(), 1e-12);
}

TEST(PermuteSubsystems, SwapsProductFactors) {
  std::mt19937_64 gen(8);
  const auto a = random_op(SubsystemSpace{2}, gen);
  const auto b = random_op(SubsystemSpace{3}, gen);
  const auto c = random_op(SubsystemSpace{4}, gen);
  const std::vector<ComplexOperator> abc{a, b, c};
  const auto m = kron(abc);
  const auto p = permute_subsystems(m, {2, 0, 1});
  const std::vector<ComplexOperator> cab{c, a, b};
  EXPECT_EQ(p.space(), (SubsystemSpace{4, 2, 3}));
  EXPECT_LT((p.matrix() - kron(cab).matrix()).norm(), 1e-11);
  EXPECT_THROW(permute_subsystems(m, {0, 0, 1}), DimensionError);
}

TEST(PermuteSubsystems, InverseRoundTrip) {
  std::mt19937_64 gen(9);
  const SubsystemSpace s{2, 3, 2, 2};
  const auto m = random_op(s, gen);
  std::vector<int> perm{3, 1, 0, 2};
  std::vector<int> inv(perm.size());
  for (std::size_t k = 0; k < perm.size(); ++k) inv[perm[k]] = static_cast<int>(k);
  const auto back = permute_subsystems(permute_subsystems(m, perm), inv);
  EXPECT_LT((back.matrix() - m.matrix()).norm(), 1e-12);
}

TEST(Eigh, ReconstructsAndSortsAscending) {
  std::mt19937_64 gen(10);
  const Matrix x = random_matrix(6, gen);
  const ComplexOperator h(Matrix((x + x.adjoint()) / 2.0));
  const auto e = eigh(h);
  for (int k = 1; k < 6; ++k) EXPECT_LE(e.values(k - 1), e.values(k));
  const Matrix rec = e.vectors * e.values.cast<Complex>().asDiagonal() * e.vectors.adjoint();
  EXPECT_LT((rec - h.matrix()).norm(), 1e-11);
  EXPECT_THROW(eigh(ComplexOperator(x)), Error);
}

TEST(MatrixFunctions, SqrtAndPseudoInverseOnRankDeficientPsd) {
  std::mt19937_64 gen(12);
  const Matrix g = random_matrix(5, gen).leftCols(3);
  const ComplexOperator p(Matrix(g * g.adjoint()));
  EXPECT_EQ(numerical_rank(p), 3);
  const auto r = psd_sqrt(p);
  EXPECT_LT((r.matrix() * r.matrix() - p.matrix()).norm(), 1e-10);
  const auto ri = psd_sqrt_pinv(p);
  const auto proj = support_projector(p);
  EXPECT_LT((r.matrix() * ri.matrix() - proj.matrix()).norm(), 1e-9);
  EXPECT_LT((proj.matrix() * proj.matrix() - proj.matrix()).norm(), 1e-10);
  EXPECT_NEAR(proj.trace().real(), 3.0, 1e-10);
  EXPECT_LT((proj.matrix() * g - g).norm(), 1e-9);
}

TEST(Scalars, TraceProductNormsAndExtremes) {
  std::mt19937_64 gen(13);
  const auto a = random_op(SubsystemSpace{4}, gen);
  const auto b = random_op(SubsystemSpace{4}, gen);
  EXPECT_LT(std::abs(trace_product(a, b) - (a.matrix() * b.matrix()).trace()), 1e-11);
  EXPECT_LT(std::abs(inner(a, b) - (a.matrix().adjoint() * b.matrix()).trace()), 1e-11);
  const ComplexOperator d(Matrix(RealVector::LinSpaced(4, -1.5, 3.0).cast<Complex>().asDiagonal()));
  EXPECT_NEAR(min_eigenvalue(d), -1.5, 1e-12);
  EXPECT_NEAR(max_eigenvalue(d), 3.0, 1e-12);
  EXPECT_NEAR(spectral_norm(d), 3.0, 1e-12);
  Vector v = Vector::Zero(4);
  v(2) = 1.0;
  EXPECT_NEAR(trace_product(outer(v, SubsystemSpace{2, 2}), d).real(), 1.5, 1e-12);
}

ComplexOperator diag_op(std::initializer_list<double> v) {
  RealVector d(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) d(k++) = x;
  return ComplexOperator(Matrix(d.cast<Complex>().asDiagonal()));
}

ComplexOperator bell_projector() {
  Vector phi = Vector::Zero(4);
  phi(0) = phi(3) = 1.0 / std::sqrt(2.0);
  return outer(phi, SubsystemSpace{2, 2});
}

ComplexOperator pauli_x() {
  Matrix x(2, 2);
  x << 0, 1, 1, 0;
  return ComplexOperator(x);
}

ComplexOperator pauli_z() { return diag_op({1.0, -1.0}); }

TEST(KronExamples, IdentityDiagonalAndZZ) {
  const auto i2 = ComplexOperator::identity(SubsystemSpace{2});
  EXPECT_EQ(kron(i2, i2).matrix(), Matrix(Matrix::Identity(4, 4)));
  EXPECT_LT((kron(diag_op({1, 2}), diag_op({3, 4})).matrix() -
             diag_op({3, 4, 6, 8}).matrix())
                .norm(),
            1e-15);
  const auto zz = eigh(kron(pauli_z(), pauli_z()));
  EXPECT_NEAR(zz.values(0), -1.0, 1e-15);
  EXPECT_NEAR(zz.values(1), -1.0, 1e-15);
  EXPECT_NEAR(zz.values(2), 1.0, 1e-15);
  EXPECT_NEAR(zz.values(3), 1.0, 1e-15);
}

TEST(PartialTraceExamples, IdentityChoiAndBellMarginals) {
  Matrix gid = Matrix::Zero(4, 4);
  gid(0, 0) = gid(0, 3) = gid(3, 0) = gid(3, 3) = 1.0;
  const ComplexOperator g(gid, SubsystemSpace{2, 2});
  EXPECT_LT((partial_trace(g, {0}).matrix() - Matrix::Identity(2, 2)).norm(), 1e-15);
  EXPECT_LT((partial_trace(bell_projector(), {1}).matrix() - Matrix::Identity(2, 2) / 2.0)
                .norm(),
            1e-15);
}

TEST(PartialTransposeExamples, EmptySubsetAndBellNegativity) {
  std::mt19937_64 gen(31);
  const auto m = random_op(SubsystemSpace{2, 3}, gen);
  EXPECT_EQ(partial_transpose(m, std::span<const int>{}).matrix(), m.matrix());
  const auto e = eigh(partial_transpose(bell_projector(), {1}));
  EXPECT_NEAR(e.values(0), -0.5, 1e-14);
  EXPECT_GT(e.values(1), 0.0);
}

TEST(PermuteExamples, IdentityPermAndSpectrumPreserved) {
  std::mt19937_64 gen(32);
  const Matrix x = random_matrix(12, gen);
  const ComplexOperator h(Matrix((x + x.adjoint()) / 2.0), SubsystemSpace{2, 3, 2});
  EXPECT_EQ(permute_subsystems(h, {0, 1, 2}).matrix(), h.matrix());
  const auto before = eigh(h).values;
  const auto after = eigh(permute_subsystems(h, {1, 2, 0})).values;
  EXPECT_LT((before - after).norm(), 1e-11);
  const auto a = pauli_x();
  const auto b = diag_op({2.0, 5.0});
  EXPECT_LT((permute_subsystems(kron(a, b), {1, 0}).matrix() - kron(b, a).matrix()).norm(),
            1e-15);
}

TEST(EighExamples, SmallCases) {
  const auto e = eigh(diag_op({3, 1, 2}));
  EXPECT_NEAR(e.values(0), 1.0, 1e-15);
  EXPECT_NEAR(e.values(1), 2.0, 1e-15);
  EXPECT_NEAR(e.values(2), 3.0, 1e-15);
  const auto x = eigh(pauli_x());
  EXPECT_NEAR(x.values(0), -1.0, 1e-15);
  EXPECT_NEAR(x.values(1), 1.0, 1e-15);
  std::mt19937_64 gen(33);
  const Matrix g = random_matrix(16, gen);
  const Matrix h = (g + g.adjoint()) / 2.0;
  const auto big = eigh(h);
  const Matrix rec =
      big.vectors * big.values.cast<Complex>().asDiagonal() * big.vectors.adjoint();
  EXPECT_LT((rec - h).norm(), 1e-10);
}

TEST(PseudoInverseExamples, DiagonalAndIdentity) {
  EXPECT_LT((psd_sqrt_pinv(diag_op({4.0, 0.0})).matrix() - diag_op({0.5, 0.0}).matrix()).norm(),
            1e-15);
  EXPECT_LT((psd_sqrt_pinv(ComplexOperator::identity(SubsystemSpace{3})).matrix() -
             Matrix::Identity(3, 3))
                .norm(),
            1e-14);
}

TEST(SpectralNormExamples, DiagonalZeroAndSvdOracle) {
  EXPECT_NEAR(spectral_norm(diag_op({1, 2, 3})), 3.0, 1e-15);
  EXPECT_EQ(spectral_norm(ComplexOperator::zero(SubsystemSpace{4})), 0.0);
  std::mt19937_64 gen(34);
  const Matrix m = random_matrix(8, gen);
  Eigen::JacobiSVD<Matrix> svd(m);
  EXPECT_NEAR(spectral_norm(m), svd.singularValues()(0), 1e-11);
}

}  // namespace
}  // namespace epp
