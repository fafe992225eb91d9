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

#include "epp/synthesis.hpp"

#include <cmath>

#include "epp/quantum.hpp"

namespace epp {

namespace {

using Index = Eigen::Index;

constexpr double kCompletionThreshold = 1e-6;

void require_square_choi(const ComplexOperator& choi, const EnergyStructure& es,
                         const char* where) {
  if (choi.dim() != es.dim() * es.dim()) {
    throw DimensionError(std::string(where) + ": Choi dimension " +
                         std::to_string(choi.dim()) + " does not match H (" +
                         std::to_string(es.dim()) + ")");
  }
}

void require_energy_preserving(const ComplexOperator& choi,
                               const EnergyStructure& es, const char* where) {
  const auto rep = is_energy_preserving(choi, es, 1e-8);
  if (!rep.energy_preserving) {
    throw Error(std::string(where) + ": Γ is not energy preserving (residual " +
                std::to_string(rep.sandwich_residual) + ")");
  }
}

}  // namespace

std::vector<ComplexOperator> kraus_from_choi(const ComplexOperator& choi,
                                             const SubsystemSpace& space,
                                             double rank_tol) {
  const Index dim = space.total();
  if (choi.dim() != dim * dim) {
    throw DimensionError("kraus_from_choi: Choi dimension does not match space");
  }
  const auto eig = eigh(choi, 1e-9);
  if (eig.values.size() == 0) return {};
  const double top = eig.values.maxCoeff();
  if (eig.values.minCoeff() < -1e-9 * std::max(1.0, top)) {
    throw NumericalError("kraus_from_choi: Choi operator is not positive (λ_min = " +
                         std::to_string(eig.values.minCoeff()) + ")");
  }
  std::vector<ComplexOperator> out;
  if (top <= 0.0) return out;
  for (Index k = eig.values.size() - 1; k >= 0; --k) {
    if (eig.values[k] <= rank_tol * top) break;
    const Vector v = std::sqrt(eig.values[k]) * eig.vectors.col(k);
    Matrix m(dim, dim);
    for (Index i = 0; i < dim; ++i) {
      for (Index a = 0; a < dim; ++a) m(a, i) = v[i * dim + a];
    }
    out.emplace_back(std::move(m), space);
  }
  return out;
}

Matrix instrument_eigenbasis(const ComplexOperator& choi_star,
                             const EnergyStructure& es) {
  require_square_choi(choi_star, es, "instrument_eigenbasis");
  const Matrix effect =
      choi_trace_out(choi_star, es.space().count()).matrix().transpose();
  Matrix basis = es.eigenbasis();
  for (int c = 0; c < es.cluster_count(); ++c) {
    const auto cols = es.cluster_columns(c);
    if (cols.size() < 2) continue;
    Matrix vc(basis.rows(), static_cast<Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) vc.col(k) = basis.col(cols[k]);
    const auto eig = eigh(Matrix(vc.adjoint() * effect * vc), 1e-8);
    const Matrix rotated = vc * eig.vectors;
    for (std::size_t k = 0; k < cols.size(); ++k) basis.col(cols[k]) = rotated.col(k);
  }
  return basis;
}

ComplexOperator complement_choi(const ComplexOperator& choi_star,
                                const EnergyStructure& es) {
  require_square_choi(choi_star, es, "complement_choi");
  require_energy_preserving(choi_star, es, "complement_choi");
  const Matrix basis = instrument_eigenbasis(choi_star, es);
  const auto& space = es.space();
  const Index dim = es.dim();

  Matrix acc = Matrix::Zero(dim * dim, dim * dim);
  for (Index i = 0; i < dim; ++i) {
    const Vector v = basis.col(i);
    const auto image = apply_channel_via_choi(choi_star, space, outer(v, space));
    const double t = image.trace().real();
    Matrix rho;
    if (t > 1e-12) {
      rho = image.matrix() / t - image.matrix();
    } else {
      rho = v * v.adjoint();
    }
    const Vector vbar = v.conjugate();
    acc += kron(ComplexOperator(Matrix(vbar * vbar.adjoint())), ComplexOperator(rho))
               .matrix();
  }
  return {0.5 * (acc + acc.adjoint()), space.concat(space)};
}

DilationSpec build_dilation(const ComplexOperator& choi_star,
                            const EnergyStructure& es, double rank_tol) {
  require_square_choi(choi_star, es, "build_dilation");
  const auto complement = complement_choi(choi_star, es);
  return build_dilation_from_kraus(kraus_from_choi(choi_star, es.space(), rank_tol),
                                   kraus_from_choi(complement, es.space(), rank_tol),
                                   es);
}

DilationSpec build_dilation_from_kraus(std::vector<ComplexOperator> success,
                                       std::vector<ComplexOperator> fail,
                                       const EnergyStructure& es) {
  const Index dim = es.dim();
  const Matrix& h = es.hamiltonian().matrix();
  const double h_scale = std::max(1.0, spectral_norm(h));

  std::vector<Matrix> all;
  for (auto* list : {&success, &fail}) {
    for (auto& k : *list) {
      if (k.dim() != dim) throw DimensionError("build_dilation: Kraus dimension");
      const double comm = spectral_norm(Matrix(k.matrix() * h - h * k.matrix()));
      if (comm > 1e-6 * h_scale) {
        throw Error("build_dilation: Kraus operator does not commute with H "
                    "(residual " + std::to_string(comm) + ")");
      }
      k = es.block_diagonal_part(k);
      all.push_back(k.matrix());
    }
  }
  const int m = static_cast<int>(all.size());
  if (m == 0) throw Error("build_dilation: no Kraus operators");

  Matrix completeness = -Matrix::Identity(dim, dim);
  for (const auto& k : all) completeness += k.adjoint() * k;
  const double defect = spectral_norm(completeness);
  if (defect > 1e-8) {
    throw NumericalError("build_dilation: prescribed images are not orthonormal "
                         "(‖Σ M†M − I‖ = " + std::to_string(defect) + ")");
  }

  const Index big = dim * m;
  const Matrix& v = es.eigenbasis();
  Matrix u = Matrix::Zero(big, big);
  for (int c = 0; c < es.cluster_count(); ++c) {
    const auto cols = es.cluster_columns(c);
    const Index g = static_cast<Index>(cols.size());
    Matrix images(big, g * m);
    Index filled = 0;
    for (int i : cols) {
      Vector w = Vector::Zero(big);
      for (int k = 0; k < m; ++k) {
        const Vector mv = all[k] * v.col(i);
        for (Index a = 0; a < dim; ++a) w[a * m + k] = mv[a];
      }
      images.col(filled++) = w;
    }
    for (int i : cols) {
      for (int k = 0; k < m && filled < g * m; ++k) {
        Vector cand = Vector::Zero(big);
        for (Index a = 0; a < dim; ++a) cand[a * m + k] = v(a, i);
        for (int pass = 0; pass < 2; ++pass) {
          const auto q = images.leftCols(filled);
          cand -= q * (q.adjoint() * cand);
        }
        const double norm = cand.norm();
        if (norm > kCompletionThreshold) images.col(filled++) = cand / norm;
      }
    }
    if (filled != g * m) {
      throw NumericalError("build_dilation: basis completion fell short in an "
                           "energy block");
    }
    // Source ordering: (i, φ₁) for every i first, then (i, φ_k≥2) in order.
    Index slot = 0;
    Index extra = g;
    for (int i : cols) {
      for (int k = 0; k < m; ++k) {
        const Index target = k == 0 ? slot++ : extra++;
        Vector src = Vector::Zero(big);
        for (Index a = 0; a < dim; ++a) src[a * m + k] = v(a, i);
        u.noalias() += images.col(target) * src.adjoint();
      }
    }
  }

  DilationSpec spec;
  spec.kraus_success = std::move(success);
  spec.kraus_fail = std::move(fail);
  spec.hamiltonian = es.hamiltonian();
  spec.env_dim = m;
  spec.unitary = std::move(u);
  spec.q_env = Matrix::Zero(m, m);
  for (std::size_t k = 0; k < spec.kraus_success.size(); ++k) {
    spec.q_env(static_cast<Index>(k), static_cast<Index>(k)) = 1.0;
  }
  return spec;
}

ComplexOperator dilation_choi(const DilationSpec& spec) {
  const Index dim = spec.system_dim();
  const Index m = spec.env_dim;
  const Index ground = spec.ground_index - 1;
  if (spec.unitary.rows() != dim * m || spec.q_env.rows() != m) {
    throw DimensionError("dilation_choi: inconsistent dilation dimensions");
  }
  // W_a(x, l) = ⟨x, φ_l| U |a, φ₁⟩.
  std::vector<Matrix> w(static_cast<std::size_t>(dim), Matrix(dim, m));
  for (Index a = 0; a < dim; ++a) {
    const auto col = spec.unitary.col(a * m + ground);
    for (Index x = 0; x < dim; ++x) {
      for (Index l = 0; l < m; ++l) w[a](x, l) = col[x * m + l];
    }
  }
  const Matrix qt = spec.q_env.transpose();
  Matrix choi(dim * dim, dim * dim);
  for (Index a = 0; a < dim; ++a) {
    const Matrix left = w[a] * qt;
    for (Index b = 0; b < dim; ++b) {
      choi.block(a * dim, b * dim, dim, dim) = left * w[b].adjoint();
    }
  }
  const auto& space = spec.hamiltonian.space();
  return {std::move(choi), space.concat(space)};
}

bool DilationReport::passed(double tol) const {
  return choi_residual <= tol && unitarity_residual <= tol &&
         commutator_residual <= tol && isometry_residual <= tol;
}

DilationReport verify_dilation(const DilationSpec& spec,
                               const ComplexOperator& choi_star) {
  DilationReport rep;
  const Index dim = spec.system_dim();
  const Index m = spec.env_dim;
  const Index big = dim * m;
  const Matrix& u = spec.unitary;

  rep.choi_residual =
      spectral_norm(Matrix(dilation_choi(spec).matrix() - choi_star.matrix()));
  rep.unitarity_residual =
      spectral_norm(Matrix(u.adjoint() * u - Matrix::Identity(big, big)));
  const Matrix h_big = kron(spec.hamiltonian,
                            ComplexOperator(Matrix::Identity(m, m)))
                           .matrix();
  rep.commutator_residual = spectral_norm(Matrix(u * h_big - h_big * u));

  std::vector<const ComplexOperator*> all;
  for (const auto& k : spec.kraus_success) all.push_back(&k);
  for (const auto& k : spec.kraus_fail) all.push_back(&k);
  const Index ground = spec.ground_index - 1;
  for (Index i = 0; i < dim; ++i) {
    Vector expected = Vector::Zero(big);
    for (Index k = 0; k < static_cast<Index>(all.size()) && k < m; ++k) {
      const auto col = all[k]->matrix().col(i);
      for (Index a = 0; a < dim; ++a) expected[a * m + k] = col[a];
    }
    rep.isometry_residual = std::max(
        rep.isometry_residual, (u.col(i * m + ground) - expected).norm());
  }
  return rep;
}

nlohmann::json matrix_to_json(const Matrix& m) {
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) {
      re.push_back(m(r, c).real());
      im.push_back(m(r, c).imag());
    }
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

Matrix matrix_from_json(const nlohmann::json& j) {
  const Index rows = j.at("rows").get<Index>();
  const Index cols = j.at("cols").get<Index>();
  const auto& re = j.at("re");
  const auto& im = j.at("im");
  if (static_cast<Index>(re.size()) != rows * cols ||
      static_cast<Index>(im.size()) != rows * cols) {
    throw Error("matrix_from_json: entry count does not match shape");
  }
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    for (Index c = 0; c < cols; ++c) {
      const auto k = static_cast<std::size_t>(r * cols + c);
      m(r, c) = Complex(re[k].get<double>(), im[k].get<double>());
    }
  }
  return m;
}

nlohmann::json dilation_to_json(const DilationSpec& spec) {
  auto list = [](const std::vector<ComplexOperator>& ops) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& k : ops) arr.push_back(matrix_to_json(k.matrix()));
    return arr;
  };
  return {{"format", "epp-dilation-v1"},
          {"system_dims", spec.hamiltonian.space().dims()},
          {"env_dim", spec.env_dim},
          {"ground_index", spec.ground_index},
          {"hamiltonian", matrix_to_json(spec.hamiltonian.matrix())},
          {"kraus_success", list(spec.kraus_success)},
          {"kraus_fail", list(spec.kraus_fail)},
          {"unitary", matrix_to_json(spec.unitary)},
          {"q_env", matrix_to_json(spec.q_env)}};
}

DilationSpec dilation_from_json(const nlohmann::json& j) {
  if (j.value("format", std::string()) != "epp-dilation-v1") {
    throw Error("dilation_from_json: unknown format");
  }
  DilationSpec spec;
  const SubsystemSpace space(j.at("system_dims").get<std::vector<int>>());
  spec.hamiltonian = ComplexOperator(matrix_from_json(j.at("hamiltonian")), space);
  for (const auto& k : j.at("kraus_success")) {
    spec.kraus_success.emplace_back(matrix_from_json(k), space);
  }
  for (const auto& k : j.at("kraus_fail")) {
    spec.kraus_fail.emplace_back(matrix_from_json(k), space);
  }
  spec.env_dim = j.at("env_dim").get<int>();
  spec.ground_index = j.at("ground_index").get<int>();
  spec.unitary = matrix_from_json(j.at("unitary"));
  spec.q_env = matrix_from_json(j.at("q_env"));
  return spec;
}

}  // namespace epp
