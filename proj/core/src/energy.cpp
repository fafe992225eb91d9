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

#include "epp/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "epp/quantum.hpp"

namespace epp {

std::vector<int> EnergyStructure::degeneracies() const {
  std::vector<int> out(energies_.size(), 0);
  for (int c : cluster_of_) ++out[c];
  return out;
}

std::string EnergyStructure::degeneracy_pattern() const {
  std::ostringstream os;
  const auto deg = degeneracies();
  for (std::size_t k = 0; k < deg.size(); ++k) {
    if (k) os << ':';
    os << deg[k];
  }
  return os.str();
}

ComplexOperator EnergyStructure::block_diagonal_part(
    const ComplexOperator& m) const {
  Matrix acc = Matrix::Zero(m.dim(), m.dim());
  for (const auto& p : projectors_) acc += p.matrix() * m.matrix() * p.matrix();
  return {std::move(acc), m.space()};
}

std::vector<int> EnergyStructure::cluster_columns(int c) const {
  std::vector<int> cols;
  for (int i = 0; i < static_cast<int>(cluster_of_.size()); ++i) {
    if (cluster_of_[i] == c) cols.push_back(i);
  }
  return cols;
}

EnergyStructure spectral_decompose(const ComplexOperator& h,
                                   double cluster_tol) {
  const auto eig = eigh(h);
  const double scale = std::max(1.0, eig.values.cwiseAbs().maxCoeff());
  const double gap = cluster_tol * scale;

  EnergyStructure es;
  es.hamiltonian_ = hermitian_part(h);
  es.cluster_tol_ = cluster_tol;
  es.eigenbasis_ = eig.vectors;
  es.cluster_of_.assign(static_cast<std::size_t>(eig.values.size()), 0);

  std::vector<std::vector<int>> members;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (i == 0 || eig.values[i] - eig.values[i - 1] > gap) members.emplace_back();
    members.back().push_back(static_cast<int>(i));
    es.cluster_of_[i] = static_cast<int>(members.size()) - 1;
  }

  const auto& space = h.space();
  const Eigen::Index dim = h.dim();
  Matrix pi = Matrix::Zero(dim * dim, dim * dim);
  for (const auto& cluster : members) {
    double energy = 0.0;
    Matrix p = Matrix::Zero(dim, dim);
    for (int i : cluster) {
      energy += eig.values[i];
      p.noalias() += eig.vectors.col(i) * eig.vectors.col(i).adjoint();
    }
    es.energies_.push_back(energy / static_cast<double>(cluster.size()));
    const Matrix pbar = p.conjugate();
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) {
        if (pbar(r, c) == Complex(0.0)) continue;
        pi.block(r * dim, c * dim, dim, dim) += pbar(r, c) * p;
      }
    }
    es.projectors_.emplace_back(std::move(p), space);
  }
  es.pi_ = ComplexOperator(0.5 * (pi + pi.adjoint()), space.concat(space));
  return es;
}

ComplexOperator pauli_string(const std::string& ops) {
  if (ops.empty()) throw Error("pauli_string: empty string");
  std::vector<ComplexOperator> factors;
  for (char ch : ops) {
    Matrix m(2, 2);
    switch (ch) {
      case 'I': m << 1, 0, 0, 1; break;
      case 'X': m << 0, 1, 1, 0; break;
      case 'Y': m << 0, Complex(0, -1), Complex(0, 1), 0; break;
      case 'Z': m << 1, 0, 0, -1; break;
      default:
        throw Error(std::string("pauli_string: unknown Pauli letter '") + ch +
                    "'");
    }
    factors.emplace_back(std::move(m));
  }
  return kron(factors);
}

ComplexOperator pauli_hamiltonian(const std::vector<PauliTerm>& terms) {
  if (terms.empty()) throw Error("pauli_hamiltonian: no terms");
  const std::size_t n = terms.front().ops.size();
  auto h = ComplexOperator::zero(SubsystemSpace::uniform(2, static_cast<int>(n)));
  for (const auto& term : terms) {
    if (term.ops.size() != n) {
      throw Error("pauli_hamiltonian: Pauli strings of different lengths");
    }
    h += pauli_string(term.ops) * Complex(term.coeff);
  }
  return h;
}

ComplexOperator ising_all_to_all(int n_sites, double j, double h) {
  if (n_sites < 1) throw Error("ising_all_to_all: need at least one site");
  auto local = [n_sites](int site, char p) {
    std::string ops(static_cast<std::size_t>(n_sites), 'I');
    ops[site] = p;
    return ops;
  };
  std::vector<PauliTerm> terms;
  for (int a = 0; a < n_sites; ++a) {
    for (int b = 0; b < n_sites; ++b) {
      std::string ops(static_cast<std::size_t>(n_sites), 'I');
      if (a == b) {
        terms.push_back({j, ops});  // Z_a Z_a = I
      } else {
        ops[a] = 'Z';
        ops[b] = 'Z';
        terms.push_back({j, ops});
      }
    }
  }
  for (int a = 0; a < n_sites; ++a) terms.push_back({h, local(a, 'X')});
  auto out = pauli_hamiltonian(terms);
  out.matrix() = out.matrix().real().cast<Complex>();
  return out;
}

ComplexOperator energy_sandwich(const ComplexOperator& choi,
                                const EnergyStructure& es) {
  if (choi.dim() != es.pi().dim()) {
    throw DimensionError("energy_sandwich: Choi dimension does not match Π");
  }
  const Matrix& pi = es.pi().matrix();
  return {pi * choi.matrix() * pi, choi.space()};
}

EpoReport is_energy_preserving(const ComplexOperator& choi,
                               const EnergyStructure& es, double tol) {
  if (choi.dim() != es.pi().dim()) {
    throw DimensionError("is_energy_preserving: Choi dimension " +
                         std::to_string(choi.dim()) + " does not match Π (" +
                         std::to_string(es.pi().dim()) + ")");
  }
  const Matrix& pi = es.pi().matrix();
  const Matrix& g = choi.matrix();
  EpoReport rep;
  rep.sandwich_residual = spectral_norm(g - pi * g * pi);
  rep.commutator_residual = spectral_norm(g * pi - pi * g);
  rep.energy_preserving =
      rep.sandwich_residual <= tol * std::max(1.0, spectral_norm(g));
  return rep;
}

ComplexOperator random_epo_choi(const EnergyStructure& es, CounterRng& rng,
                                int rank) {
  const Eigen::Index dim = es.pi().dim();
  const Eigen::Index cols = rank > 0 ? rank : dim;
  Matrix x(dim, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      x(r, c) = Complex(re, im);
    }
  }
  const Matrix& pi = es.pi().matrix();
  const Matrix px = pi * x;
  Matrix g = px * px.adjoint();
  g = 0.5 * (g + g.adjoint());
  ComplexOperator choi(std::move(g), es.pi().space());
  const double top = max_eigenvalue(choi_trace_out(choi, es.space().count()));
  if (!(top > 0.0)) throw NumericalError("random_epo_choi: Π annihilated sample");
  return choi * Complex(1.0 / top);
}

ComplexOperator random_epo_choi(const EnergyStructure& es, std::uint64_t seed,
                                int rank) {
  CounterRng rng(seed);
  return random_epo_choi(es, rng, rank);
}

ComplexOperator random_hermitian(const SubsystemSpace& space, CounterRng& rng) {
  const Eigen::Index dim = space.total();
  Matrix g(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c) {
    for (Eigen::Index r = 0; r < dim; ++r) {
      const double re = rng.normal();
      const double im = rng.normal();
      g(r, c) = Complex(re, im);
    }
  }
  return {0.5 * (g + g.adjoint()), space};
}

}  // namespace epp
