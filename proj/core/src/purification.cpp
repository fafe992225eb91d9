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

#include "epp/purification.hpp"

#include <cmath>
#include <numeric>

#include "epp/quantum.hpp"

namespace epp {

namespace {

EnergyStructure respace(EnergyStructure es, int d, int n) {
  const auto space = SubsystemSpace::uniform(d, n);
  if (es.dim() != space.total()) {
    throw DimensionError("PurificationProblem: Hamiltonian dimension " +
                         std::to_string(es.dim()) + " != d^n = " +
                         std::to_string(space.total()));
  }
  if (es.space() == space) return es;
  return spectral_decompose(
      ComplexOperator(es.hamiltonian().matrix(), space), es.cluster_tol());
}

void check_problem(int d, int n, double gamma) {
  if (d < 2) throw Error("PurificationProblem: d must be at least 2");
  if (n < 1) throw Error("PurificationProblem: n must be at least 1");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw Error("PurificationProblem: gamma must lie in (0, 1], got " +
                std::to_string(gamma));
  }
}

std::vector<int> range(int n) {
  std::vector<int> v(static_cast<std::size_t>(n));
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

PurificationProblem::PurificationProblem(int d, int n, double gamma,
                                         EnergyStructure energy)
    : d_(d), n_(n), gamma_(gamma) {
  check_problem(d, n, gamma);
  energy_ = respace(std::move(energy), d, n);
}

PurificationProblem::PurificationProblem(int d, int n, double gamma,
                                         const ComplexOperator& h,
                                         double cluster_tol)
    : d_(d), n_(n), gamma_(gamma) {
  check_problem(d, n, gamma);
  energy_ = respace(spectral_decompose(h, cluster_tol), d, n);
}

double baseline_fidelity(double gamma, int d) {
  return gamma + (1.0 - gamma) / static_cast<double>(d);
}

ComplexOperator noisy_symmetric_input(int d, int n, double gamma) {
  const auto idx = range(n);
  return depolarize_subsystems(sym_mixed_state(d, n), gamma, idx);
}

ComplexOperator purified_slot_operator(int d, int n, double gamma) {
  const auto idx = range(n);
  auto noisy = depolarize_subsystems(sym_mixed_state(d, n + 1), gamma, idx);
  return partial_transpose(noisy, idx);
}

ComplexOperator build_A(const PurificationProblem& p) {
  auto core = purified_slot_operator(p.d(), p.n(), p.gamma());
  if (p.n() == 1) return core;
  return kron(core,
              ComplexOperator::identity(SubsystemSpace::uniform(p.d(), p.n() - 1)));
}

ComplexOperator build_C(const PurificationProblem& p) {
  const auto rho = noisy_symmetric_input(p.d(), p.n(), p.gamma());
  const auto lifted =
      kron(rho.transpose(), ComplexOperator::identity(p.system_space()));
  const Matrix& pi = p.energy().pi().matrix();
  return {pi * lifted.matrix() * pi, p.choi_space()};
}

StructuralOperators assemble_structural(ComplexOperator a, ComplexOperator c,
                                        ComplexOperator pi,
                                        SubsystemSpace in_space, int out_count,
                                        double baseline,
                                        bool expect_full_support,
                                        const Tolerances& tol) {
  if (a.dim() != c.dim() || c.dim() != pi.dim()) {
    throw DimensionError("assemble_structural: A, C and Π differ in dimension");
  }
  StructuralOperators s;
  s.tol = tol;
  s.in_space = std::move(in_space);
  s.out_count = out_count;
  s.baseline = baseline;
  s.A = hermitian_part(a);
  s.C = hermitian_part(c);
  s.pi = std::move(pi);

  const double c_norm = spectral_norm(s.C);
  const Matrix& pm = s.pi.matrix();
  const double leak = spectral_norm(Matrix(pm * s.C.matrix() * pm - s.C.matrix()));
  if (leak > 1e-9 * std::max(1.0, c_norm)) {
    throw NumericalError("support of C is not contained in that of Π (residual " +
                         std::to_string(leak) + ")");
  }

  s.C_sqrt = psd_sqrt(s.C, tol.rank_tol);
  s.C_inv_sqrt = psd_sqrt_pinv(s.C, tol.rank_tol);
  s.support_C = support_projector(s.C, tol.rank_tol);
  s.support_rank = numerical_rank(s.C, tol.rank_tol);
  s.pi_rank = static_cast<int>(std::lround(s.pi.trace().real()));
  s.full_support = s.support_rank == s.pi_rank;
  if (s.full_support) {
    s.support_residual =
        spectral_norm(Matrix((s.C_sqrt * s.C_inv_sqrt).matrix() - pm));
  }
  if (expect_full_support &&
      (!s.full_support || s.support_residual > 1e-6)) {
    throw NumericalError("rank(C) = " + std::to_string(s.support_rank) +
                         " but rank(Π) = " + std::to_string(s.pi_rank) +
                         "; energy clustering is inconsistent with C");
  }

  s.K = hermitian_part(s.C_inv_sqrt * s.A * s.C_inv_sqrt);
  const auto eig = eigh(s.K, 1e-9);
  s.K_spectrum = eig.values;
  s.F_max = eig.values.maxCoeff();
  const double cut = s.F_max * (1.0 - tol.max_eig_tol);
  std::vector<Eigen::Index> top;
  for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
    if (eig.values[i] >= cut) top.push_back(i);
  }
  s.rank_Pm = static_cast<int>(top.size());
  s.top_basis.resize(s.K.dim(), s.rank_Pm);
  for (int k = 0; k < s.rank_Pm; ++k) s.top_basis.col(k) = eig.vectors.col(top[k]);
  s.P_m = ComplexOperator(s.top_basis * s.top_basis.adjoint(), s.C.space());
  return s;
}

StructuralOperators structural_operators(const PurificationProblem& p,
                                         const Tolerances& tol) {
  return assemble_structural(build_A(p), build_C(p), p.energy().pi(),
                             p.system_space(), p.n(),
                             baseline_fidelity(p.gamma(), p.d()),
                             p.gamma() < 1.0, tol);
}

NogoReport evaluate_nogo(const StructuralOperators& s, double tol) {
  NogoReport r;
  const auto id = choi_of_identity(s.in_space);
  const double num = trace_product(id, s.A).real();
  const double den = trace_product(id, s.C).real();
  r.identity_fidelity = num / den;
  r.gap = s.F_max - s.baseline;
  r.scalar_route = std::abs(r.gap) <= tol;

  const Matrix t = s.C_inv_sqrt.matrix() * s.P_m.matrix() * s.C_sqrt.matrix();
  const Matrix& g = id.matrix();
  r.operator_residual =
      spectral_norm(Matrix(t * g * t.adjoint() - g)) / spectral_norm(g);

  Matrix sigma = s.C_sqrt.matrix() * g * s.C_sqrt.matrix() / den;
  const Matrix& p = s.P_m.matrix();
  r.sigma_residual = spectral_norm(Matrix(p * sigma * p - sigma));

  constexpr double kOperatorTol = 1e-6;
  r.literal_form = s.full_support;
  r.operator_route = r.literal_form ? r.operator_residual <= kOperatorTol
                                    : r.sigma_residual <= kOperatorTol;
  r.agree = r.operator_route == r.scalar_route;
  return r;
}

bool nogo_condition(const StructuralOperators& s, double tol) {
  const auto r = evaluate_nogo(s, tol);
  if (!r.agree) {
    throw NumericalError(
        "no-go routes disagree: F_max − baseline = " + std::to_string(r.gap) +
        ", operator residual = " + std::to_string(r.operator_residual) +
        ", sigma residual = " + std::to_string(r.sigma_residual));
  }
  return r.scalar_route;
}

ProtocolMetrics protocol_metrics(const ComplexOperator& choi,
                                 const StructuralOperators& s) {
  if (choi.dim() != s.C.dim()) {
    throw DimensionError("protocol_metrics: Choi dimension mismatch");
  }
  const Matrix& pi = s.pi.matrix();
  const Matrix& g = choi.matrix();
  const double off = spectral_norm(Matrix(g - pi * g * pi));
  if (off > 1e-8 * std::max(1.0, spectral_norm(g))) {
    throw Error("protocol_metrics: Choi operator is not energy preserving "
                "(residual " + std::to_string(off) + ")");
  }
  ProtocolMetrics m;
  m.probability = trace_product(choi, s.C).real();
  if (!(m.probability > 1e-14)) {
    throw Error("protocol_metrics: protocol never succeeds");
  }
  m.fidelity = trace_product(choi, s.A).real() / m.probability;
  return m;
}

double max_success_scale(const ComplexOperator& sigma,
                         const StructuralOperators& s) {
  const auto x = s.C_inv_sqrt * sigma * s.C_inv_sqrt;
  const double top = max_eigenvalue(hermitian_part(choi_trace_out(x, s.out_count)));
  if (!(top > 0.0)) throw NumericalError("max_success_scale: σ outside supp(C)");
  return 1.0 / top;
}

ComplexOperator protocol_from_sigma(const ComplexOperator& sigma, double q,
                                    const StructuralOperators& s) {
  if (sigma.dim() != s.C.dim()) {
    throw DimensionError("protocol_from_sigma: σ dimension mismatch");
  }
  if (!sigma.is_hermitian(1e-10)) throw Error("protocol_from_sigma: σ not Hermitian");
  if (min_eigenvalue(hermitian_part(sigma)) < -1e-10) {
    throw Error("protocol_from_sigma: σ is not positive semidefinite");
  }
  if (std::abs(sigma.trace().real() - 1.0) > 1e-9) {
    throw Error("protocol_from_sigma: Tr σ must be 1");
  }
  const Matrix& sc = s.support_C.matrix();
  const Matrix& sm = sigma.matrix();
  if (spectral_norm(Matrix(sc * sm * sc - sm)) > 1e-9) {
    throw Error("protocol_from_sigma: σ is not supported on supp(C)");
  }
  const double q_max = max_success_scale(sigma, s);
  if (!(q > 0.0) || q > q_max * (1.0 + 1e-12)) {
    throw Error("protocol_from_sigma: q = " + std::to_string(q) +
                " outside (0, " + std::to_string(q_max) + "]");
  }
  return hermitian_part(s.C_inv_sqrt * sigma * s.C_inv_sqrt) * Complex(q);
}

ComplexOperator sigma_from_protocol(const ComplexOperator& choi,
                                    const StructuralOperators& s) {
  const double p = trace_product(choi, s.C).real();
  if (!(p > 0.0)) throw Error("sigma_from_protocol: zero success probability");
  return hermitian_part(s.C_sqrt * choi * s.C_sqrt) * Complex(1.0 / p);
}

}  // namespace epp
