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

#include "epp/sdp.hpp"

#include <cmath>
#include <limits>

#include "epp/quantum.hpp"

namespace epp {

namespace {

Matrix psd_part(const Matrix& m) {
  const auto eig = eigh(Matrix(0.5 * (m + m.adjoint())), 1e-9);
  const RealVector clipped = eig.values.cwiseMax(0.0);
  return eig.vectors * clipped.asDiagonal() * eig.vectors.adjoint();
}

Matrix trace_out(const Matrix& m, const StructuralOperators& s) {
  return choi_trace_out(ComplexOperator(m, s.C.space()), s.out_count).matrix();
}

double max_eig(const Matrix& m) {
  return eigh(Matrix(0.5 * (m + m.adjoint())), 1e-9).values.maxCoeff();
}

double min_eig(const Matrix& m) {
  return eigh(Matrix(0.5 * (m + m.adjoint())), 1e-9).values.minCoeff();
}

Matrix inv_sqrt_pd(const Matrix& m) {
  const auto eig = eigh(Matrix(0.5 * (m + m.adjoint())), 1e-9);
  if (eig.values.minCoeff() <= 0.0) {
    throw NumericalError("objective weight is not positive definite");
  }
  const RealVector w = eig.values.cwiseSqrt().cwiseInverse();
  return eig.vectors * w.asDiagonal() * eig.vectors.adjoint();
}

// Fills Γ*, p_max, fidelity and residuals from a PSD-clipped primal point.
void finish_primal(Matrix gamma, const StructuralOperators& s, SdpSolution& out) {
  const double top = max_eig(trace_out(gamma, s));
  if (top > 1.0) gamma /= top;
  out.choi_star = ComplexOperator(0.5 * (gamma + gamma.adjoint()), s.C.space());
  out.p_max = trace_product(out.choi_star, s.C).real();
  out.fidelity =
      out.p_max > 0.0 ? trace_product(out.choi_star, s.A).real() / out.p_max : 0.0;
  out.residuals = protocol_residuals(out.choi_star, s);
}

bool residuals_ok(const SdpResiduals& r, double norm, double tol) {
  const double scale = std::max(1.0, norm);
  return r.psd_min_eig >= -tol * scale && r.trout_violation <= tol &&
         r.subspace_residual <= tol * scale && r.energy_residual <= tol * scale;
}

}  // namespace

SdpResiduals protocol_residuals(const ComplexOperator& choi,
                                const StructuralOperators& s) {
  SdpResiduals r;
  const Matrix& g = choi.matrix();
  r.psd_min_eig = min_eig(g);
  r.trout_violation = std::max(0.0, max_eig(trace_out(g, s)) - 1.0);
  const Matrix t = s.C_inv_sqrt.matrix() * s.P_m.matrix() * s.C_sqrt.matrix();
  r.subspace_residual = spectral_norm(Matrix(t * g * t.adjoint() - g));
  const Matrix& pi = s.pi.matrix();
  r.energy_residual = spectral_norm(Matrix(g - pi * g * pi));
  return r;
}

SdpSolution solve_max_success(const StructuralOperators& s,
                              const SdpOptions& options) {
  const int r = s.rank_Pm;
  if (r == 0) throw NumericalError("solve_max_success: empty top eigenspace");
  const Matrix g = s.C_inv_sqrt.matrix() * s.top_basis;
  const Matrix q = g.adjoint() * s.C.matrix() * g;

  HermitianProgram prog;
  const auto basis = hermitian_basis(r);
  prog.objective.resize(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    prog.psd_images.push_back(basis[k]);
    prog.bound_images.push_back(trace_out(g * basis[k] * g.adjoint(), s));
    prog.objective[static_cast<Eigen::Index>(k)] = (q * basis[k]).trace().real();
  }
  const auto raw = solve_hermitian_program(prog, options.lmi);

  SdpSolution out;
  out.iterations = raw.lmi.iterations;
  out.solver_status = to_string(raw.lmi.status);

  Matrix m = psd_part(raw.psd_value);
  const double top = max_eig(trace_out(g * m * g.adjoint(), s));
  if (top > 1.0) m /= top;
  out.reduced_primal = m;
  finish_primal(g * m * g.adjoint(), s, out);

  const Eigen::Index din = s.in_space.total();
  const Eigen::Index dout = s.C.dim() / din;
  Matrix y = psd_part(raw.dual_bound);
  const Matrix lifted = kron(ComplexOperator(y), ComplexOperator(Matrix::Identity(dout, dout))).matrix();
  const Matrix lt = g.adjoint() * lifted * g;
  const Matrix qi = inv_sqrt_pd(q);
  const double mu = min_eig(qi * lt * qi);
  if (mu > 0.0) {
    y /= mu;
    out.dual_bound = y.trace().real();
  } else {
    out.dual_bound = std::numeric_limits<double>::infinity();
  }
  out.dual_y = y;
  out.gap = out.dual_bound - out.p_max;

  out.nogo = evaluate_nogo(s);
  out.purification_exists = !out.nogo.scalar_route;
  out.certified =
      std::isfinite(out.dual_bound) &&
      out.gap <= options.certificate_gap * std::max(1.0, out.p_max) &&
      residuals_ok(out.residuals, spectral_norm(out.choi_star), options.residual_tol);
  return out;
}

CertificateReport dual_certificate_check(const SdpSolution& sol,
                                         const StructuralOperators& s,
                                         const SdpOptions& options) {
  CertificateReport rep;
  rep.residuals = protocol_residuals(sol.choi_star, s);
  rep.primal_value = trace_product(sol.choi_star, s.C).real();

  const Matrix& y = sol.dual_y;
  const Eigen::Index din = s.in_space.total();
  if (y.rows() != din) {
    rep.message = "dual variable has the wrong dimension";
    return rep;
  }
  const Eigen::Index dout = s.C.dim() / din;
  const double y_min = min_eig(y);
  // Dual feasibility: Y ⪰ 0 and G†(Y ⊗ I)G ⪰ G†CG on the top eigenspace.
  const Matrix g = s.C_inv_sqrt.matrix() * s.top_basis;
  const Matrix lifted =
      kron(ComplexOperator(y), ComplexOperator(Matrix::Identity(dout, dout))).matrix();
  const Matrix slack = g.adjoint() * (lifted - s.C.matrix()) * g;
  const double slack_min = min_eig(slack);
  rep.dual_value = y.trace().real();
  rep.gap = rep.dual_value - rep.primal_value;

  const double scale = std::max(1.0, rep.primal_value);
  const bool dual_ok = y_min >= -options.residual_tol && slack_min >= -options.residual_tol;
  const bool gap_ok = rep.gap <= options.certificate_gap * scale &&
                      rep.gap >= -options.certificate_gap * scale;
  const bool primal_ok =
      residuals_ok(rep.residuals, spectral_norm(sol.choi_star), options.residual_tol);
  rep.passed = dual_ok && gap_ok && primal_ok;
  if (!dual_ok) {
    rep.message = "dual infeasible (λmin(Y) = " + std::to_string(y_min) +
                  ", λmin(slack) = " + std::to_string(slack_min) + ")";
  } else if (!gap_ok) {
    rep.message = "duality gap " + std::to_string(rep.gap) + " too large";
  } else if (!primal_ok) {
    rep.message = "primal residuals out of tolerance";
  } else {
    rep.message = "ok";
  }
  return rep;
}

SdpSolution solve_max_success_direct(const StructuralOperators& s,
                                     const SdpOptions& options) {
  const Matrix t = s.C_inv_sqrt.matrix() * s.P_m.matrix() * s.C_sqrt.matrix();
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeFullU);
  const RealVector& sv = svd.singularValues();
  int rank = 0;
  while (rank < sv.size() && sv[rank] > 1e-8 * std::max(1.0, sv[0])) ++rank;
  if (rank == 0) throw NumericalError("solve_max_success_direct: T vanishes");
  const Matrix w = svd.matrixU().leftCols(rank);

  HermitianProgram prog;
  const auto basis = hermitian_basis(rank);
  prog.objective.resize(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k) {
    Matrix full = w * basis[k] * w.adjoint();
    prog.bound_images.push_back(trace_out(full, s));
    prog.objective[static_cast<Eigen::Index>(k)] =
        trace_product(ComplexOperator(full, s.C.space()), s.C).real();
    prog.psd_images.push_back(w.adjoint() * full * w);
  }
  const auto raw = solve_hermitian_program(prog, options.lmi);

  SdpSolution out;
  out.iterations = raw.lmi.iterations;
  out.solver_status = to_string(raw.lmi.status);
  finish_primal(w * psd_part(raw.psd_value) * w.adjoint(), s, out);
  out.dual_bound = raw.lmi.bound;
  out.gap = out.dual_bound - out.p_max;
  out.nogo = evaluate_nogo(s);
  out.purification_exists = !out.nogo.scalar_route;
  out.certified =
      raw.lmi.status != LmiStatus::kIterationLimit &&
      std::abs(out.gap) <= options.certificate_gap * std::max(1.0, out.p_max) &&
      residuals_ok(out.residuals, spectral_norm(out.choi_star), options.residual_tol);
  return out;
}

}  // namespace epp
