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

#include "epp/lmi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace epp {

namespace {

using Index = Eigen::Index;

struct Triplet {
  int row;
  int col;
  double value;
};

// One coefficient matrix restricted to one block, stored densely or as a
// triplet list depending on fill.
struct Coefficient {
  const RealMatrix* dense = nullptr;
  std::vector<Triplet> entries;
  bool sparse = false;
  bool empty = false;
};

Coefficient classify(const RealMatrix& m) {
  Coefficient c;
  c.dense = &m;
  std::vector<Triplet> nz;
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      if (m(i, j) != 0.0) {
        nz.push_back({static_cast<int>(i), static_cast<int>(j), m(i, j)});
      }
    }
  }
  c.empty = nz.empty();
  c.sparse = nz.size() * 4 <= static_cast<std::size_t>(m.size());
  if (c.sparse) c.entries = std::move(nz);
  return c;
}

double dot(const Coefficient& f, const RealMatrix& t) {
  if (f.empty) return 0.0;
  if (!f.sparse) return f.dense->cwiseProduct(t).sum();
  double acc = 0.0;
  for (const auto& e : f.entries) acc += e.value * t(e.row, e.col);
  return acc;
}

void add_scaled(const Coefficient& f, double s, RealMatrix& out) {
  if (f.empty || s == 0.0) return;
  if (!f.sparse) {
    out.noalias() += s * *f.dense;
    return;
  }
  for (const auto& e : f.entries) out(e.row, e.col) += s * e.value;
}

// X·F·Zinv.
RealMatrix sandwich(const RealMatrix& x, const Coefficient& f,
                    const RealMatrix& zinv) {
  if (!f.sparse) return x * *f.dense * zinv;
  RealMatrix t = RealMatrix::Zero(x.rows(), zinv.cols());
  for (const auto& e : f.entries) {
    t.noalias() += e.value * x.col(e.row) * zinv.row(e.col);
  }
  return t;
}

double frob(const std::vector<RealMatrix>& blocks) {
  double acc = 0.0;
  for (const auto& b : blocks) acc += b.squaredNorm();
  return std::sqrt(acc);
}

double inner(const std::vector<RealMatrix>& a, const std::vector<RealMatrix>& b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k].cwiseProduct(b[k]).sum();
  return acc;
}

// Largest α ≤ cap with X + α·dX ⪰ 0 (X ≻ 0).
std::optional<double> max_step(const std::vector<RealMatrix>& x,
                               const std::vector<RealMatrix>& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    Eigen::LLT<RealMatrix> llt(x[k]);
    if (llt.info() != Eigen::Success) return std::nullopt;
    const RealMatrix l_inv = llt.matrixL().solve(
        RealMatrix::Identity(x[k].rows(), x[k].cols()));
    RealMatrix w = l_inv * dx[k] * l_inv.transpose();
    w = 0.5 * (w + w.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(w, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < 0.0) alpha = std::min(alpha, -1.0 / lo);
  }
  return alpha;
}

}  // namespace

std::string to_string(LmiStatus s) {
  switch (s) {
    case LmiStatus::kOptimal: return "optimal";
    case LmiStatus::kIterationLimit: return "iteration_limit";
    case LmiStatus::kNumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

void LmiProblem::validate() const {
  const std::size_t nb = block_sizes.size();
  if (f0.size() != nb) throw DimensionError("LmiProblem: F0 block count");
  if (fi.size() != static_cast<std::size_t>(b.size())) {
    throw DimensionError("LmiProblem: one coefficient list per variable");
  }
  for (std::size_t k = 0; k < nb; ++k) {
    if (f0[k].rows() != block_sizes[k] || f0[k].cols() != block_sizes[k]) {
      throw DimensionError("LmiProblem: F0 block size");
    }
  }
  for (const auto& blocks : fi) {
    if (blocks.size() != nb) throw DimensionError("LmiProblem: Fi block count");
    for (std::size_t k = 0; k < nb; ++k) {
      if (blocks[k].rows() != block_sizes[k] ||
          blocks[k].cols() != block_sizes[k]) {
        throw DimensionError("LmiProblem: Fi block size");
      }
    }
  }
}

LmiSolution solve_lmi(const LmiProblem& problem, const LmiOptions& options) {
  problem.validate();
  const int m = problem.variable_count();
  const std::size_t nb = problem.block_sizes.size();
  const RealVector& b = problem.b;

  std::vector<std::vector<Coefficient>> coef(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < nb; ++k) coef[i].push_back(classify(problem.fi[i][k]));
  }

  auto apply_adjoint = [&](const RealVector& y) {
    std::vector<RealMatrix> out;
    for (std::size_t k = 0; k < nb; ++k) {
      out.push_back(RealMatrix::Zero(problem.block_sizes[k], problem.block_sizes[k]));
    }
    for (int i = 0; i < m; ++i) {
      for (std::size_t k = 0; k < nb; ++k) add_scaled(coef[i][k], y[i], out[k]);
    }
    return out;
  };
  auto apply_forward = [&](const std::vector<RealMatrix>& x) {
    RealVector v(m);
    for (int i = 0; i < m; ++i) {
      double acc = 0.0;
      for (std::size_t k = 0; k < nb; ++k) acc += dot(coef[i][k], x[k]);
      v[i] = acc;
    }
    return v;
  };

  double n_total = 0.0;
  for (int s : problem.block_sizes) n_total += s;
  double max_f = frob(problem.f0);
  double ratio = 0.0;
  for (int i = 0; i < m; ++i) {
    const double fn = frob(problem.fi[i]);
    max_f = std::max(max_f, fn);
    ratio = std::max(ratio, (1.0 + std::abs(b[i])) / (1.0 + fn));
  }
  const double xi = std::max({10.0, std::sqrt(n_total), n_total * ratio});
  const double eta = std::max({10.0, std::sqrt(n_total), max_f});

  LmiSolution sol;
  sol.y = RealVector::Zero(m);
  for (std::size_t k = 0; k < nb; ++k) {
    const int s = problem.block_sizes[k];
    sol.x.push_back(xi * RealMatrix::Identity(s, s));
    sol.z.push_back(eta * RealMatrix::Identity(s, s));
  }

  const double b_norm = b.norm();
  const double f0_norm = frob(problem.f0);

  for (int iter = 0; iter <= options.max_iterations; ++iter) {
    auto& x = sol.x;
    auto& z = sol.z;
    auto& y = sol.y;

    const RealVector rp = b - apply_forward(x);
    std::vector<RealMatrix> rd = apply_adjoint(y);
    for (std::size_t k = 0; k < nb; ++k) rd[k] = problem.f0[k] - z[k] - rd[k];

    sol.objective = b.dot(y);
    sol.bound = inner(problem.f0, x);
    sol.relative_gap = std::abs(sol.bound - sol.objective) /
                       (1.0 + std::abs(sol.bound) + std::abs(sol.objective));
    sol.primal_infeasibility = rp.norm() / (1.0 + b_norm);
    sol.dual_infeasibility = frob(rd) / (1.0 + f0_norm);
    sol.iterations = iter;
    if (sol.relative_gap <= options.gap_tol &&
        sol.primal_infeasibility <= options.feas_tol &&
        sol.dual_infeasibility <= options.feas_tol) {
      sol.status = LmiStatus::kOptimal;
      return sol;
    }
    if (iter == options.max_iterations) break;

    const double mu = inner(x, z) / n_total;
    std::vector<RealMatrix> zinv(nb);
    for (std::size_t k = 0; k < nb; ++k) {
      Eigen::LLT<RealMatrix> llt(z[k]);
      if (llt.info() != Eigen::Success) {
        sol.status = LmiStatus::kNumericalFailure;
        return sol;
      }
      zinv[k] = llt.solve(RealMatrix::Identity(z[k].rows(), z[k].cols()));
      zinv[k] = 0.5 * (zinv[k] + zinv[k].transpose());
    }

    RealMatrix schur = RealMatrix::Zero(m, m);
    for (std::size_t k = 0; k < nb; ++k) {
      for (int j = 0; j < m; ++j) {
        if (coef[j][k].empty) continue;
        const RealMatrix t = sandwich(x[k], coef[j][k], zinv[k]);
        for (int i = 0; i <= j; ++i) schur(i, j) += dot(coef[i][k], t);
      }
    }
    schur = schur.selfadjointView<Eigen::Upper>();
    Eigen::LDLT<RealMatrix> ldlt(schur);
    // Near the optimum rounding can make the Schur matrix slightly
    // indefinite; retry with a growing diagonal shift.
    const double diag_scale = std::max(1.0, schur.diagonal().cwiseAbs().maxCoeff());
    for (double shift = 1e-14; ldlt.info() != Eigen::Success && shift <= 1e-8;
         shift *= 100.0) {
      ldlt.compute(schur + shift * diag_scale * RealMatrix::Identity(m, m));
    }
    if (ldlt.info() != Eigen::Success) {
      sol.status = LmiStatus::kNumericalFailure;
      return sol;
    }

    // Solves for (dX, dy, dZ) targeting XZ = target·I − corr.
    auto direction = [&](double target, const std::vector<RealMatrix>* corr,
                         std::vector<RealMatrix>& dx, RealVector& dy,
                         std::vector<RealMatrix>& dz) {
      std::vector<RealMatrix> g(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        g[k] = target * zinv[k] - x[k] - x[k] * rd[k] * zinv[k];
        if (corr) g[k] -= (*corr)[k];
      }
      dy = ldlt.solve(RealVector(rp - apply_forward(g)));
      const auto ady = apply_adjoint(dy);
      dz.resize(nb);
      dx.resize(nb);
      for (std::size_t k = 0; k < nb; ++k) {
        dz[k] = rd[k] - ady[k];
        RealMatrix d = target * zinv[k] - x[k] - x[k] * dz[k] * zinv[k];
        if (corr) d -= (*corr)[k];
        dx[k] = 0.5 * (d + d.transpose());
      }
    };

    std::vector<RealMatrix> dxa, dza;
    RealVector dya;
    direction(0.0, nullptr, dxa, dya, dza);
    const auto ap = max_step(x, dxa);
    const auto ad = max_step(z, dza);
    if (!ap || !ad) {
      sol.status = LmiStatus::kNumericalFailure;
      return sol;
    }
    const double alpha_p = std::min(1.0, *ap);
    const double alpha_d = std::min(1.0, *ad);
    double mu_aff = 0.0;
    for (std::size_t k = 0; k < nb; ++k) {
      mu_aff += (x[k] + alpha_p * dxa[k]).cwiseProduct(z[k] + alpha_d * dza[k]).sum();
    }
    mu_aff /= n_total;
    const double sigma = std::min(1.0, std::pow(std::max(0.0, mu_aff) / mu, 3));

    std::vector<RealMatrix> corr(nb);
    for (std::size_t k = 0; k < nb; ++k) corr[k] = dxa[k] * dza[k] * zinv[k];
    std::vector<RealMatrix> dx, dz;
    RealVector dy;
    direction(sigma * mu, &corr, dx, dy, dz);

    const auto sp = max_step(x, dx);
    const auto sd = max_step(z, dz);
    if (!sp || !sd) {
      sol.status = LmiStatus::kNumericalFailure;
      return sol;
    }
    const double step_p = std::min(1.0, options.step_fraction * *sp);
    const double step_d = std::min(1.0, options.step_fraction * *sd);
    for (std::size_t k = 0; k < nb; ++k) {
      x[k] += step_p * dx[k];
      z[k] += step_d * dz[k];
      x[k] = 0.5 * (x[k] + x[k].transpose());
      z[k] = 0.5 * (z[k] + z[k].transpose());
    }
    y += step_d * dy;
  }
  sol.status = LmiStatus::kIterationLimit;
  return sol;
}

RealMatrix real_embedding(const Matrix& h) {
  const Index n = h.rows();
  RealMatrix e(2 * n, 2 * n);
  const RealMatrix re = h.real();
  const RealMatrix im = h.imag();
  e.topLeftCorner(n, n) = re;
  e.topRightCorner(n, n) = -im;
  e.bottomLeftCorner(n, n) = im;
  e.bottomRightCorner(n, n) = re;
  return 0.5 * (e + e.transpose());
}

Matrix hermitian_from_embedding_dual(const RealMatrix& x) {
  const Index n = x.rows() / 2;
  const RealMatrix p = x.topLeftCorner(n, n);
  const RealMatrix w = x.topRightCorner(n, n);
  const RealMatrix s = x.bottomRightCorner(n, n);
  RealMatrix re = p + s;
  re = 0.5 * (re + re.transpose());
  const RealMatrix im = w.transpose() - w;
  Matrix y(n, n);
  y.real() = re;
  y.imag() = im;
  return y;
}

std::vector<Matrix> hermitian_basis(int r) {
  std::vector<Matrix> basis;
  basis.reserve(static_cast<std::size_t>(r) * r);
  const double s = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < r; ++k) {
    Matrix e = Matrix::Zero(r, r);
    e(k, k) = 1.0;
    basis.push_back(std::move(e));
  }
  for (int k = 0; k < r; ++k) {
    for (int l = k + 1; l < r; ++l) {
      Matrix e = Matrix::Zero(r, r);
      e(k, l) = s;
      e(l, k) = s;
      basis.push_back(std::move(e));
      Matrix f = Matrix::Zero(r, r);
      f(k, l) = Complex(0.0, s);
      f(l, k) = Complex(0.0, -s);
      basis.push_back(std::move(f));
    }
  }
  return basis;
}

HermitianProgramSolution solve_hermitian_program(const HermitianProgram& prog,
                                                 const LmiOptions& options) {
  const std::size_t m = prog.psd_images.size();
  if (prog.bound_images.size() != m ||
      static_cast<std::size_t>(prog.objective.size()) != m || m == 0) {
    throw DimensionError("solve_hermitian_program: inconsistent coordinate count");
  }
  const Index r = prog.psd_images.front().rows();
  const Index d = prog.bound_images.front().rows();

  LmiProblem lmi;
  lmi.block_sizes = {static_cast<int>(2 * r), static_cast<int>(2 * d)};
  lmi.f0 = {RealMatrix::Zero(2 * r, 2 * r), RealMatrix::Identity(2 * d, 2 * d)};
  lmi.b = prog.objective;
  lmi.fi.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    lmi.fi.push_back({RealMatrix(-real_embedding(prog.psd_images[k])),
                      real_embedding(prog.bound_images[k])});
  }

  HermitianProgramSolution out;
  out.lmi = solve_lmi(lmi, options);
  out.x = out.lmi.y;
  out.psd_value = Matrix::Zero(r, r);
  out.bound_value = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < m; ++k) {
    out.psd_value += out.x[k] * prog.psd_images[k];
    out.bound_value += out.x[k] * prog.bound_images[k];
  }
  out.psd_value = 0.5 * (out.psd_value + out.psd_value.adjoint());
  out.bound_value = 0.5 * (out.bound_value + out.bound_value.adjoint());
  out.dual_psd = hermitian_from_embedding_dual(out.lmi.x[0]);
  out.dual_bound = hermitian_from_embedding_dual(out.lmi.x[1]);
  return out;
}

}  // namespace epp
