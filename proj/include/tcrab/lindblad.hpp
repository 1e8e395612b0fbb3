// Copyright 2026 The tcrab Authors
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


#ifndef TCRAB_LINDBLAD_HPP_
#define TCRAB_LINDBLAD_HPP_

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <unsupported/Eigen/MatrixFunctions>

#include "tcrab/dynamics.hpp"
#include "tcrab/noise.hpp"

namespace tcrab {

/*
 * Dense Lindblad superoperators with column-stacking vectorization, vec(A X B) = (B^T (x) A) vec(X):
 *   L_H = -i (I (x) H - H^T (x) I)
 *   L_D = sum_k  L_k^* (x) L_k - 1/2 I (x) L_k^dag L_k - 1/2 (L_k^dag L_k)^* (x) I
 */
inline constexpr int kOracleQubitCap = 4;

enum class SuperoperatorKind { HamiltonianPart, DissipativePart, Combined };

struct Superoperator {
  CMatrix matrix;
  SuperoperatorKind kind = SuperoperatorKind::Combined;
};

namespace detail {

inline void check_oracle_dimension(Eigen::Index d) {
  const int n = qubits_for_dimension(d);
  if (n > kOracleQubitCap)
    throw SizeError("Lindblad oracle supports at most " + std::to_string(kOracleQubitCap) + " qubits");
}

}  // namespace detail

/// Column-stacked vec(rho).
inline CVector vectorize(const CMatrix& rho) { return Eigen::Map<const CVector>(rho.data(), rho.size()); }

inline CMatrix unvectorize(const CVector& v, Eigen::Index d) { return Eigen::Map<const CMatrix>(v.data(), d, d); }

inline Superoperator hamiltonian_superoperator(const CMatrix& H) {
  detail::check_oracle_dimension(H.rows());
  const Eigen::Index d = H.rows();
  const CMatrix I = CMatrix::Identity(d, d);
  return {-kI * (kron(I, H) - kron(H.transpose(), I)), SuperoperatorKind::HamiltonianPart};
}

/// Dissipator for arbitrary jump matrices L_k (rates already folded in).
inline Superoperator dissipative_superoperator(const std::vector<CMatrix>& jumps, Eigen::Index d) {
  detail::check_oracle_dimension(d);
  const CMatrix I = CMatrix::Identity(d, d);
  CMatrix out = CMatrix::Zero(d * d, d * d);
  for (const auto& L : jumps) {
    if (L.rows() != d || L.cols() != d) throw DimensionError("dissipative_superoperator: jump dimension mismatch");
    const CMatrix LdL = L.adjoint() * L;
    out += kron(L.conjugate(), L) - 0.5 * kron(I, LdL) - 0.5 * kron(LdL.conjugate(), I);
  }
  return {out, SuperoperatorKind::DissipativePart};
}

inline std::vector<CMatrix> jump_matrices(const JumpOperatorSet& jumps) {
  std::vector<CMatrix> out;
  for (std::size_t k = 0; k < jumps.entries().size(); ++k) out.push_back(jumps.lindblad_operator(k));
  return out;
}

struct SuperoperatorPair {
  Superoperator hamiltonian;
  Superoperator dissipative;
};

inline SuperoperatorPair build_superoperators(const CMatrix& H, const std::vector<CMatrix>& jumps) {
  if (H.rows() != H.cols()) throw DimensionError("build_superoperators: H must be square");
  return {hamiltonian_superoperator(H), dissipative_superoperator(jumps, H.rows())};
}

inline SuperoperatorPair build_superoperators(const CMatrix& H, const JumpOperatorSet& jumps) {
  if (H.rows() != (Eigen::Index{1} << jumps.n_qubits())) throw DimensionError("build_superoperators: qubit count mismatch");
  return build_superoperators(H, jump_matrices(jumps));
}

/// Frobenius norm of L_H L_D - L_D L_H.
inline double commutator_norm(const CMatrix& LH, const CMatrix& LD) {
  if (LH.rows() != LD.rows() || LH.cols() != LD.cols()) throw DimensionError("commutator_norm: dimension mismatch");
  return (LH * LD - LD * LH).norm();
}

/// exp(S T) by scaling and squaring.
inline CMatrix superoperator_exponential(const CMatrix& S, double T) { return (S * T).exp(); }

/// PTM entries 2^-n Tr(G_i S(G_j)) in canonical Pauli order.
inline RMatrix pauli_transfer_matrix(const CMatrix& S) {
  const Eigen::Index d = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(S.rows()))));
  if (d * d != S.rows()) throw DimensionError("pauli_transfer_matrix: not a superoperator");
  const int n = qubits_for_dimension(d);
  const auto basis = all_pauli_strings(n);
  std::vector<CMatrix> mats;
  for (const auto& p : basis) mats.push_back(pauli_matrix(p));
  RMatrix R(static_cast<Eigen::Index>(basis.size()), static_cast<Eigen::Index>(basis.size()));
  for (std::size_t j = 0; j < basis.size(); ++j) {
    const CMatrix out = unvectorize(S * vectorize(mats[j]), d);
    for (std::size_t i = 0; i < basis.size(); ++i)
      R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (mats[i] * out).trace().real() / static_cast<double>(d);
  }
  return R;
}

namespace detail {

using SparseC = Eigen::SparseMatrix<cplx>;

inline SparseC to_sparse(const CMatrix& m) { return m.sparseView(cplx{1.0, 0.0}, 0.0); }

inline double one_norm(const SparseC& m) {
  double best = 0.0;
  for (Eigen::Index k = 0; k < m.outerSize(); ++k) {
    double s = 0.0;
    for (SparseC::InnerIterator it(m, k); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

/// v <- exp(A) v by a Taylor series on ceil(||A||_1) equal substeps.
inline void expmv(const SparseC& A, CVector& v) {
  const double norm = one_norm(A);
  const int sub = std::max(1, static_cast<int>(std::ceil(norm)));
  const double scale = 1.0 / sub;
  CVector term(v.size());
  for (int s = 0; s < sub; ++s) {
    term = v;
    CVector acc = v;
    for (int k = 1; k < 60; ++k) {
      term = (A * term) * (scale / k);
      acc += term;
      if (term.cwiseAbs().maxCoeff() <= 1e-18 * acc.cwiseAbs().maxCoeff()) break;
    }
    v = acc;
  }
}

}  // namespace detail

/// Checks applied to every oracle output: Hermitian, unit trace, no negative eigenvalues.
struct DensityCheck {
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  double hermiticity_error = 0.0;
};

inline DensityCheck check_density(const CMatrix& rho) {
  DensityCheck c;
  c.trace_error = std::abs(rho.trace() - cplx{1.0, 0.0});
  c.hermiticity_error = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()), Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().minCoeff();
  return c;
}

/*
 * Integrates d vec(rho)/dt = (L_H(t) + L_D) vec(rho) from |psi_0><psi_0| with the same
 * midpoint-sampled, piecewise-constant pulses as propagate(). `jumps` defaults to the
 * problem's noise model.
 */
inline CMatrix integrate_master_equation(const ControlProblem& problem, double T, const std::vector<CMatrix>& jumps) {
  problem.validate();
  const Eigen::Index d = problem.dimension();
  detail::check_oracle_dimension(d);
  if (!(T > 0.0)) throw DomainError("integrate_master_equation: T must be positive");

  const detail::SparseC L0 =
      detail::to_sparse(hamiltonian_superoperator(problem.drift).matrix + dissipative_superoperator(jumps, d).matrix);
  std::vector<detail::SparseC> Lc;
  for (const auto& c : problem.controls) Lc.push_back(detail::to_sparse(hamiltonian_superoperator(c.hamiltonian).matrix));
  const auto samples = sample_controls(problem, T);
  const double dt = T / problem.n_steps;

  CVector v = vectorize(density_matrix(problem.initial_state));
  for (int s = 0; s < problem.n_steps; ++s) {
    detail::SparseC A = L0;
    for (std::size_t i = 0; i < Lc.size(); ++i) A += samples[i][s] * Lc[i];
    A *= dt;
    detail::expmv(A, v);
  }
  CMatrix rho = unvectorize(v, d);
  const DensityCheck chk = check_density(rho);
  if (!std::isfinite(chk.trace_error) || chk.trace_error > 1e-6)
    throw NumericalFailure("integrate_master_equation: trace drifted by " + std::to_string(chk.trace_error));
  if (chk.min_eigenvalue < -1e-8)
    throw NumericalFailure("integrate_master_equation: negative eigenvalue " + std::to_string(chk.min_eigenvalue));
  return rho;
}

inline CMatrix integrate_master_equation(const ControlProblem& problem, double T) {
  std::vector<CMatrix> jumps;
  if (problem.noise) jumps = jump_matrices(problem.noise->jumps);
  return integrate_master_equation(problem, T, jumps);
}

/// Tr(rho_g rho) for the problem's pure target.
inline double oracle_fidelity(const ControlProblem& problem, const CMatrix& rho) {
  return problem.target_state.dot(rho * problem.target_state).real();
}

/// Largest ||[L_H(t_s), L_D]|| over the pulse samples of a run.
inline double max_commutator_norm(const ControlProblem& problem, double T) {
  const auto samples = sample_controls(problem, T);
  std::vector<CMatrix> jumps;
  if (problem.noise) jumps = jump_matrices(problem.noise->jumps);
  const CMatrix LD = dissipative_superoperator(jumps, problem.dimension()).matrix;
  double worst = 0.0;
  const CMatrix L0 = hamiltonian_superoperator(problem.drift).matrix;
  std::vector<CMatrix> Lc;
  for (const auto& c : problem.controls) Lc.push_back(hamiltonian_superoperator(c.hamiltonian).matrix);
  // The commutator is linear in H, so per-term commutators are combined per sample.
  const CMatrix C0 = L0 * LD - LD * L0;
  std::vector<CMatrix> Cc;
  for (const auto& l : Lc) Cc.push_back(l * LD - LD * l);
  for (int s = 0; s < problem.n_steps; ++s) {
    CMatrix C = C0;
    for (std::size_t i = 0; i < Cc.size(); ++i) C += samples[i][s] * Cc[i];
    worst = std::max(worst, C.norm());
  }
  return worst;
}

}  // namespace tcrab

#endif  // TCRAB_LINDBLAD_HPP_
