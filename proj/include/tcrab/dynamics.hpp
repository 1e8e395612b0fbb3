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

#ifndef TCRAB_DYNAMICS_HPP_
#define TCRAB_DYNAMICS_HPP_

#include <cmath>
#include <deque>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "tcrab/noise.hpp"
#include "tcrab/pulse.hpp"

namespace tcrab {

inline constexpr int kDefaultSteps = 300;

struct ControlTerm {
  CMatrix hamiltonian;
  PulseAnsatz pulse;
};

/// Drift + pulse-modulated controls, the state pair, optional noise and the time grid.
struct ControlProblem {
  CMatrix drift;
  std::vector<ControlTerm> controls;
  CVector initial_state;
  CVector target_state;
  std::optional<NoiseModel> noise;
  int n_steps = kDefaultSteps;
  double T_max = 10.0;

  Eigen::Index dimension() const { return drift.rows(); }
  int n_qubits() const { return qubits_for_dimension(drift.rows()); }

  /// Drift followed by the control Hamiltonians.
  std::vector<CMatrix> hamiltonian_terms() const {
    std::vector<CMatrix> out{drift};
    for (const auto& c : controls) out.push_back(c.hamiltonian);
    return out;
  }

  std::size_t n_parameters() const {
    std::size_t n = 0;
    for (const auto& c : controls) n += c.pulse.n_coefficients();
    return n;
  }

  void validate() const {
    const Eigen::Index d = drift.rows();
    qubits_for_dimension(d);
    if (!is_hermitian(drift)) throw ValidationError("ControlProblem: drift is not Hermitian");
    for (const auto& c : controls) {
      if (c.hamiltonian.rows() != d || c.hamiltonian.cols() != d)
        throw DimensionError("ControlProblem: control dimension mismatch");
      if (!is_hermitian(c.hamiltonian)) throw ValidationError("ControlProblem: control is not Hermitian");
    }
    if (initial_state.size() != d || target_state.size() != d)
      throw DimensionError("ControlProblem: state dimension mismatch");
    if (std::abs(initial_state.norm() - 1.0) > 1e-12 || std::abs(target_state.norm() - 1.0) > 1e-12)
      throw ValidationError("ControlProblem: states must be unit norm");
    if (n_steps < 1) throw DomainError("ControlProblem: n_steps must be positive");
    if (!(T_max > 0.0)) throw DomainError("ControlProblem: T_max must be positive");
    if (noise && noise->n_qubits() != n_qubits()) throw DimensionError("ControlProblem: noise qubit count mismatch");
  }
};

namespace detail {

/// Applies exp(-i H dt) to c for a small Hermitian H.
inline void apply_hermitian_exponential(const CMatrix& H, double dt, CVector& c,
                                        Eigen::SelfAdjointEigenSolver<CMatrix>& csolver,
                                        Eigen::SelfAdjointEigenSolver<RMatrix>& rsolver, bool real) {
  const Eigen::Index r = H.rows();
  if (r == 1) {
    c[0] *= std::exp(-kI * (H(0, 0).real() * dt));
    return;
  }
  if (r == 2) {
    // H = a I + b.sigma  =>  exp(-i H dt) = e^{-i a dt} (cos(|b| dt) I - i sin(|b| dt) b.sigma / |b|)
    const double a = 0.5 * (H(0, 0).real() + H(1, 1).real());
    const double bz = 0.5 * (H(0, 0).real() - H(1, 1).real());
    const cplx off = H(0, 1);  // bx - i by
    const double nb = std::sqrt(bz * bz + std::norm(off));
    const double cs = std::cos(nb * dt);
    const double sn = nb > 0.0 ? std::sin(nb * dt) / nb : dt;
    const cplx ph = std::exp(-kI * (a * dt));
    const cplx u00 = cplx{cs, -sn * bz}, u11 = cplx{cs, sn * bz};
    const cplx u01 = -kI * sn * off, u10 = -kI * sn * std::conj(off);
    const cplx c0 = c[0], c1 = c[1];
    c[0] = ph * (u00 * c0 + u01 * c1);
    c[1] = ph * (u10 * c0 + u11 * c1);
    return;
  }
  if (real) {
    rsolver.compute(H.real());
    const RMatrix& V = rsolver.eigenvectors();
    CVector w = V.transpose().cast<cplx>() * c;
    for (Eigen::Index k = 0; k < r; ++k) w[k] *= std::exp(-kI * (rsolver.eigenvalues()[k] * dt));
    c.noalias() = V.cast<cplx>() * w;
  } else {
    csolver.compute(H);
    const CMatrix& V = csolver.eigenvectors();
    CVector w = V.adjoint() * c;
    for (Eigen::Index k = 0; k < r; ++k) w[k] *= std::exp(-kI * (csolver.eigenvalues()[k] * dt));
    c.noalias() = V * w;
  }
}

inline bool is_real_matrix(const CMatrix& m) { return m.imag().cwiseAbs().maxCoeff() == 0.0; }

}  // namespace detail

/*
 * Piecewise-constant Schrodinger propagation of one problem.
 *
 * Each step applies exp(-i H(t_s) dt) with the full instantaneous Hamiltonian sampled at
 * the step midpoint. The state never leaves the smallest subspace containing the initial
 * state that is invariant under every Hamiltonian term, so construction splits the
 * computational basis into sparsity-connected components and, inside each component,
 * builds an orthonormal basis of that invariant subspace. Steps then act on these small
 * blocks only. With `reduce = false` the whole space is a single block.
 */
class Propagator {
 public:
  struct Block {
    std::vector<Eigen::Index> indices;  ///< computational-basis indices of the component
    CMatrix basis;                      ///< |indices| x r, orthonormal columns
    std::vector<CMatrix> terms;         ///< reduced drift, then controls (r x r)
    CVector initial;                    ///< reduced initial amplitudes
    bool real = true;
  };

  explicit Propagator(const ControlProblem& problem, bool reduce = true)
      : dim_(problem.dimension()), n_controls_(problem.controls.size()), n_steps_(problem.n_steps) {
    problem.validate();
    const auto terms = problem.hamiltonian_terms();
    if (reduce)
      build_reduced(terms, problem.initial_state);
    else
      build_full(terms, problem.initial_state);
  }

  const std::vector<Block>& blocks() const { return blocks_; }
  Eigen::Index dimension() const { return dim_; }
  int n_steps() const { return n_steps_; }

  /// Total dimension actually integrated.
  Eigen::Index reduced_dimension() const {
    Eigen::Index r = 0;
    for (const auto& b : blocks_) r += b.basis.cols();
    return r;
  }

  /// `samples[i][s]` is control i at midpoint s. Returns the final state in the full space.
  CVector propagate(double T, std::span<const RVector> samples) const {
    if (!(T > 0.0)) throw DomainError("propagate: T must be positive");
    if (samples.size() != n_controls_) throw DimensionError("propagate: wrong number of control sample rows");
    for (const auto& s : samples)
      if (s.size() != n_steps_) throw DimensionError("propagate: wrong number of pulse samples");
    const double dt = T / n_steps_;
    CVector psi = CVector::Zero(dim_);
    for (const auto& b : blocks_) {
      CVector c = b.initial;
      evolve_block(b, samples, dt, c);
      const CVector full = b.basis * c;
      for (std::size_t k = 0; k < b.indices.size(); ++k) psi[b.indices[k]] = full[static_cast<Eigen::Index>(k)];
    }
    const double norm = psi.norm();
    if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-6)
      throw NumericalFailure("propagate: norm drifted to " + std::to_string(norm));
    return psi;
  }

 private:
  void evolve_block(const Block& b, std::span<const RVector> samples, double dt, CVector& c) const {
    const Eigen::Index r = b.basis.cols();
    if (r == 1) {
      // Scalar steps commute, so the product of phases is one phase.
      double angle = 0.0;
      for (int s = 0; s < n_steps_; ++s) {
        double h = b.terms[0](0, 0).real();
        for (std::size_t i = 0; i < n_controls_; ++i) h += samples[i][s] * b.terms[i + 1](0, 0).real();
        angle += h;
      }
      c[0] *= std::exp(-kI * (angle * dt));
      return;
    }
    if (r == 3 && b.real) {
      std::vector<Eigen::Matrix3d> terms;
      for (const auto& t : b.terms) terms.push_back(t.real());
      Eigen::Vector3d re = c.real(), im = c.imag();
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es;
      for (int s = 0; s < n_steps_; ++s) {
        Eigen::Matrix3d H = terms[0];
        for (std::size_t i = 0; i < n_controls_; ++i) H += samples[i][s] * terms[i + 1];
        es.computeDirect(H);
        const Eigen::Matrix3d& V = es.eigenvectors();
        const Eigen::Vector3d wr = V.transpose() * re, wi = V.transpose() * im;
        Eigen::Vector3d nr, ni;
        for (int k = 0; k < 3; ++k) {
          const double ph = es.eigenvalues()[k] * dt;
          const double cs = std::cos(ph), sn = std::sin(ph);
          // (wr + i wi) e^{-i ph}
          nr[k] = wr[k] * cs + wi[k] * sn;
          ni[k] = wi[k] * cs - wr[k] * sn;
        }
        re = V * nr;
        im = V * ni;
      }
      for (int k = 0; k < 3; ++k) c[k] = cplx{re[k], im[k]};
      return;
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> csolver;
    Eigen::SelfAdjointEigenSolver<RMatrix> rsolver;
    CMatrix H(r, r);
    for (int s = 0; s < n_steps_; ++s) {
      H = b.terms[0];
      for (std::size_t i = 0; i < n_controls_; ++i) H += samples[i][s] * b.terms[i + 1];
      detail::apply_hermitian_exponential(H, dt, c, csolver, rsolver, b.real);
    }
  }

  void build_full(const std::vector<CMatrix>& terms, const CVector& psi0) {
    Block b;
    b.indices.resize(static_cast<std::size_t>(dim_));
    std::iota(b.indices.begin(), b.indices.end(), Eigen::Index{0});
    b.basis = CMatrix::Identity(dim_, dim_);
    b.terms = terms;
    b.initial = psi0;
    b.real = detail::is_real_matrix(psi0);
    for (const auto& t : terms) b.real = b.real && detail::is_real_matrix(t);
    blocks_.push_back(std::move(b));
  }

  void build_reduced(const std::vector<CMatrix>& terms, const CVector& psi0) {
    // Connected components of the union sparsity pattern.
    std::vector<Eigen::Index> parent(static_cast<std::size_t>(dim_));
    std::iota(parent.begin(), parent.end(), Eigen::Index{0});
    auto find = [&](Eigen::Index i) {
      while (parent[static_cast<std::size_t>(i)] != i) {
        parent[static_cast<std::size_t>(i)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])];
        i = parent[static_cast<std::size_t>(i)];
      }
      return i;
    };
    for (const auto& t : terms)
      for (Eigen::Index i = 0; i < dim_; ++i)
        for (Eigen::Index j = i + 1; j < dim_; ++j)
          if (t(i, j) != cplx{0.0, 0.0}) parent[static_cast<std::size_t>(find(i))] = find(j);

    std::vector<std::vector<Eigen::Index>> components(static_cast<std::size_t>(dim_));
    for (Eigen::Index i = 0; i < dim_; ++i) components[static_cast<std::size_t>(find(i))].push_back(i);

    for (const auto& comp : components) {
      if (comp.empty()) continue;
      const Eigen::Index m = static_cast<Eigen::Index>(comp.size());
      CVector v(m);
      for (Eigen::Index k = 0; k < m; ++k) v[k] = psi0[comp[static_cast<std::size_t>(k)]];
      if (v.norm() == 0.0) continue;
      std::vector<CMatrix> sub;
      for (const auto& t : terms) {
        CMatrix s(m, m);
        for (Eigen::Index a = 0; a < m; ++a)
          for (Eigen::Index b = 0; b < m; ++b)
            s(a, b) = t(comp[static_cast<std::size_t>(a)], comp[static_cast<std::size_t>(b)]);
        sub.push_back(std::move(s));
      }
      CMatrix Q = invariant_subspace(sub, v);
      Block blk;
      blk.indices = comp;
      blk.real = detail::is_real_matrix(Q);
      for (const auto& s : sub) {
        CMatrix reduced = Q.adjoint() * s * Q;
        reduced = 0.5 * (reduced + reduced.adjoint()).eval();
        blk.real = blk.real && detail::is_real_matrix(reduced);
        blk.terms.push_back(std::move(reduced));
      }
      blk.initial = Q.adjoint() * v;
      blk.basis = std::move(Q);
      blocks_.push_back(std::move(blk));
    }
  }

  // Orthonormal basis of the smallest subspace containing v and invariant under all `ops`.
  // Falls back to the whole component if the numerical closure is not invariant.
  static CMatrix invariant_subspace(const std::vector<CMatrix>& ops, const CVector& v) {
    const Eigen::Index m = v.size();
    std::vector<CVector> basis;
    std::deque<CVector> queue{v};
    while (!queue.empty() && static_cast<Eigen::Index>(basis.size()) < m) {
      CVector w = queue.front();
      queue.pop_front();
      const double before = w.norm();
      if (before == 0.0) continue;
      for (int pass = 0; pass < 2; ++pass)
        for (const auto& q : basis) w -= q.dot(w) * q;
      const double after = w.norm();
      if (after <= 1e-10 * before) continue;
      w /= after;
      for (auto& x : w) {
        if (std::abs(x.real()) < 1e-15) x.real(0.0);
        if (std::abs(x.imag()) < 1e-15) x.imag(0.0);
      }
      for (const auto& op : ops) queue.push_back(op * w);
      basis.push_back(std::move(w));
    }
    CMatrix Q(m, static_cast<Eigen::Index>(basis.size()));
    for (std::size_t k = 0; k < basis.size(); ++k) Q.col(static_cast<Eigen::Index>(k)) = basis[k];
    const CMatrix P = CMatrix::Identity(m, m) - Q * Q.adjoint();
    for (const auto& op : ops) {
      const double scale = std::max(1.0, op.cwiseAbs().maxCoeff());
      if ((P * op * Q).cwiseAbs().maxCoeff() > 1e-9 * scale) return CMatrix::Identity(m, m);
    }
    return Q;
  }

  Eigen::Index dim_;
  std::size_t n_controls_;
  int n_steps_;
  std::vector<Block> blocks_;
};

/// Pulse samples at the step midpoints for every control of `problem`.
inline std::vector<RVector> sample_controls(const ControlProblem& problem, double T) {
  std::vector<RVector> out;
  for (const auto& c : problem.controls) {
    const RMatrix B = pulse_basis_table(c.pulse.omegas(), T, problem.n_steps);
    out.push_back(B * Eigen::Map<const RVector>(c.pulse.alphas().data(),
                                                static_cast<Eigen::Index>(c.pulse.alphas().size())));
  }
  return out;
}

/// Final state |psi_f> of `problem` at time T using its stored pulse coefficients.
inline CVector propagate(const ControlProblem& problem, double T) {
  const auto samples = sample_controls(problem, T);
  return Propagator(problem).propagate(T, samples);
}

/// exp(-i H dt) for a Hermitian matrix via eigendecomposition.
inline CMatrix hermitian_propagator(const CMatrix& H, double dt) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(H);
  const CVector phases = (-kI * dt * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Dense piecewise-constant unitary of `problem` at time T on the same grid as propagate().
inline CMatrix propagator_unitary(const ControlProblem& problem, double T) {
  if (!(T > 0.0)) throw DomainError("propagator_unitary: T must be positive");
  const auto samples = sample_controls(problem, T);
  const double dt = T / problem.n_steps;
  CMatrix U = CMatrix::Identity(problem.dimension(), problem.dimension());
  for (int s = 0; s < problem.n_steps; ++s) {
    CMatrix H = problem.drift;
    for (std::size_t i = 0; i < problem.controls.size(); ++i) H += samples[i][s] * problem.controls[i].hamiltonian;
    U = hermitian_propagator(H, dt) * U;
  }
  return U;
}

}  // namespace tcrab

#endif  // TCRAB_DYNAMICS_HPP_
