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


#ifndef TCRAB_CHOI_HPP_
#define TCRAB_CHOI_HPP_

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tcrab/dynamics.hpp"
#include "tcrab/noise.hpp"

namespace tcrab {

/*
 * Placement of the n logical qubits inside the 2n-qubit doubled register.
 *   Interleaved  logical i acts on qubit 2i, its partner is 2i+1 (0-based; these are the
 *                odd-numbered qubits 1, 3, ... when counting from one)
 *   Block        logical i acts on qubit i, its partner is n+i
 */
enum class ChoiConvention { Interleaved, Block };

inline ChoiConvention parse_choi_convention(const std::string& name) {
  if (name == "interleaved") return ChoiConvention::Interleaved;
  if (name == "block") return ChoiConvention::Block;
  throw ConfigurationError("unknown Choi qubit convention '" + name + "'");
}

inline std::string to_string(ChoiConvention c) { return c == ChoiConvention::Interleaved ? "interleaved" : "block"; }

inline constexpr int kMaxLogicalQubits = 3;

inline int acting_qubit(int logical, [[maybe_unused]] int n, ChoiConvention c) { return c == ChoiConvention::Interleaved ? 2 * logical : logical; }
inline int partner_qubit(int logical, int n, ChoiConvention c) {
  return c == ChoiConvention::Interleaved ? 2 * logical + 1 : n + logical;
}

namespace detail {

inline void check_logical(int n) {
  if (n < 1 || n > kMaxLogicalQubits)
    throw SizeError("Choi lift supports 1 to " + std::to_string(kMaxLogicalQubits) + " logical qubits");
}

/// Basis index of the doubled register with logical bits `s` and partner bits `a`.
inline Eigen::Index doubled_index(std::uint64_t s, std::uint64_t a, int n, ChoiConvention c) {
  std::uint64_t out = 0;
  const int total = 2 * n;
  for (int i = 0; i < n; ++i) {
    const std::uint64_t sb = (s >> (n - 1 - i)) & 1u, ab = (a >> (n - 1 - i)) & 1u;
    out |= sb << (total - 1 - acting_qubit(i, n, c));
    out |= ab << (total - 1 - partner_qubit(i, n, c));
  }
  return static_cast<Eigen::Index>(out);
}

}  // namespace detail

/// n Bell pairs (|00> + |11>)/sqrt(2), one per (acting, partner) qubit pair.
inline CVector bell_pairs_state(int n, ChoiConvention c = ChoiConvention::Interleaved) {
  detail::check_logical(n);
  const std::uint64_t d = std::uint64_t{1} << n;
  CVector w = CVector::Zero(Eigen::Index{1} << (2 * n));
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (std::uint64_t s = 0; s < d; ++s) w[detail::doubled_index(s, s, n, c)] = amp;
  return w;
}

/// op on the acting qubits, identity on the partners.
inline CMatrix embed_operator(const CMatrix& op, ChoiConvention c = ChoiConvention::Interleaved) {
  const int n = qubits_for_dimension(op.rows());
  detail::check_logical(n);
  if (op.cols() != op.rows()) throw DimensionError("embed_operator: operator must be square");
  const std::uint64_t d = std::uint64_t{1} << n;
  const Eigen::Index D = Eigen::Index{1} << (2 * n);
  CMatrix out = CMatrix::Zero(D, D);
  for (std::uint64_t a = 0; a < d; ++a)
    for (std::uint64_t r = 0; r < d; ++r)
      for (std::uint64_t s = 0; s < d; ++s) {
        const cplx v = op(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(s));
        if (v != cplx{0.0, 0.0}) out(detail::doubled_index(r, a, n, c), detail::doubled_index(s, a, n, c)) = v;
      }
  return out;
}

/// Pauli string extended with identity on the partner qubits.
inline PauliString lift_pauli(const PauliString& p, ChoiConvention c = ChoiConvention::Interleaved) {
  const int n = p.n_qubits();
  detail::check_logical(n);
  std::uint32_t x = 0, z = 0;
  for (int i = 0; i < n; ++i) {
    const int q = acting_qubit(i, n, c);
    x |= ((p.x_bits() >> i) & 1u) << q;
    z |= ((p.z_bits() >> i) & 1u) << q;
  }
  return {2 * n, x, z, p.phase()};
}

inline JumpOperatorSet lift_jumps(const JumpOperatorSet& jumps, ChoiConvention c = ChoiConvention::Interleaved) {
  std::vector<JumpEntry> out;
  for (const auto& e : jumps.entries()) out.push_back({lift_pauli(e.pauli, c), e.rate});
  return {2 * jumps.n_qubits(), std::move(out)};
}

/// Gate compilation problem on the logical register.
struct GateProblem {
  CMatrix drift;
  std::vector<ControlTerm> controls;
  CMatrix target_gate;
  std::optional<NoiseModel> noise;
  int n_steps = kDefaultSteps;
  double T_max = 10.0;
};

struct ChoiLift {
  int logical_qubits = 0;
  int total_qubits = 0;
  ChoiConvention convention = ChoiConvention::Interleaved;
  CMatrix target_gate;
  CVector initial_state;  ///< Bell pairs |omega>
  CVector target_state;   ///< (U_target on acting qubits)|omega>

  std::vector<int> acting_qubits() const {
    std::vector<int> q;
    for (int i = 0; i < logical_qubits; ++i) q.push_back(acting_qubit(i, logical_qubits, convention));
    return q;
  }
};

inline ChoiLift make_choi_lift(const CMatrix& target_gate, ChoiConvention c = ChoiConvention::Interleaved) {
  if (target_gate.rows() != target_gate.cols()) throw DimensionError("make_choi_lift: target gate must be square");
  const int n = qubits_for_dimension(target_gate.rows());
  detail::check_logical(n);
  if (!is_unitary(target_gate)) throw ValidationError("make_choi_lift: target gate is not unitary");
  ChoiLift lift{n, 2 * n, c, target_gate, bell_pairs_state(n, c), {}};
  lift.target_state = embed_operator(target_gate, c) * lift.initial_state;
  return lift;
}

/// State-transfer problem on 2n qubits whose fidelity is the gate fidelity of the base problem.
inline ControlProblem lift_problem(const GateProblem& base, ChoiConvention c = ChoiConvention::Interleaved) {
  const ChoiLift lift = make_choi_lift(base.target_gate, c);
  if (base.drift.rows() != base.target_gate.rows()) throw DimensionError("lift_problem: drift and gate dimensions differ");
  ControlProblem p;
  p.drift = embed_operator(base.drift, c);
  for (const auto& ct : base.controls) p.controls.push_back({embed_operator(ct.hamiltonian, c), ct.pulse});
  p.initial_state = lift.initial_state;
  p.target_state = lift.target_state;
  if (base.noise) {
    NoiseModel lifted = make_noise_model(lift_jumps(base.noise->jumps, c), base.noise->type, base.noise->rate);
    p.noise = std::move(lifted);
  }
  p.n_steps = base.n_steps;
  p.T_max = base.T_max;
  p.validate();
  return p;
}

/// |<target|psi_f>|^2 on the doubled register.
inline double gate_fidelity_via_choi(const CVector& psi_f_lifted, const CVector& target_lifted) {
  if (psi_f_lifted.size() != target_lifted.size()) throw DimensionError("gate_fidelity_via_choi: dimension mismatch");
  const int total = qubits_for_dimension(psi_f_lifted.size());
  if (total % 2 != 0) throw DimensionError("gate_fidelity_via_choi: register is not doubled");
  return std::norm(target_lifted.dot(psi_f_lifted));
}

/// |Tr(U^dagger U_target) / 2^n|^2 from dense unitaries.
inline double unitary_gate_fidelity(const CMatrix& U, const CMatrix& U_target) {
  if (U.rows() != U_target.rows() || U.cols() != U_target.cols())
    throw DimensionError("unitary_gate_fidelity: dimension mismatch");
  return std::norm((U.adjoint() * U_target).trace() / static_cast<double>(U.rows()));
}

/// Named target gates: "identity" (any n), "CZ" and "CNOT" (two qubits).
inline CMatrix builtin_gate(const std::string& name, int n) {
  if (name == "identity") return CMatrix::Identity(Eigen::Index{1} << n, Eigen::Index{1} << n);
  if (name == "CZ" || name == "CNOT") {
    if (n != 2) throw ConfigurationError("gate '" + name + "' needs exactly 2 qubits");
    CMatrix g = CMatrix::Identity(4, 4);
    if (name == "CZ") {
      g(3, 3) = -1.0;
    } else {
      g(2, 2) = 0.0;
      g(3, 3) = 0.0;
      g(2, 3) = 1.0;
      g(3, 2) = 1.0;
    }
    return g;
  }
  throw ConfigurationError("unknown gate '" + name + "'");
}

}  // namespace tcrab

#endif  // TCRAB_CHOI_HPP_
