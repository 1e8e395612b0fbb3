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


#include <cmath>

#include <gtest/gtest.h>

#include "reference.hpp"
#include "tcrab/experiments.hpp"

namespace tcrab {
namespace {

CMatrix random_hermitian(int n, std::uint64_t seed) {
  Rng rng(seed);
  const Eigen::Index d = Eigen::Index{1} << n;
  CMatrix a(d, d);
  for (Eigen::Index i = 0; i < a.size(); ++i) a.data()[i] = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
  return 0.5 * (a + a.adjoint());
}

CMatrix random_unitary(int n, std::uint64_t seed) { return reference::expmi(random_hermitian(n, seed), 1.0); }

// Embedding through the Pauli decomposition: op = sum c_j G_j lifts to sum c_j lift(G_j).
CMatrix embed_via_paulis(const CMatrix& op, ChoiConvention c) {
  const int n = qubits_for_dimension(op.rows());
  const CVector coeffs = pauli_decomposition(op);
  const Eigen::Index D = Eigen::Index{1} << (2 * n);
  CMatrix out = CMatrix::Zero(D, D);
  for (std::uint64_t j = 0; j < pauli_basis_size(n); ++j)
    out += coeffs[static_cast<Eigen::Index>(j)] * pauli_matrix(lift_pauli(PauliString::from_index(n, j), c));
  return out;
}

class ChoiConventions : public ::testing::TestWithParam<ChoiConvention> {};

TEST_P(ChoiConventions, EmbedAgreesWithLiftedPaulis) {
  for (int n = 1; n <= 3; ++n) {
    const CMatrix H = random_hermitian(n, 10 + static_cast<std::uint64_t>(n));
    EXPECT_LT((embed_operator(H, GetParam()) - embed_via_paulis(H, GetParam())).cwiseAbs().maxCoeff(), 1e-13);
  }
}

TEST_P(ChoiConventions, BellPairsAreMaximallyEntangled) {
  for (int n = 1; n <= 3; ++n) {
    const CVector w = bell_pairs_state(n, GetParam());
    EXPECT_NEAR(w.norm(), 1.0, 1e-15);
    // Every non-identity Pauli on the acting qubits alone has zero expectation, so the
    // reduced state there is maximally mixed.
    for (std::uint64_t j = 1; j < pauli_basis_size(n); ++j)
      EXPECT_NEAR(std::abs(pauli_expectation(lift_pauli(PauliString::from_index(n, j), GetParam()), w)), 0.0, 1e-15);
  }
}

TEST_P(ChoiConventions, ChoiOverlapEqualsTraceFidelity) {
  const CMatrix target = builtin_gate("CZ", 2);
  const ChoiLift lift = make_choi_lift(target, GetParam());
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const CMatrix U = random_unitary(2, seed);
    const CVector psi = embed_operator(U, GetParam()) * lift.initial_state;
    EXPECT_NEAR(gate_fidelity_via_choi(psi, lift.target_state), unitary_gate_fidelity(U, target), 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(Conventions, ChoiConventions,
                         ::testing::Values(ChoiConvention::Interleaved, ChoiConvention::Block),
                         [](const auto& info) { return to_string(info.param); });

TEST(ChoiLift, InterleavedIndexMap) {
  EXPECT_EQ(acting_qubit(0, 2, ChoiConvention::Interleaved), 0);
  EXPECT_EQ(partner_qubit(0, 2, ChoiConvention::Interleaved), 1);
  EXPECT_EQ(acting_qubit(1, 2, ChoiConvention::Interleaved), 2);
  EXPECT_EQ(partner_qubit(1, 2, ChoiConvention::Interleaved), 3);
  EXPECT_EQ(acting_qubit(1, 2, ChoiConvention::Block), 1);
  EXPECT_EQ(partner_qubit(1, 2, ChoiConvention::Block), 3);
  EXPECT_EQ(make_choi_lift(builtin_gate("CZ", 2)).acting_qubits(), (std::vector<int>{0, 2}));
}

TEST(ChoiLift, DipoleJumpLiftsToOddQubits) {
  const auto lifted = lift_jumps(builtin_channels("dipole_dipole", 2, 0.03));
  ASSERT_EQ(lifted.entries().size(), 2u);
  EXPECT_EQ(lifted.entries()[1].pauli.label(), "ZIZI");
  EXPECT_EQ(lifted.entries()[1].rate, 0.03);
  EXPECT_EQ(lifted.entries()[0].pauli.label(), "IIII");
}

TEST(ChoiLift, CZTargetOverlapIsQuarter) {
  const ChoiLift lift = make_choi_lift(builtin_gate("CZ", 2));
  EXPECT_NEAR(lift.target_state.norm(), 1.0, 1e-15);
  EXPECT_NEAR(gate_fidelity_via_choi(lift.initial_state, lift.target_state), 0.25, 1e-15);
}

TEST(ChoiLift, GateFidelityIsPhaseInvariant) {
  const CMatrix target = builtin_gate("CNOT", 2);
  const ChoiLift lift = make_choi_lift(target);
  const CMatrix U = std::exp(kI * 0.77) * target;
  EXPECT_NEAR(gate_fidelity_via_choi(embed_operator(U) * lift.initial_state, lift.target_state), 1.0, 1e-14);
  EXPECT_NEAR(unitary_gate_fidelity(target, target), 1.0, 1e-15);
}

TEST(ChoiLift, RejectsNonUnitaryAndOversize) {
  CMatrix bad = CMatrix::Identity(4, 4);
  bad(0, 0) = 2.0;
  EXPECT_THROW(make_choi_lift(bad), ValidationError);
  EXPECT_THROW(bell_pairs_state(4), SizeError);
  EXPECT_THROW(builtin_gate("CZ", 3), ConfigurationError);
  EXPECT_THROW(builtin_gate("toffoli", 3), ConfigurationError);
  EXPECT_THROW(parse_choi_convention("reversed"), ConfigurationError);
}

TEST(LiftProblem, IdentityTargetWithoutDynamicsHasUnitFidelity) {
  GateProblem g;
  g.drift = CMatrix::Zero(4, 4);
  g.controls.push_back({pauli_matrix(PauliString::parse("XY")), PulseAnsatz({1.0})});
  g.target_gate = builtin_gate("identity", 2);
  const ControlProblem p = lift_problem(g);
  for (double T : {0.3, 2.0, 7.0}) EXPECT_NEAR(gate_fidelity_via_choi(propagate(p, T), p.target_state), 1.0, 1e-14);
}

TEST(LiftProblem, LiftedDynamicsGiveGateFidelity) {
  auto spec = default_spec("spin_cz_dipole");
  spec.ansatz.M = 3;
  Experiment e = build_experiment(spec);
  Rng rng(5);
  std::vector<double> a(7);
  for (auto& v : a) v = rng.uniform(-1, 1);
  e.problem.controls[0].pulse.set_alphas(a);
  e.gate->controls[0].pulse.set_alphas(a);
  ControlProblem logical;
  logical.drift = e.gate->drift;
  logical.controls = e.gate->controls;
  logical.initial_state = logical.target_state = CVector::Unit(4, 0);
  const double T = 1.7;
  const CMatrix U = propagator_unitary(logical, T);
  EXPECT_NEAR(gate_fidelity_via_choi(propagate(e.problem, T), e.problem.target_state),
              unitary_gate_fidelity(U, e.gate->target_gate), 1e-10);
}

TEST(LiftProblem, CertificatesSurviveLifting) {
  for (const char* name : {"spin_cz_dipole", "spin_cz_swap"}) {
    const Experiment e = build_experiment(default_spec(name));
    std::vector<CMatrix> base{e.gate->drift};
    for (const auto& c : e.gate->controls) base.push_back(c.hamiltonian);
    const auto& ln = *e.logical_noise;
    const bool before = certify_commutation(base, ln.jumps, ln.spectrum).commutes();
    const auto& nz = *e.problem.noise;
    const bool after = certify_commutation(e.problem.hamiltonian_terms(), nz.jumps, nz.spectrum).commutes();
    EXPECT_EQ(before, after) << name;
  }
}

}  // namespace
}  // namespace tcrab
