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
#include "tcrab/noise.hpp"

namespace tcrab {
namespace {

std::vector<CMatrix> scaled_jumps(const JumpOperatorSet& jumps) {
  std::vector<CMatrix> out;
  for (std::size_t k = 0; k < jumps.entries().size(); ++k) out.push_back(jumps.lindblad_operator(k));
  return out;
}

double lambda_of(const DecaySpectrum& s, const char* label) { return s.at(PauliString::parse(label)); }

TEST(DecaySpectrum, SingleQubitDephasing) {
  const double g = 0.3;
  const auto s = decay_spectrum(builtin_channels("local_dephasing", 1, g));
  EXPECT_EQ(lambda_of(s, "I"), 0.0);
  EXPECT_EQ(lambda_of(s, "Z"), 0.0);
  EXPECT_DOUBLE_EQ(lambda_of(s, "X"), g);
  EXPECT_DOUBLE_EQ(lambda_of(s, "Y"), g);
}

TEST(DecaySpectrum, DipoleGroupIsZeroOnCommutant) {
  const double g = 0.03;
  const auto s = decay_spectrum(builtin_channels("dipole_dipole", 2, g));
  const PauliString zz = PauliString::parse("ZZ");
  for (const auto& p : all_pauli_strings(2)) EXPECT_EQ(s.at(p), commutation_sign(p, zz) > 0 ? 0.0 : g) << p.label();
}

TEST(DecaySpectrum, EmptyJumpSetIsZero) {
  const auto s = decay_spectrum(JumpOperatorSet(2, {}));
  for (double l : s.lambdas) EXPECT_EQ(l, 0.0);
}

TEST(DecaySpectrum, LocalDephasingCountsXWeight) {
  const double g = 0.05;
  const auto s = decay_spectrum(builtin_channels("local_dephasing", 2, g));
  for (const auto& p : all_pauli_strings(2)) EXPECT_DOUBLE_EQ(s.at(p), g * p.x_weight()) << p.label();
}

TEST(DecaySpectrum, DepolarizingIsUniform) {
  const double rate = 0.01;
  const auto s = decay_spectrum(builtin_channels("depolarizing", 2, rate));
  EXPECT_EQ(s.lambdas[0], 0.0);
  for (std::size_t j = 1; j < s.lambdas.size(); ++j) EXPECT_NEAR(s.lambdas[j], rate, 1e-15);
}

TEST(DecaySpectrum, NegativeRateRejected) {
  EXPECT_THROW(JumpOperatorSet(1, {{PauliString::parse("Z"), -1.0}}), ValidationError);
  EXPECT_THROW(builtin_channels("local_dephasing", 1, -0.1), ValidationError);
  EXPECT_THROW(builtin_channels("amplitude_damping", 1, 0.1), ConfigurationError);
  EXPECT_THROW(builtin_channels("dipole_dipole", 3, 0.1), DimensionError);
}

TEST(ErrorProbabilities, SingleQubitDephasingClosedForm) {
  const double g = 0.2, T = 1.7;
  const auto p = pauli_error_probabilities(decay_spectrum(builtin_channels("local_dephasing", 1, g)), T);
  const double e = std::exp(-g * T);
  EXPECT_NEAR(p[PauliString::parse("I").index()], (1 + e) / 2, 1e-15);
  EXPECT_NEAR(p[PauliString::parse("Z").index()], (1 - e) / 2, 1e-15);
  EXPECT_NEAR(p[PauliString::parse("X").index()], 0.0, 1e-15);
  EXPECT_NEAR(p[PauliString::parse("Y").index()], 0.0, 1e-15);
}

TEST(ErrorProbabilities, ZeroTimeIsIdentity) {
  const auto p = pauli_error_probabilities(decay_spectrum(builtin_channels("depolarizing", 2, 0.4)), 0.0);
  EXPECT_DOUBLE_EQ(p[0], 1.0);
  for (std::size_t k = 1; k < p.size(); ++k) EXPECT_NEAR(p[k], 0.0, 1e-16);
  EXPECT_THROW(pauli_error_probabilities(decay_spectrum(JumpOperatorSet(1, {})), -1.0), DomainError);
}

// Probabilities from the spectrum versus the Pauli-mixture reading of the exponentiated
// dissipator: the PTM of a Pauli channel has diagonal sum_k eta_jk p_k.
TEST(ErrorProbabilities, TwoQubitDepolarizingMatchesDenseExponential) {
  const double rate = 0.5;  // gamma T = 0.5 at T = 1
  const auto jumps = builtin_channels("depolarizing", 2, rate);
  const CMatrix S = reference::lindbladian(CMatrix::Zero(4, 4), scaled_jumps(jumps));
  const RMatrix R = reference::ptm(CMatrix(S.exp()), 2);
  const auto p = pauli_error_probabilities(decay_spectrum(jumps), 1.0);
  const auto diag = ptm_diagonal_from_probabilities(2, p);
  double sum = 0.0;
  for (std::size_t j = 0; j < p.size(); ++j) {
    EXPECT_NEAR(diag[j], R(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)), 1e-12);
    EXPECT_GE(p[j], -1e-15);
    sum += p[j];
  }
  EXPECT_NEAR(sum, 1.0, 1e-14);
}

struct ChannelCase {
  std::string name;
  int n;
  double rate;
};

class PtmProperty : public ::testing::TestWithParam<ChannelCase> {};

TEST_P(PtmProperty, ExponentiatedDissipatorIsDiagonalWithSpectrum) {
  const auto& c = GetParam();
  const auto jumps = builtin_channels(c.name, c.n, c.rate);
  const auto spectrum = decay_spectrum(jumps);
  const CMatrix S = reference::lindbladian(CMatrix::Zero(1 << c.n, 1 << c.n), scaled_jumps(jumps));
  for (double T : {0.3, 1.0, 4.0}) {
    const RMatrix R = reference::ptm(CMatrix((S * T).exp()), c.n);
    for (Eigen::Index i = 0; i < R.rows(); ++i)
      for (Eigen::Index j = 0; j < R.cols(); ++j) {
        const double expected = i == j ? std::exp(-spectrum.lambdas[static_cast<std::size_t>(i)] * T) : 0.0;
        EXPECT_NEAR(R(i, j), expected, 1e-12) << c.name << " T=" << T << " (" << i << "," << j << ")";
      }
  }
}

TEST_P(PtmProperty, ProbabilityRoundTrip) {
  const auto& c = GetParam();
  const auto spectrum = decay_spectrum(builtin_channels(c.name, c.n, c.rate));
  const double T = 2.3;
  const auto diag = ptm_diagonal_from_probabilities(c.n, pauli_error_probabilities(spectrum, T));
  for (std::size_t j = 0; j < diag.size(); ++j) EXPECT_NEAR(diag[j], std::exp(-spectrum.lambdas[j] * T), 1e-12);
}

INSTANTIATE_TEST_SUITE_P(Channels, PtmProperty,
                         ::testing::Values(ChannelCase{"local_dephasing", 1, 0.3}, ChannelCase{"local_dephasing", 2, 0.05},
                                           ChannelCase{"depolarizing", 1, 0.2}, ChannelCase{"depolarizing", 2, 0.01},
                                           ChannelCase{"dipole_dipole", 2, 0.03}),
                         [](const auto& info) { return info.param.name + "_" + std::to_string(info.param.n); });

TEST(GroupChannel, ExponentialIsMixtureOfIdentityAndTwirl) {
  // Uniform rates over a Pauli group F: e^{L T} = e^{-gT} I + (1 - e^{-gT}) J_F with
  // J_F(rho) = |F|^-1 sum_{F in F} F rho F.
  const double g = 0.4, T = 1.3;
  const auto jumps = builtin_channels("dipole_dipole", 2, g);
  const CMatrix S = reference::lindbladian(CMatrix::Zero(4, 4), scaled_jumps(jumps));
  const CMatrix E = (S * T).exp();
  const CMatrix ZZ = pauli_matrix(PauliString::parse("ZZ"));
  const CMatrix J = 0.5 * (CMatrix::Identity(16, 16) + kron(ZZ.conjugate(), ZZ));
  const CMatrix expected = std::exp(-g * T) * CMatrix::Identity(16, 16) + (1 - std::exp(-g * T)) * J;
  EXPECT_LT((E - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(NoisyTarget, ZeroTimeReconstructsTarget) {
  CVector psi(4);
  psi << 0.5, cplx(0, 0.5), -0.5, 0.5;
  const CMatrix rho = density_matrix(psi);
  const auto obs = noisy_target(rho, decay_spectrum(builtin_channels("local_dephasing", 2, 0.3)), 0.0, 0.0);
  EXPECT_LT((obs.to_matrix() - rho).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NoisyTarget, DepolarizingIsShrunkTowardsIdentity) {
  CVector psi = CVector::Zero(4);
  psi[0] = psi[3] = 1 / std::sqrt(2.0);
  const CMatrix rho = density_matrix(psi);
  const double l = 0.1, T = 3.0;
  const auto obs = noisy_target(rho, uniform_spectrum(2, l), T, 0.0);
  const CMatrix expected = std::exp(-l * T) * rho + 0.25 * (1 - std::exp(-l * T)) * CMatrix::Identity(4, 4);
  EXPECT_LT((obs.to_matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(NoisyTarget, DephasedPlusState) {
  CVector plus(2);
  plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
  const double g = 0.5, T = 2.0;  // gamma T = 1
  const auto obs = noisy_target(density_matrix(plus), decay_spectrum(builtin_channels("local_dephasing", 1, g)), T);
  bool found = false;
  for (const auto& t : obs.terms)
    if (t.pauli.label() == "X") {
      EXPECT_NEAR(t.coefficient, std::exp(-1.0) / 2, 1e-15);
      found = true;
    }
  EXPECT_TRUE(found);
}

TEST(NoisyTarget, SortedAndTruncated) {
  CVector psi(2);
  psi << std::cos(0.3), std::sin(0.3);
  const auto obs = noisy_target(density_matrix(psi), uniform_spectrum(1, 1.0), 40.0, 1e-12);
  for (std::size_t k = 1; k < obs.terms.size(); ++k)
    EXPECT_GE(std::abs(obs.terms[k - 1].coefficient), std::abs(obs.terms[k].coefficient));
  EXPECT_EQ(obs.terms.size(), 1u);  // e^-40 / 2 is below the threshold
}

TEST(NoisyTarget, RejectsInvalidTarget) {
  const CMatrix rho = 2.0 * CMatrix::Identity(2, 2);
  EXPECT_THROW(noisy_target(rho, uniform_spectrum(1, 0.1), 1.0), ValidationError);
}

CMatrix Pm(const char* s) { return pauli_matrix(PauliString::parse(s)); }

TEST(Certificate, DipoleChannelCommutesWithZTerms) {
  const auto jumps = builtin_channels("dipole_dipole", 2, 0.03);
  const auto cert = certify_commutation({Pm("ZI"), Pm("IZ"), Pm("ZZ")}, jumps, decay_spectrum(jumps));
  EXPECT_EQ(cert.status, CommutationStatus::CommutesEigenoperator);
  for (const auto& e : cert.eigenvalues) EXPECT_EQ(e.a, 0.0);
}

TEST(Certificate, DepolarizingCommutesWithAnything) {
  const auto model = builtin_noise_model("depolarizing", 2, 0.01);
  CMatrix H = Pm("XY") + 0.3 * Pm("ZI") - 1.7 * Pm("YX");
  const auto cert = certify_commutation({H, Pm("XX")}, model.jumps, model.spectrum);
  EXPECT_TRUE(cert.commutes());
  EXPECT_EQ(cert.status, CommutationStatus::CommutesBlockDiagonal);
}

TEST(Certificate, DephasingAgainstSwapDoesNotCommute) {
  // SWAP exchanges Z1 and Z2, so neither condition holds for single-qubit dephasing.
  const auto jumps = builtin_channels("local_dephasing", 2, 0.05);
  CMatrix swap = 0.5 * (Pm("II") + Pm("XX") + Pm("YY") + Pm("ZZ"));
  const auto cert = certify_commutation({Pm("ZI"), Pm("IZ"), swap}, jumps, decay_spectrum(jumps));
  EXPECT_EQ(cert.status, CommutationStatus::DoesNotCommute);
  EXPECT_TRUE(cert.violating_pair.has_value());
}

TEST(Certificate, DephasingCommutesWithZDrift) {
  const auto jumps = builtin_channels("local_dephasing", 1, 0.1);
  const auto cert = certify_commutation({Pm("Z")}, jumps, decay_spectrum(jumps));
  EXPECT_EQ(cert.status, CommutationStatus::CommutesEigenoperator);
}

TEST(NoiseModel, BuiltinDepolarizingSpectrumIsExact) {
  const auto m = builtin_noise_model("depolarizing", 3, 0.07);
  EXPECT_EQ(m.spectrum.lambdas[0], 0.0);
  for (std::size_t j = 1; j < m.spectrum.lambdas.size(); ++j) EXPECT_EQ(m.spectrum.lambdas[j], 0.07);
  EXPECT_TRUE(noiseless_model(2).is_noiseless());
}

}  // namespace
}  // namespace tcrab
