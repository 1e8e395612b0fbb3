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

#ifndef TCRAB_NOISE_HPP_
#define TCRAB_NOISE_HPP_

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tcrab/pauli.hpp"

namespace tcrab {

/*
 * Weighted Pauli jump operators.
 *
 * An entry (G, rate) contributes the Lindblad operator sqrt(rate / 2) * G, so that the
 * decay constant of a Pauli basis element is the plain sum of the rates of the jumps
 * anticommuting with it. Identity entries are allowed and do nothing.
 */
struct JumpEntry {
  PauliString pauli;
  double rate = 0.0;
};

class JumpOperatorSet {
 public:
  JumpOperatorSet() = default;

  JumpOperatorSet(int n_qubits, std::vector<JumpEntry> entries) : n_(n_qubits), entries_(std::move(entries)) {
    if (n_qubits < 1) throw DimensionError("JumpOperatorSet: qubit count must be positive");
    for (const auto& e : entries_) {
      if (e.pauli.n_qubits() != n_qubits) throw DimensionError("JumpOperatorSet: jump qubit count mismatch");
      if (!(e.rate >= 0.0) || !std::isfinite(e.rate))
        throw ValidationError("JumpOperatorSet: rates must be finite and non-negative");
    }
  }

  int n_qubits() const { return n_; }
  const std::vector<JumpEntry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

  /// Lindblad operator matrix sqrt(rate / 2) * G for entry k.
  CMatrix lindblad_operator(std::size_t k, int qubit_cap = kDenseQubitCap) const {
    const auto& e = entries_.at(k);
    return std::sqrt(e.rate / 2.0) * pauli_matrix(e.pauli, qubit_cap);
  }

 private:
  int n_ = 1;
  std::vector<JumpEntry> entries_;
};

/// Per-Pauli decay constants lambda_j over the canonical basis order.
struct DecaySpectrum {
  int n_qubits = 1;
  std::vector<double> lambdas;

  double at(const PauliString& p) const { return lambdas.at(p.index()); }
};

inline DecaySpectrum decay_spectrum(const JumpOperatorSet& jumps) {
  const int n = jumps.n_qubits();
  const std::uint64_t count = pauli_basis_size(n);
  DecaySpectrum out{n, std::vector<double>(count, 0.0)};
  for (std::uint64_t j = 0; j < count; ++j) {
    const PauliString g = PauliString::from_index(n, j);
    double sum = 0.0;
    for (const auto& e : jumps.entries())
      if (commutation_sign(g, e.pauli) < 0) sum += e.rate;
    out.lambdas[j] = sum;
  }
  return out;
}

/// Spectrum of a uniform decay: lambda_0 = 0, lambda_j = rate otherwise.
inline DecaySpectrum uniform_spectrum(int n_qubits, double rate) {
  if (!(rate >= 0.0)) throw ValidationError("uniform_spectrum: negative rate");
  DecaySpectrum out{n_qubits, std::vector<double>(pauli_basis_size(n_qubits), rate)};
  out.lambdas[0] = 0.0;
  return out;
}

/// p_k = 4^-N sum_j eta_jk exp(-lambda_j T), canonical order.
inline std::vector<double> pauli_error_probabilities(const DecaySpectrum& spectrum, double T) {
  if (!(T >= 0.0)) throw DomainError("pauli_error_probabilities: T must be non-negative");
  const int n = spectrum.n_qubits;
  const std::uint64_t count = pauli_basis_size(n);
  if (spectrum.lambdas.size() != count) throw DimensionError("pauli_error_probabilities: spectrum size mismatch");
  std::vector<double> decay(count);
  for (std::uint64_t j = 0; j < count; ++j) decay[j] = std::exp(-spectrum.lambdas[j] * T);
  std::vector<double> p(count, 0.0);
  for (std::uint64_t k = 0; k < count; ++k) {
    const PauliString gk = PauliString::from_index(n, k);
    double acc = 0.0;
    for (std::uint64_t j = 0; j < count; ++j)
      acc += commutation_sign(PauliString::from_index(n, j), gk) * decay[j];
    p[k] = acc / static_cast<double>(count);
  }
  return p;
}

/// Diagonal of the Pauli transfer matrix of the Pauli channel with probabilities p.
inline std::vector<double> ptm_diagonal_from_probabilities(int n_qubits, const std::vector<double>& p) {
  const std::uint64_t count = pauli_basis_size(n_qubits);
  if (p.size() != count) throw DimensionError("ptm_diagonal_from_probabilities: size mismatch");
  std::vector<double> diag(count, 0.0);
  for (std::uint64_t j = 0; j < count; ++j) {
    const PauliString gj = PauliString::from_index(n_qubits, j);
    double acc = 0.0;
    for (std::uint64_t k = 0; k < count; ++k)
      acc += commutation_sign(gj, PauliString::from_index(n_qubits, k)) * p[k];
    diag[j] = acc;
  }
  return diag;
}

enum class CommutationStatus { CommutesEigenoperator, CommutesBlockDiagonal, DoesNotCommute };

inline std::string to_string(CommutationStatus s) {
  switch (s) {
    case CommutationStatus::CommutesEigenoperator: return "CommutesEigenoperator";
    case CommutationStatus::CommutesBlockDiagonal: return "CommutesBlockDiagonal";
    case CommutationStatus::DoesNotCommute: return "DoesNotCommute";
  }
  return "?";
}

struct EigenoperatorValue {
  std::size_t term = 0;
  std::size_t jump = 0;
  double a = 0.0;  ///< [H_term, L_jump] = a L_jump
};

struct CommutationCertificate {
  CommutationStatus status = CommutationStatus::DoesNotCommute;
  std::vector<EigenoperatorValue> eigenvalues;
  /// Basis pair (i, j) and Hamiltonian term violating every block-diagonal condition.
  std::optional<std::pair<PauliString, PauliString>> violating_pair;
  std::optional<std::size_t> violating_term;

  bool commutes() const { return status != CommutationStatus::DoesNotCommute; }
};

namespace detail {

inline bool eigenoperator_condition(const std::vector<CMatrix>& terms, const JumpOperatorSet& jumps, double tol,
                                    std::vector<EigenoperatorValue>& values) {
  for (std::size_t k = 0; k < jumps.entries().size(); ++k) {
    const auto& e = jumps.entries()[k];
    if (e.rate == 0.0 || e.pauli.is_identity()) {
      for (std::size_t t = 0; t < terms.size(); ++t) values.push_back({t, k, 0.0});
      continue;
    }
    const CMatrix L = pauli_matrix(e.pauli);
    const double norm_l = L.squaredNorm();
    for (std::size_t t = 0; t < terms.size(); ++t) {
      const CMatrix& H = terms[t];
      const CMatrix C = commutator(H, L);
      const cplx a = (L.adjoint() * C).trace() / norm_l;
      const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
      if (std::abs(a.imag()) > tol * scale) return false;
      if ((C - a.real() * L).cwiseAbs().maxCoeff() > tol * scale) return false;
      values.push_back({t, k, a.real()});
    }
  }
  return true;
}

}  // namespace detail

/*
 * Sufficient conditions for the unitary and dissipative generators to commute.
 *
 * First tries [H_t, L_k] = a_k L_k for every Hamiltonian term and jump. Failing that,
 * checks that every pair of Pauli basis elements (G_i, G_j) satisfies one of:
 * lambda_i == lambda_j, [G_i, G_j] = 0, [G_i, H_t] = 0, [G_j, H_t] = 0, Tr(G_i G_j H_t) = 0,
 * for each term H_t. Degeneracy of lambda uses exact equality.
 */
inline CommutationCertificate certify_commutation(const std::vector<CMatrix>& hamiltonian_terms,
                                                  const JumpOperatorSet& jumps, const DecaySpectrum& spectrum,
                                                  double tol = 1e-10) {
  const int n = jumps.n_qubits();
  const Eigen::Index dim = Eigen::Index{1} << n;
  if (spectrum.n_qubits != n) throw DimensionError("certify_commutation: spectrum qubit count mismatch");
  for (const auto& h : hamiltonian_terms)
    if (h.rows() != dim || h.cols() != dim) throw DimensionError("certify_commutation: term dimension mismatch");

  CommutationCertificate cert;
  if (detail::eigenoperator_condition(hamiltonian_terms, jumps, tol, cert.eigenvalues)) {
    cert.status = CommutationStatus::CommutesEigenoperator;
    return cert;
  }
  cert.eigenvalues.clear();

  const std::uint64_t count = pauli_basis_size(n);
  const auto basis = all_pauli_strings(n);
  for (std::size_t t = 0; t < hamiltonian_terms.size(); ++t) {
    const CVector coeff = pauli_decomposition(hamiltonian_terms[t]);
    const double scale = std::max(1.0, coeff.cwiseAbs().maxCoeff());
    std::vector<char> commutes_with_h(count, 1);
    for (std::uint64_t i = 0; i < count; ++i) {
      for (std::uint64_t k = 0; k < count; ++k) {
        if (std::abs(coeff[static_cast<Eigen::Index>(k)]) > tol * scale &&
            commutation_sign(basis[i], basis[k]) < 0) {
          commutes_with_h[i] = 0;
          break;
        }
      }
    }
    for (std::uint64_t i = 0; i < count; ++i) {
      if (commutes_with_h[i]) continue;
      for (std::uint64_t j = i + 1; j < count; ++j) {
        if (spectrum.lambdas[i] == spectrum.lambdas[j]) continue;
        if (commutes_with_h[j]) continue;
        if (commutation_sign(basis[i], basis[j]) > 0) continue;
        // G_i G_j is proportional to G_{i xor j}; Tr(G_m H) = 2^n c_m.
        if (std::abs(coeff[static_cast<Eigen::Index>(i ^ j)]) <= tol * scale) continue;
        cert.status = CommutationStatus::DoesNotCommute;
        cert.violating_pair = std::make_pair(basis[i], basis[j]);
        cert.violating_term = t;
        return cert;
      }
    }
  }
  cert.status = CommutationStatus::CommutesBlockDiagonal;
  return cert;
}

struct ObservableTerm {
  PauliString pauli;
  double coefficient = 0.0;
};

/*
 * Noisy target observable rho_{g,noi}(T) = sum_j c_j G_j with
 * c_j = 2^-N exp(-lambda_j T) Tr(G_j rho_g), truncated below a magnitude threshold.
 */
struct NoisyTargetObservable {
  int n_qubits = 1;
  std::vector<ObservableTerm> terms;
  double evolution_time = 0.0;
  double truncation_threshold = 0.0;

  CMatrix to_matrix() const {
    const Eigen::Index dim = Eigen::Index{1} << n_qubits;
    CMatrix m = CMatrix::Zero(dim, dim);
    for (const auto& t : terms) m += t.coefficient * pauli_matrix(t.pauli);
    return m;
  }
};

inline constexpr double kDefaultTruncation = 1e-12;

inline void validate_density_matrix(const CMatrix& rho, const char* who, double tol = 1e-10) {
  if (rho.rows() != rho.cols()) throw DimensionError(std::string(who) + ": density matrix must be square");
  if (!is_hermitian(rho, tol)) throw ValidationError(std::string(who) + ": density matrix is not Hermitian");
  if (std::abs(rho.trace() - cplx{1.0, 0.0}) > tol)
    throw ValidationError(std::string(who) + ": density matrix does not have unit trace");
}

inline NoisyTargetObservable noisy_target(const CMatrix& rho_g, const DecaySpectrum& spectrum, double T,
                                          double threshold = kDefaultTruncation) {
  validate_density_matrix(rho_g, "noisy_target");
  if (!(T >= 0.0)) throw DomainError("noisy_target: T must be non-negative");
  if (!(threshold >= 0.0)) throw DomainError("noisy_target: threshold must be non-negative");
  const int n = qubits_for_dimension(rho_g.rows());
  if (spectrum.n_qubits != n) throw DimensionError("noisy_target: spectrum qubit count mismatch");
  const std::uint64_t count = pauli_basis_size(n);
  if (spectrum.lambdas.size() != count) throw DimensionError("noisy_target: spectrum size mismatch");
  if (spectrum.lambdas[0] != 0.0) throw ValidationError("noisy_target: identity decay constant must vanish");

  NoisyTargetObservable obs{n, {}, T, threshold};
  const double norm = 1.0 / static_cast<double>(Eigen::Index{1} << n);
  for (std::uint64_t j = 0; j < count; ++j) {
    const double lambda = spectrum.lambdas[j];
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ValidationError("noisy_target: invalid decay constant");
    const PauliString g = PauliString::from_index(n, j);
    const double c = norm * std::exp(-lambda * T) * pauli_overlap(rho_g, g);
    if (std::abs(c) >= threshold) obs.terms.push_back({g, c});
  }
  std::stable_sort(obs.terms.begin(), obs.terms.end(), [](const ObservableTerm& a, const ObservableTerm& b) {
    return std::abs(a.coefficient) > std::abs(b.coefficient);
  });
  return obs;
}

enum class BuiltinChannel { Depolarizing, LocalDephasing, DipoleDipole };

inline BuiltinChannel parse_builtin_channel(const std::string& name) {
  if (name == "depolarizing") return BuiltinChannel::Depolarizing;
  if (name == "local_dephasing") return BuiltinChannel::LocalDephasing;
  if (name == "dipole_dipole") return BuiltinChannel::DipoleDipole;
  throw ConfigurationError("unknown noise channel '" + name + "'");
}

/*
 * Built-in channels, all parameterized so that `rate` is the decay constant seen by
 * the affected Pauli directions:
 *   depolarizing     every non-identity Pauli at 2 rate / 4^N (lambda_j = rate, j != 0)
 *   local_dephasing  Z_q at `rate` on each qubit (lambda_j = rate * wt_X(G_j))
 *   dipole_dipole    I and Z_0 Z_1 at `rate` each (lambda in {0, rate}); two qubits only
 */
inline JumpOperatorSet builtin_channels(BuiltinChannel channel, int n_qubits, double rate) {
  if (n_qubits < 1) throw DimensionError("builtin_channels: qubit count must be positive");
  if (!(rate >= 0.0)) throw ValidationError("builtin_channels: negative rate");
  std::vector<JumpEntry> entries;
  switch (channel) {
    case BuiltinChannel::Depolarizing: {
      const std::uint64_t count = pauli_basis_size(n_qubits);
      const double each = 2.0 * rate / static_cast<double>(count);
      for (std::uint64_t j = 1; j < count; ++j) entries.push_back({PauliString::from_index(n_qubits, j), each});
      break;
    }
    case BuiltinChannel::LocalDephasing:
      for (int q = 0; q < n_qubits; ++q) entries.push_back({PauliString::single(n_qubits, q, 'Z'), rate});
      break;
    case BuiltinChannel::DipoleDipole:
      if (n_qubits != 2) throw DimensionError("builtin_channels: dipole_dipole requires exactly 2 qubits");
      entries.push_back({PauliString::identity(2), rate});
      entries.push_back({PauliString::parse("ZZ"), rate});
      break;
  }
  return {n_qubits, std::move(entries)};
}

inline JumpOperatorSet builtin_channels(const std::string& name, int n_qubits, double rate) {
  return builtin_channels(parse_builtin_channel(name), n_qubits, rate);
}

/// Jump operators together with the decay spectrum the fast path evaluates against.
struct NoiseModel {
  std::string type = "none";
  double rate = 0.0;
  JumpOperatorSet jumps;
  DecaySpectrum spectrum;

  int n_qubits() const { return jumps.n_qubits(); }
  bool is_noiseless() const {
    return std::all_of(spectrum.lambdas.begin(), spectrum.lambdas.end(), [](double l) { return l == 0.0; });
  }
};

inline NoiseModel make_noise_model(JumpOperatorSet jumps, std::string type = "custom", double rate = 0.0) {
  NoiseModel m;
  m.type = std::move(type);
  m.rate = rate;
  m.spectrum = decay_spectrum(jumps);
  m.jumps = std::move(jumps);
  return m;
}

inline NoiseModel noiseless_model(int n_qubits) { return make_noise_model(JumpOperatorSet(n_qubits, {}), "none"); }

/// Depolarizing spectrum is set directly so every non-identity lambda equals `rate` exactly.
inline NoiseModel builtin_noise_model(const std::string& name, int n_qubits, double rate) {
  const BuiltinChannel ch = parse_builtin_channel(name);
  NoiseModel m = make_noise_model(builtin_channels(ch, n_qubits, rate), name, rate);
  if (ch == BuiltinChannel::Depolarizing) m.spectrum = uniform_spectrum(n_qubits, rate);
  return m;
}

}  // namespace tcrab

#endif  // TCRAB_NOISE_HPP_
