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


#ifndef TCRAB_FIDELITY_HPP_
#define TCRAB_FIDELITY_HPP_

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "tcrab/dynamics.hpp"
#include "tcrab/logging.hpp"
#include "tcrab/noise.hpp"

namespace tcrab {

/// Clamps a fidelity into [0, 1], logging and counting every value that needed it.
inline double clamp_fidelity(double f, const char* who) {
  if (!std::isfinite(f)) throw NumericalFailure(std::string(who) + ": non-finite fidelity");
  if (f >= 0.0 && f <= 1.0) return f;
  ++clamp_event_count();
  log().info("{}: clamped fidelity {:.17g} into [0, 1]", who, f);
  return f < 0.0 ? 0.0 : 1.0;
}

/// |<psi_g|psi_f>|^2
inline double noiseless_fidelity(const CVector& psi_f, const CVector& psi_g) {
  if (psi_f.size() != psi_g.size()) throw DimensionError("noiseless_fidelity: dimension mismatch");
  return clamp_fidelity(std::norm(psi_g.dot(psi_f)), "noiseless_fidelity");
}

/// Sum_j c_j <psi_f|G_j|psi_f> over the observable's retained terms.
inline double noisy_fidelity(const CVector& psi_f, const NoisyTargetObservable& observable) {
  if (psi_f.size() != (Eigen::Index{1} << observable.n_qubits))
    throw DimensionError("noisy_fidelity: dimension mismatch");
  double f = 0.0;
  for (const auto& t : observable.terms) f += t.coefficient * pauli_expectation(t.pauli, psi_f).real();
  return clamp_fidelity(f, "noisy_fidelity");
}

/// Same, but refuses an observable whose noise model has no commutation certificate.
inline double noisy_fidelity(const CVector& psi_f, const NoisyTargetObservable& observable,
                             const CommutationCertificate& certificate, bool allow_uncertified = false) {
  if (!certificate.commutes() && !allow_uncertified)
    throw ContractViolation("noisy_fidelity: noise model is not certified to commute with the Hamiltonian");
  return noisy_fidelity(psi_f, observable);
}

/// e^{-lambda T} F_U + 2^-N (1 - e^{-lambda T})
inline double depolarizing_fidelity(double F_U, double lambda, double T, int n_qubits) {
  if (!(F_U >= -1e-12 && F_U <= 1.0 + 1e-12)) throw DomainError("depolarizing_fidelity: F_U outside [0, 1]");
  if (!(lambda >= 0.0)) throw DomainError("depolarizing_fidelity: negative decay rate");
  if (!(T >= 0.0)) throw DomainError("depolarizing_fidelity: negative time");
  if (n_qubits < 1) throw DimensionError("depolarizing_fidelity: qubit count must be positive");
  const double e = std::exp(-lambda * T);
  return clamp_fidelity(e * F_U + std::ldexp(1.0 - e, -n_qubits), "depolarizing_fidelity");
}

struct CommutantOverlap {
  PauliString pauli;
  double target_overlap = 0.0;  ///< Tr(G rho_g)
};

/// Tr(G rho_g) for every G of the commutant, zero overlaps dropped.
inline std::vector<CommutantOverlap> commutant_overlaps(const CMatrix& rho_g, const std::vector<PauliString>& commutant) {
  std::vector<CommutantOverlap> out;
  for (const auto& g : commutant) {
    const double v = pauli_overlap(rho_g, g);
    if (v != 0.0) out.push_back({g, v});
  }
  return out;
}

/// e^{-gamma T} Tr(rho_g rho_f) + 2^-N (1 - e^{-gamma T}) sum_{G in commutant} Tr(rho_g G) Tr(G rho_f)
inline double group_channel_fidelity(const CMatrix& rho_g, const CMatrix& rho_f,
                                     const std::vector<CommutantOverlap>& overlaps, double gamma, double T) {
  if (rho_g.rows() != rho_f.rows() || rho_g.cols() != rho_f.cols())
    throw DimensionError("group_channel_fidelity: dimension mismatch");
  const int n = qubits_for_dimension(rho_g.rows());
  const double e = std::exp(-gamma * T);
  double s = 0.0;
  for (const auto& o : overlaps) s += o.target_overlap * pauli_overlap(rho_f, o.pauli);
  const double direct = (rho_g * rho_f).trace().real();
  return clamp_fidelity(e * direct + std::ldexp(1.0 - e, -n) * s, "group_channel_fidelity");
}

/*
 * Drift-induced oscillation of Tr(rho_g,noi e^{-i w K0 T} rho_c e^{i w K0 T}) for an
 * involution K0, written as a + b cos(2 w T) + c sin(2 w T).
 */
struct OscillationComponents {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double omega = 0.0;

  double at(double T) const { return a + b * std::cos(2.0 * omega * T) + c * std::sin(2.0 * omega * T); }
};

inline OscillationComponents oscillation_components(const CMatrix& rho_g_noi, const CMatrix& rho_c, const CMatrix& K0,
                                                    double omega) {
  const Eigen::Index d = K0.rows();
  if (K0.cols() != d || rho_g_noi.rows() != d || rho_c.rows() != d)
    throw DimensionError("oscillation_components: dimension mismatch");
  if ((K0 * K0 - CMatrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw ValidationError("oscillation_components: K0 is not an involution");
  const cplx t0 = (rho_g_noi * rho_c).trace();
  const cplx t1 = (rho_g_noi * K0 * rho_c * K0).trace();
  const cplx t2 = (rho_g_noi * K0 * rho_c).trace();
  const cplx t3 = (rho_g_noi * rho_c * K0).trace();
  OscillationComponents out;
  out.a = 0.5 * (t0 + t1).real();
  out.b = 0.5 * (t0 - t1).real();
  out.c = (-0.5 * kI * (t2 - t3)).real();
  out.omega = omega;
  return out;
}

enum class FidelityMode { Noiseless, CommutingNoise, DepolarizingClosedForm, GroupChannel };

inline FidelityMode parse_fidelity_mode(const std::string& name) {
  if (name == "noiseless") return FidelityMode::Noiseless;
  if (name == "commuting_noise") return FidelityMode::CommutingNoise;
  if (name == "depolarizing_closed_form") return FidelityMode::DepolarizingClosedForm;
  if (name == "group_channel") return FidelityMode::GroupChannel;
  throw ConfigurationError("unknown fidelity mode '" + name + "'");
}

inline std::string to_string(FidelityMode m) {
  switch (m) {
    case FidelityMode::Noiseless: return "noiseless";
    case FidelityMode::CommutingNoise: return "commuting_noise";
    case FidelityMode::DepolarizingClosedForm: return "depolarizing_closed_form";
    case FidelityMode::GroupChannel: return "group_channel";
  }
  return "?";
}

/*
 * Fidelity of a final pure state against the problem's target, with the noise folded
 * into the target observable. Overlaps Tr(G_j rho_g) are computed once; evaluating at a
 * new T only rescales them by 2^-N e^{-lambda_j T}.
 */
class FidelityEvaluator {
 public:
  struct Term {
    PauliString pauli;
    double target_overlap = 0.0;
    double lambda = 0.0;
  };

  FidelityEvaluator(const ControlProblem& problem, FidelityMode mode, bool allow_uncertified = false,
                    double truncation = kDefaultTruncation)
      : mode_(mode), n_(problem.n_qubits()), target_(problem.target_state), truncation_(truncation) {
    if (mode_ == FidelityMode::Noiseless || !problem.noise || problem.noise->is_noiseless()) {
      mode_ = FidelityMode::Noiseless;
      return;
    }
    const NoiseModel& noise = *problem.noise;
    certificate_ = certify_commutation(problem.hamiltonian_terms(), noise.jumps, noise.spectrum);
    if (!certificate_->commutes()) {
      if (!allow_uncertified)
        throw ContractViolation("FidelityEvaluator: noise model does not commute with the Hamiltonian terms");
      log().warn("noise model is not certified to commute with the Hamiltonian; {} fidelity is not exact",
                 to_string(mode_));
    }

    switch (mode_) {
      case FidelityMode::DepolarizingClosedForm: {
        lambda_ = noise.spectrum.lambdas.size() > 1 ? noise.spectrum.lambdas[1] : 0.0;
        for (std::size_t j = 1; j < noise.spectrum.lambdas.size(); ++j)
          if (noise.spectrum.lambdas[j] != lambda_)
            throw ConfigurationError("FidelityEvaluator: closed form needs a uniform decay spectrum");
        break;
      }
      case FidelityMode::GroupChannel: {
        std::vector<PauliString> gens;
        for (const auto& e : noise.jumps.entries())
          if (e.rate > 0.0) gens.push_back(e.pauli.stripped());
        const auto commutant = commutant_of_group(PauliGroup(n_, gens));
        lambda_ = *std::max_element(noise.spectrum.lambdas.begin(), noise.spectrum.lambdas.end());
        std::vector<char> in_commutant(noise.spectrum.lambdas.size(), 0);
        for (const auto& g : commutant) in_commutant[g.index()] = 1;
        for (std::size_t j = 0; j < in_commutant.size(); ++j) {
          const double expect = in_commutant[j] ? 0.0 : lambda_;
          if (noise.spectrum.lambdas[j] != expect)
            throw ConfigurationError("FidelityEvaluator: noise is not a uniform group channel");
        }
        for (const auto& g : commutant) {
          const double v = pauli_expectation(g, target_).real();
          if (v != 0.0) terms_.push_back({g, v, 0.0});
        }
        break;
      }
      case FidelityMode::CommutingNoise: {
        const std::uint64_t count = pauli_basis_size(n_);
        for (std::uint64_t j = 0; j < count; ++j) {
          const PauliString g = PauliString::from_index(n_, j);
          const double v = pauli_expectation(g, target_).real();
          if (std::abs(v) > 1e-15) terms_.push_back({g, v, noise.spectrum.lambdas[j]});
        }
        break;
      }
      case FidelityMode::Noiseless:
        break;
    }
  }

  FidelityMode mode() const { return mode_; }
  const std::optional<CommutationCertificate>& certificate() const { return certificate_; }
  const std::vector<Term>& terms() const { return terms_; }

  /// Observable rho_{g,noi}(T) for commuting-noise mode.
  NoisyTargetObservable observable(double T) const {
    NoisyTargetObservable obs{n_, {}, T, truncation_};
    const double norm = std::ldexp(1.0, -n_);
    for (const auto& t : terms_) {
      const double c = norm * std::exp(-t.lambda * T) * t.target_overlap;
      if (std::abs(c) >= truncation_) obs.terms.push_back({t.pauli, c});
    }
    std::stable_sort(obs.terms.begin(), obs.terms.end(), [](const ObservableTerm& a, const ObservableTerm& b) {
      return std::abs(a.coefficient) > std::abs(b.coefficient);
    });
    return obs;
  }

  double operator()(const CVector& psi_f, double T) const {
    if (psi_f.size() != target_.size()) throw DimensionError("FidelityEvaluator: dimension mismatch");
    switch (mode_) {
      case FidelityMode::Noiseless:
        return noiseless_fidelity(psi_f, target_);
      case FidelityMode::DepolarizingClosedForm:
        return depolarizing_fidelity(noiseless_fidelity(psi_f, target_), lambda_, T, n_);
      case FidelityMode::GroupChannel: {
        const double e = std::exp(-lambda_ * T);
        double s = 0.0;
        for (const auto& t : terms_) s += t.target_overlap * pauli_expectation(t.pauli, psi_f).real();
        return clamp_fidelity(e * noiseless_fidelity(psi_f, target_) + std::ldexp(1.0 - e, -n_) * s,
                              "group_channel_fidelity");
      }
      case FidelityMode::CommutingNoise: {
        const double norm = std::ldexp(1.0, -n_);
        double f = 0.0;
        for (const auto& t : terms_) {
          const double c = norm * std::exp(-t.lambda * T) * t.target_overlap;
          if (std::abs(c) >= truncation_) f += c * pauli_expectation(t.pauli, psi_f).real();
        }
        return clamp_fidelity(f, "noisy_fidelity");
      }
    }
    return 0.0;
  }

 private:
  FidelityMode mode_;
  int n_;
  CVector target_;
  double truncation_;
  double lambda_ = 0.0;
  std::vector<Term> terms_;
  std::optional<CommutationCertificate> certificate_;
};

}  // namespace tcrab

#endif  // TCRAB_FIDELITY_HPP_
