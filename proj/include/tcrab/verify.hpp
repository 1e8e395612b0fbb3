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


#ifndef TCRAB_VERIFY_HPP_
#define TCRAB_VERIFY_HPP_

#include <algorithm>
#include <vector>

#include "tcrab/lindblad.hpp"
#include "tcrab/report.hpp"

namespace tcrab {

/*
 * Shortcut fidelity (pure-state propagation plus the noisy target observable) against
 * the dense master-equation integration, at random (T, alpha) points. Point k uses
 * seed derive_seed(seed, k); T is uniform in [0.5, min(5, T_max)] and alpha uniform in [-1, 1].
 */
inline std::vector<VerifyPoint> verify_experiment(const Experiment& e, int n_points, std::uint64_t seed) {
  const FidelityEvaluator shortcut(e.problem, e.mode, true);
  std::vector<VerifyPoint> out;
  for (int k = 0; k < n_points; ++k) {
    const std::uint64_t s = derive_seed(seed, static_cast<std::uint64_t>(k));
    Rng rng(s);
    const double T = rng.uniform(0.5, std::min(5.0, e.problem.T_max));
    ControlProblem p = e.problem;
    for (auto& c : p.controls) {
      std::vector<double> a(c.pulse.n_coefficients());
      for (auto& v : a) v = rng.uniform(-1.0, 1.0);
      c.pulse.set_alphas(a);
    }
    VerifyPoint vp;
    vp.experiment = e.name;
    vp.T = T;
    vp.seed = s;
    vp.fidelity_shortcut = shortcut(propagate(p, T), T);
    vp.fidelity_oracle = oracle_fidelity(p, integrate_master_equation(p, T));
    vp.abs_diff = std::abs(vp.fidelity_shortcut - vp.fidelity_oracle);
    vp.commutator_norm = max_commutator_norm(p, T);
    out.push_back(vp);
  }
  return out;
}

struct VerifySummary {
  bool passed = true;
  double max_abs_diff = 0.0;
  bool certificate_sound = true;
  std::optional<VerifyPoint> worst;
};

/// Passes iff every |diff| < tol and a commuting certificate implies vanishing commutators.
inline VerifySummary summarize_verification(const Experiment& e, const std::vector<VerifyPoint>& pts, double tol = 1e-8) {
  VerifySummary s;
  bool certified = true;
  if (e.problem.noise) {
    const auto& nz = *e.problem.noise;
    certified = certify_commutation(e.problem.hamiltonian_terms(), nz.jumps, nz.spectrum).commutes();
  }
  for (const auto& p : pts) {
    if (!s.worst || p.abs_diff > s.worst->abs_diff) s.worst = p;
    s.max_abs_diff = std::max(s.max_abs_diff, p.abs_diff);
    if (certified && p.commutator_norm >= 1e-10) s.certificate_sound = false;
  }
  s.passed = s.max_abs_diff < tol && s.certificate_sound;
  return s;
}

}  // namespace tcrab

#endif  // TCRAB_VERIFY_HPP_
