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

#ifndef TCRAB_PULSE_HPP_
#define TCRAB_PULSE_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "tcrab/core.hpp"
#include "tcrab/rng.hpp"

namespace tcrab {

/*
 * Truncated Fourier pulse
 *   f(t) = a_0 + sum_m a_{-m} cos(w_m t) + a_{+m} sin(w_m t).
 *
 * Coefficients are stored as [a_0, a_{-1}, a_{+1}, a_{-2}, a_{+2}, ...].
 */
class PulseAnsatz {
 public:
  PulseAnsatz() = default;

  explicit PulseAnsatz(std::vector<double> omegas)
      : omegas_(std::move(omegas)), alphas_(2 * omegas_.size() + 1, 0.0) {}

  PulseAnsatz(std::vector<double> omegas, std::vector<double> alphas)
      : omegas_(std::move(omegas)), alphas_(std::move(alphas)) {
    if (alphas_.size() != 2 * omegas_.size() + 1)
      throw DimensionError("PulseAnsatz: expected 2M+1 coefficients for M frequencies");
  }

  std::size_t M() const { return omegas_.size(); }
  std::size_t n_coefficients() const { return alphas_.size(); }
  const std::vector<double>& omegas() const { return omegas_; }
  const std::vector<double>& alphas() const { return alphas_; }

  void set_alphas(std::vector<double> alphas) {
    if (alphas.size() != alphas_.size()) throw DimensionError("PulseAnsatz::set_alphas: size mismatch");
    alphas_ = std::move(alphas);
  }

  double value(double t) const {
    double f = alphas_[0];
    for (std::size_t m = 0; m < omegas_.size(); ++m)
      f += alphas_[1 + 2 * m] * std::cos(omegas_[m] * t) + alphas_[2 + 2 * m] * std::sin(omegas_[m] * t);
    return f;
  }

 private:
  std::vector<double> omegas_;
  std::vector<double> alphas_{0.0};
};

inline double pulse_value(const PulseAnsatz& ansatz, double t) { return ansatz.value(t); }

enum class FrequencyMode { PrincipalHarmonics, UniformBand };

inline FrequencyMode parse_frequency_mode(const std::string& name) {
  if (name == "principal_harmonics") return FrequencyMode::PrincipalHarmonics;
  if (name == "uniform_band") return FrequencyMode::UniformBand;
  throw ConfigurationError("unknown frequency mode '" + name + "'");
}

inline std::string to_string(FrequencyMode m) {
  return m == FrequencyMode::PrincipalHarmonics ? "principal_harmonics" : "uniform_band";
}

/// w_k = 2 pi k (1 + r_k) / T for explicit perturbations r_k.
inline std::vector<double> principal_harmonic_frequencies(double T, const std::vector<double>& r) {
  if (!(T > 0.0)) throw DomainError("principal_harmonic_frequencies: T must be positive");
  std::vector<double> w(r.size());
  for (std::size_t k = 0; k < r.size(); ++k)
    w[k] = 2.0 * std::numbers::pi * static_cast<double>(k + 1) * (1.0 + r[k]) / T;
  return w;
}

/*
 * Draws M frequencies. `scale` is T for principal harmonics (r_k uniform in [-1/2, 1/2])
 * and omega_max for the uniform band [0, omega_max]; uniform-band draws are sorted.
 */
inline std::vector<double> draw_frequencies(FrequencyMode mode, std::size_t M, double scale, std::uint64_t seed) {
  if (M < 1) throw DomainError("draw_frequencies: M must be at least 1");
  if (!(scale > 0.0)) throw DomainError("draw_frequencies: scale must be positive");
  Rng rng(seed);
  if (mode == FrequencyMode::PrincipalHarmonics) {
    std::vector<double> r(M);
    for (auto& v : r) v = rng.uniform(-0.5, 0.5);
    return principal_harmonic_frequencies(scale, r);
  }
  std::vector<double> w(M);
  for (auto& v : w) v = rng.uniform(0.0, scale);
  std::sort(w.begin(), w.end());
  return w;
}

/// Time grid t_s = (s + 1/2) T / n_steps, the midpoints of the piecewise-constant steps.
inline std::vector<double> midpoint_grid(double T, int n_steps) {
  std::vector<double> t(static_cast<std::size_t>(n_steps));
  const double dt = T / n_steps;
  for (int s = 0; s < n_steps; ++s) t[static_cast<std::size_t>(s)] = (s + 0.5) * dt;
  return t;
}

/// Row s holds the basis functions [1, cos(w_1 t_s), sin(w_1 t_s), ...] at the midpoints.
inline RMatrix pulse_basis_table(const std::vector<double>& omegas, double T, int n_steps) {
  const auto ts = midpoint_grid(T, n_steps);
  RMatrix B(n_steps, static_cast<Eigen::Index>(2 * omegas.size() + 1));
  for (int s = 0; s < n_steps; ++s) {
    const double t = ts[static_cast<std::size_t>(s)];
    B(s, 0) = 1.0;
    for (std::size_t m = 0; m < omegas.size(); ++m) {
      B(s, static_cast<Eigen::Index>(1 + 2 * m)) = std::cos(omegas[m] * t);
      B(s, static_cast<Eigen::Index>(2 + 2 * m)) = std::sin(omegas[m] * t);
    }
  }
  return B;
}

}  // namespace tcrab

#endif  // TCRAB_PULSE_HPP_
