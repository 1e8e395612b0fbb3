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


#ifndef TCRAB_EXPERIMENTS_HPP_
#define TCRAB_EXPERIMENTS_HPP_

#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "tcrab/choi.hpp"
#include "tcrab/fidelity.hpp"
#include "tcrab/tcrab.hpp"

namespace tcrab {

/// Sum of c_k P_k from (label, coefficient) pairs.
inline CMatrix pauli_sum(const std::vector<std::pair<std::string, double>>& terms) {
  if (terms.empty()) throw ValidationError("pauli_sum: no terms");
  const int n = static_cast<int>(terms.front().first.size());
  const Eigen::Index d = Eigen::Index{1} << n;
  CMatrix m = CMatrix::Zero(d, d);
  for (const auto& [label, c] : terms) m += c * pauli_matrix(PauliString::parse(label));
  return m;
}

inline CMatrix swap_matrix() {
  CMatrix s = CMatrix::Zero(4, 4);
  s(0, 0) = s(3, 3) = 1.0;
  s(1, 2) = s(2, 1) = 1.0;
  return s;
}

inline CVector basis_state(int n, std::uint64_t index) {
  CVector v = CVector::Zero(Eigen::Index{1} << n);
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return v;
}

/// A built problem together with how its fidelity is evaluated.
struct Experiment {
  std::string name;
  ControlProblem problem;
  FidelityMode mode = FidelityMode::CommutingNoise;
  std::optional<GateProblem> gate;  ///< set for gate-compilation experiments
  ChoiConvention convention = ChoiConvention::Interleaved;
  /// Noise on the logical register, before any Choi lifting.
  std::optional<NoiseModel> logical_noise;
};

struct JosephsonParams {
  double E_J = 1.0;
  double E_C = -1.0;
};

/// sum_i (E_C Z_i + E_J X_i) + E_cc(t) Z_1 Z_2 from |00> to (|00> + |11>)/sqrt(2).
inline ControlProblem josephson_problem(const JosephsonParams& p, const std::vector<double>& omegas,
                                        std::optional<NoiseModel> noise) {
  ControlProblem cp;
  cp.drift = pauli_sum({{"ZI", p.E_C}, {"IZ", p.E_C}, {"XI", p.E_J}, {"IX", p.E_J}});
  cp.controls.push_back({pauli_sum({{"ZZ", 1.0}}), PulseAnsatz(omegas)});
  cp.initial_state = basis_state(2, 0);
  cp.target_state = CVector::Zero(4);
  cp.target_state[0] = cp.target_state[3] = 1.0 / std::sqrt(2.0);
  cp.noise = std::move(noise);
  cp.validate();
  return cp;
}

struct LmgParams {
  int N = 3;
  double J = 1.0;
  double gamma = 0.0;  ///< YY anisotropy
};

/*
 * -(J/N) sum_{i<j} (X_i X_j + gamma Y_i Y_j) - Gamma(t) sum_i Z_i, from |0...0> to the
 * uniform superposition of even-weight basis states (1/2 (|000>+|011>+|101>+|110>) at N=3).
 */
inline ControlProblem lmg_problem(const LmgParams& p, const std::vector<double>& omegas, std::optional<NoiseModel> noise) {
  if (p.N < 2 || p.N > 4) throw ConfigurationError("lmg_problem: N must be between 2 and 4");
  std::vector<std::pair<std::string, double>> drift, control;
  for (int i = 0; i < p.N; ++i) {
    for (int j = i + 1; j < p.N; ++j) {
      std::string xx(static_cast<std::size_t>(p.N), 'I'), yy = xx;
      xx[static_cast<std::size_t>(i)] = xx[static_cast<std::size_t>(j)] = 'X';
      yy[static_cast<std::size_t>(i)] = yy[static_cast<std::size_t>(j)] = 'Y';
      drift.emplace_back(xx, -p.J / p.N);
      if (p.gamma != 0.0) drift.emplace_back(yy, -p.J * p.gamma / p.N);
    }
    std::string z(static_cast<std::size_t>(p.N), 'I');
    z[static_cast<std::size_t>(i)] = 'Z';
    control.emplace_back(z, -1.0);
  }
  ControlProblem cp;
  cp.drift = pauli_sum(drift);
  cp.controls.push_back({pauli_sum(control), PulseAnsatz(omegas)});
  cp.initial_state = basis_state(p.N, 0);
  const std::uint64_t dim = std::uint64_t{1} << p.N;
  cp.target_state = CVector::Zero(static_cast<Eigen::Index>(dim));
  for (std::uint64_t b = 0; b < dim; ++b)
    if (std::popcount(b) % 2 == 0) cp.target_state[static_cast<Eigen::Index>(b)] = 1.0;
  cp.target_state.normalize();
  cp.noise = std::move(noise);
  cp.validate();
  return cp;
}

/*
 * Overall scale of the spin Hamiltonians, applied to drift and control alike. The
 * reference CZ optima (T = 0.78 dipole, 2.38 SWAP) need 1; 0.5 gives the convention
 * with an overall 1/2.
 */
struct SpinParams {
  double dE1 = 1.0;
  double dE2 = 1.0;
  double prefactor = 1.0;
};

/// prefactor (dE1 Z_1 + dE2 Z_2 + J(t) SWAP), CZ target.
inline GateProblem spin_cz_swap_gate(const SpinParams& p, const std::vector<double>& omegas, std::optional<NoiseModel> noise) {
  GateProblem g;
  g.drift = pauli_sum({{"ZI", p.prefactor * p.dE1}, {"IZ", p.prefactor * p.dE2}});
  g.controls.push_back({p.prefactor * swap_matrix(), PulseAnsatz(omegas)});
  g.target_gate = builtin_gate("CZ", 2);
  g.noise = std::move(noise);
  return g;
}

/// prefactor (dE1 Z_1 + dE2 Z_2 + J(t) Z_1 Z_2), CZ target.
inline GateProblem spin_cz_dipole_gate(const SpinParams& p, const std::vector<double>& omegas,
                                       std::optional<NoiseModel> noise) {
  GateProblem g;
  g.drift = pauli_sum({{"ZI", p.prefactor * p.dE1}, {"IZ", p.prefactor * p.dE2}});
  g.controls.push_back({pauli_sum({{"ZZ", p.prefactor}}), PulseAnsatz(omegas)});
  g.target_gate = builtin_gate("CZ", 2);
  g.noise = std::move(noise);
  return g;
}

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"josephson", "lmg", "spin_cz_swap", "spin_cz_dipole"};
  return names;
}

struct AnsatzSpec {
  int M = 8;
  FrequencyMode omega_mode = FrequencyMode::UniformBand;
  double omega_max = 20.0;
  /// Reference time for principal harmonics; <= 0 means T_max.
  double T_ref = 0.0;
};

struct NoiseSpec {
  std::string type = "none";
  double rate = 0.0;
  std::vector<JumpEntry> jumps;  ///< custom only
};

/// Everything a config file can set.
struct ExperimentSpec {
  std::string name;
  nlohmann::json params = nlohmann::json::object();
  AnsatzSpec ansatz;
  NoiseSpec noise;
  OptimizerSettings optimizer;
  std::size_t N_S = 100;
  double T_max = 10.0;
  int n_steps = kDefaultSteps;
  std::vector<std::uint64_t> seeds{1};
  std::optional<FidelityMode> fidelity_mode;
  ChoiConvention convention = ChoiConvention::Interleaved;
  bool allow_uncertified = false;

  std::uint64_t master_seed() const { return seeds.front(); }
  nlohmann::json raw;
};

/// Reference hyper-parameters for each experiment.
inline ExperimentSpec default_spec(const std::string& name) {
  ExperimentSpec s;
  s.name = name;
  if (name == "josephson") {
    s.params = {{"E_J", 1.0}, {"E_C", -1.0}};
    s.noise = {"depolarizing", 0.01, {}};
    s.ansatz.M = 8;
    s.optimizer.bisection = {1e-3, 1e-6, 1e-6, true, 200};
  } else if (name == "lmg") {
    s.params = {{"N", 3}, {"J", 1.0}, {"gamma", 0.0}};
    s.noise = {"depolarizing", 0.01, {}};
    s.ansatz.M = 10;
  } else if (name == "spin_cz_swap") {
    s.params = {{"dE1", 1.5}, {"dE2", 0.5}, {"prefactor", 1.0}};
    s.noise = {"local_dephasing", 0.05, {}};
    // SWAP does not commute with single-qubit Z jumps, so the certificate fails; the
    // fidelity then models the dephasing as acting after the gate.
    s.allow_uncertified = true;
  } else if (name == "spin_cz_dipole") {
    s.params = {{"dE1", 1.0}, {"dE2", 1.0}, {"prefactor", 1.0}};
    s.noise = {"dipole_dipole", 0.03, {}};
  } else {
    throw ConfigurationError("unknown experiment '" + name + "'");
  }
  return s;
}

namespace detail {

inline void check_keys(const nlohmann::json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigurationError(where + " must be a JSON object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigurationError("unknown key '" + k + "' in " + where);
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("invalid value for '") + key + "': " + e.what());
  }
}

}  // namespace detail

inline ExperimentSpec parse_experiment_spec(const nlohmann::json& j) {
  using detail::get_or;
  detail::check_keys(j,
                     {"experiment", "params", "ansatz", "noise", "optimizer", "sweep", "seeds", "fidelity_mode",
                      "n_steps", "choi_convention", "allow_uncertified"},
                     "config");
  if (!j.contains("experiment") || !j.at("experiment").is_string())
    throw ConfigurationError("config needs an \"experiment\" name");
  ExperimentSpec s = default_spec(j.at("experiment").get<std::string>());
  s.raw = j;
  if (j.contains("params")) {
    const auto& p = j.at("params");
    if (!p.is_object()) throw ConfigurationError("params must be a JSON object");
    for (const auto& [k, v] : p.items()) {
      if (!s.params.contains(k)) throw ConfigurationError("unknown parameter '" + k + "' for " + s.name);
      if (!v.is_number()) throw ConfigurationError("parameter '" + k + "' must be a number");
      s.params[k] = v;
    }
  }
  if (j.contains("ansatz")) {
    const auto& a = j.at("ansatz");
    detail::check_keys(a, {"M", "omega_mode", "omega_max", "T_ref"}, "ansatz");
    s.ansatz.M = get_or(a, "M", s.ansatz.M);
    s.ansatz.omega_mode = parse_frequency_mode(get_or(a, "omega_mode", to_string(s.ansatz.omega_mode)));
    s.ansatz.omega_max = get_or(a, "omega_max", s.ansatz.omega_max);
    s.ansatz.T_ref = get_or(a, "T_ref", s.ansatz.T_ref);
    if (s.ansatz.M < 1) throw ConfigurationError("ansatz.M must be at least 1");
    if (!(s.ansatz.omega_max > 0.0)) throw ConfigurationError("ansatz.omega_max must be positive");
  }
  if (j.contains("noise")) {
    const auto& nz = j.at("noise");
    detail::check_keys(nz, {"type", "rate", "jumps"}, "noise");
    NoiseSpec ns;
    ns.type = get_or<std::string>(nz, "type", "none");
    ns.rate = get_or(nz, "rate", 0.0);
    if (!(ns.rate >= 0.0)) throw ConfigurationError("noise.rate must be non-negative");
    if (ns.type == "custom") {
      if (!nz.contains("jumps") || !nz.at("jumps").is_array()) throw ConfigurationError("custom noise needs a jumps list");
      for (const auto& e : nz.at("jumps")) {
        detail::check_keys(e, {"pauli", "rate"}, "noise.jumps entry");
        try {
          ns.jumps.push_back({PauliString::parse(e.at("pauli").get<std::string>()), e.at("rate").get<double>()});
        } catch (const Error& err) {
          throw ConfigurationError(std::string("bad jump entry: ") + err.what());
        } catch (const nlohmann::json::exception& err) {
          throw ConfigurationError(std::string("bad jump entry: ") + err.what());
        }
      }
    } else if (ns.type != "none") {
      parse_builtin_channel(ns.type);
    }
    s.noise = ns;
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    detail::check_keys(o,
                       {"max_fun", "eps", "ftol", "gtol", "memory", "alpha_bound", "initial_alpha_range",
                        "basinhopping", "bisection"},
                       "optimizer");
    auto& st = s.optimizer;
    st.max_fun = get_or(o, "max_fun", st.max_fun);
    st.eps = get_or(o, "eps", st.eps);
    st.ftol = get_or(o, "ftol", st.ftol);
    st.gtol = get_or(o, "gtol", st.gtol);
    st.memory = get_or(o, "memory", st.memory);
    st.alpha_bound = get_or(o, "alpha_bound", st.alpha_bound);
    st.initial_alpha_range = get_or(o, "initial_alpha_range", st.initial_alpha_range);
    if (o.contains("basinhopping")) {
      const auto& b = o.at("basinhopping");
      detail::check_keys(b, {"iterations", "step_size", "temperature", "time_step_scale"}, "optimizer.basinhopping");
      st.basinhopping.iterations = get_or(b, "iterations", st.basinhopping.iterations);
      st.basinhopping.step_size = get_or(b, "step_size", st.basinhopping.step_size);
      st.basinhopping.temperature = get_or(b, "temperature", st.basinhopping.temperature);
      st.basinhopping.time_step_scale = get_or(b, "time_step_scale", st.basinhopping.time_step_scale);
    }
    if (o.contains("bisection")) {
      const auto& b = o.at("bisection");
      detail::check_keys(b, {"fd_step_T", "tol_derivative", "tol_interval", "warm_start", "max_iterations"},
                         "optimizer.bisection");
      st.bisection.fd_step_T = get_or(b, "fd_step_T", st.bisection.fd_step_T);
      st.bisection.tol_derivative = get_or(b, "tol_derivative", st.bisection.tol_derivative);
      st.bisection.tol_interval = get_or(b, "tol_interval", st.bisection.tol_interval);
      st.bisection.warm_start = get_or(b, "warm_start", st.bisection.warm_start);
      st.bisection.max_iterations = get_or(b, "max_iterations", st.bisection.max_iterations);
    }
    try {
      st.basinhopping.validate();
      st.bisection.validate();
      st.local(1, 1.0).validate(2);
    } catch (const Error& e) {
      throw ConfigurationError(e.what());
    }
  }
  if (j.contains("sweep")) {
    const auto& sw = j.at("sweep");
    detail::check_keys(sw, {"N_S", "T_max"}, "sweep");
    const long ns = get_or(sw, "N_S", static_cast<long>(s.N_S));
    if (ns < 1) throw ConfigurationError("sweep.N_S must be at least 1");
    s.N_S = static_cast<std::size_t>(ns);
    s.T_max = get_or(sw, "T_max", s.T_max);
    if (!(s.T_max > 0.0)) throw ConfigurationError("sweep.T_max must be positive");
  }
  if (j.contains("seeds")) {
    s.seeds = get_or(j, "seeds", s.seeds);
    if (s.seeds.empty()) throw ConfigurationError("seeds must not be empty");
  }
  if (j.contains("fidelity_mode")) s.fidelity_mode = parse_fidelity_mode(get_or<std::string>(j, "fidelity_mode", ""));
  s.n_steps = get_or(j, "n_steps", s.n_steps);
  if (s.n_steps < 1) throw ConfigurationError("n_steps must be positive");
  if (j.contains("choi_convention")) s.convention = parse_choi_convention(get_or<std::string>(j, "choi_convention", ""));
  s.allow_uncertified = get_or(j, "allow_uncertified", s.allow_uncertified);
  return s;
}

inline ExperimentSpec load_experiment_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_experiment_spec(j);
}

inline std::optional<NoiseModel> build_noise(const NoiseSpec& ns, int n_qubits) {
  if (ns.type == "none") return std::nullopt;
  try {
    if (ns.type == "custom") return make_noise_model(JumpOperatorSet(n_qubits, ns.jumps), "custom", ns.rate);
    return builtin_noise_model(ns.type, n_qubits, ns.rate);
  } catch (const ConfigurationError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigurationError(std::string("noise: ") + e.what());
  }
}

/// Frequencies shared by every run of an experiment, drawn from the master seed.
inline std::vector<double> experiment_frequencies(const ExperimentSpec& s) {
  const double scale = s.ansatz.omega_mode == FrequencyMode::UniformBand
                           ? s.ansatz.omega_max
                           : (s.ansatz.T_ref > 0.0 ? s.ansatz.T_ref : s.T_max);
  return draw_frequencies(s.ansatz.omega_mode, static_cast<std::size_t>(s.ansatz.M), scale,
                          derive_seed(s.master_seed(), 0x0fe9));
}

inline Experiment build_experiment(const ExperimentSpec& s) {
  const auto omegas = experiment_frequencies(s);
  const auto num = [&](const char* k) { return s.params.at(k).get<double>(); };
  Experiment e;
  e.name = s.name;
  e.convention = s.convention;
  try {
    if (s.name == "josephson") {
      e.logical_noise = build_noise(s.noise, 2);
      e.problem = josephson_problem({num("E_J"), num("E_C")}, omegas, e.logical_noise);
      e.mode = FidelityMode::DepolarizingClosedForm;
    } else if (s.name == "lmg") {
      const double n_real = num("N");
      if (n_real != std::floor(n_real)) throw ConfigurationError("lmg: N must be an integer");
      const LmgParams p{static_cast<int>(n_real), num("J"), num("gamma")};
      if (p.N < 2 || p.N > 4) throw ConfigurationError("lmg_problem: N must be between 2 and 4");
      e.logical_noise = build_noise(s.noise, p.N);
      e.problem = lmg_problem(p, omegas, e.logical_noise);
      e.mode = FidelityMode::DepolarizingClosedForm;
    } else {
      const SpinParams p{num("dE1"), num("dE2"), num("prefactor")};
      if (!(p.prefactor > 0.0)) throw ConfigurationError("spin prefactor must be positive");
      e.logical_noise = build_noise(s.noise, 2);
      e.gate = s.name == "spin_cz_swap" ? spin_cz_swap_gate(p, omegas, e.logical_noise)
                                        : spin_cz_dipole_gate(p, omegas, e.logical_noise);
      e.problem = lift_problem(*e.gate, s.convention);
      e.mode = FidelityMode::CommutingNoise;
    }
  } catch (const ConfigurationError&) {
    throw;
  } catch (const Error& err) {
    throw ConfigurationError(s.name + ": " + err.what());
  }
  if (e.mode == FidelityMode::DepolarizingClosedForm && s.noise.type != "depolarizing")
    e.mode = FidelityMode::CommutingNoise;
  if (s.fidelity_mode) e.mode = *s.fidelity_mode;
  e.problem.n_steps = s.n_steps;
  e.problem.T_max = s.T_max;
  if (e.gate) {
    e.gate->n_steps = s.n_steps;
    e.gate->T_max = s.T_max;
  }
  e.problem.validate();
  return e;
}

/// Noiseless problem whose target is the identity: the initial state itself, or the
/// Choi state of the identity gate for gate experiments.
inline ControlProblem identity_variant(const Experiment& e) {
  if (e.gate) {
    GateProblem g = *e.gate;
    g.target_gate = builtin_gate("identity", qubits_for_dimension(g.drift.rows()));
    g.noise.reset();
    return lift_problem(g, e.convention);
  }
  ControlProblem p = e.problem;
  p.noise.reset();
  p.target_state = p.initial_state;
  return p;
}

struct IdentityPoint {
  double T = 0.0;
  double infidelity = 0.0;
  int n_fun_evals = 0;
};

inline constexpr int kIdentityRestarts = 5;
inline constexpr double kIdentityPolishStep = 1e-8;
inline constexpr double kIdentityPolishFtol = 1e-15;

/*
 * CRAB on the identity variant at every T_i = T_max i / N_S. The test measures how far
 * the controls can cancel the drift, so each solve is restarted from its own end point
 * while that still lowers the infidelity. Restarts use a finer difference step and an
 * ftol near machine precision: the ftol test divides by max(|f|, 1), so near zero
 * infidelity it stops on an absolute decrease of ~ftol.
 */
inline std::vector<IdentityPoint> identity_test(const Experiment& e, std::size_t N_S, std::uint64_t master_seed,
                                                const OptimizerSettings& settings = {}, int threads = 1) {
  if (N_S < 1) throw DomainError("identity_test: empty T grid");
  const ProblemContext ctx(identity_variant(e), FidelityMode::Noiseless);
  OptimizerSettings polish = settings;
  polish.eps = std::min(settings.eps, kIdentityPolishStep);
  polish.ftol = std::min(settings.ftol, kIdentityPolishFtol);
  std::vector<IdentityPoint> out(N_S);
  parallel_for(N_S, threads, [&](std::size_t k) {
    const double T = ctx.problem().T_max * static_cast<double>(k + 1) / static_cast<double>(N_S);
    auto r = crab_optimize(ctx, T, derive_seed(master_seed, k + 1), settings);
    int nfev = r.n_fun_evals;
    for (int i = 0; i < kIdentityRestarts && r.infidelity > 0.0; ++i) {
      auto next = crab_optimize(ctx, T, r.alpha_opt, polish);
      nfev += next.n_fun_evals;
      if (!(next.infidelity < r.infidelity)) break;
      r = std::move(next);
    }
    out[k] = {T, r.infidelity, nfev};
  });
  return out;
}

}  // namespace tcrab

#endif  // TCRAB_EXPERIMENTS_HPP_
