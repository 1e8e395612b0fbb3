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


// Acceptance suite: one PASS/FAIL line per criterion, sweeps run on the shipped configs.
// Usage: tcrab_acceptance [OUT_DIR]; sweep artifacts are written below OUT_DIR.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <unsupported/Eigen/MatrixFunctions>

#include "tcrab/lindblad.hpp"
#include "tcrab/report.hpp"
#include "tcrab/verify.hpp"

namespace fs = std::filesystem;
using namespace tcrab;

namespace {

int g_failures = 0;
fs::path g_out = "acceptance_out";
int g_threads = 1;

void report(const char* id, bool pass, const std::string& what) {
  if (!pass) ++g_failures;
  std::printf("%s [%s] %s\n", pass ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

template <class... A>
std::string fmtn(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentSpec shipped(const std::string& name) {
  return load_experiment_spec(std::string(TCRAB_CONFIG_DIR) + "/" + name + ".json");
}

struct Sweep {
  ExperimentSpec spec;
  Experiment experiment;
  BenchmarkReport report;
  double seconds = 0.0;
};

Sweep run_sweep(ExperimentSpec spec, SweepMode mode, const std::string& tag) {
  const auto t0 = std::chrono::steady_clock::now();
  Sweep s{spec, build_experiment(spec), {}, 0.0};
  const ProblemContext ctx(s.experiment.problem, s.experiment.mode, spec.allow_uncertified);
  s.report = benchmark_tcrab(ctx, spec.N_S, spec.master_seed(), spec.optimizer, mode, g_threads);
  s.seconds = seconds_since(t0);
  const fs::path dir = g_out / tag;
  fs::create_directories(dir);
  write_text(dir / "sweep_infidelity.csv", sweep_infidelity_csv(s.report));
  write_text(dir / "sweep_nfev.csv", sweep_nfev_csv(s.report));
  write_text(dir / "topt_histogram.csv", topt_histogram_csv(s.report));
  write_text(dir / "result.json", report_json(s.report, s.experiment, spec).dump(2) + "\n");
  std::printf("  (%s sweep: %zu runs in %.0f s)\n", tag.c_str(), s.report.runs.size(), s.seconds);
  if (s.report.has_failures()) std::printf("  (%s sweep had failing runs)\n", tag.c_str());
  return s;
}

const OptimizationOutcome* best_of(const BenchmarkReport& rep) {
  const auto b = rep.best_run();
  return b ? &*rep.runs[*b].tcrab : nullptr;
}

int runs_in(const BenchmarkReport& rep, double lo, double hi) {
  int n = 0;
  for (const auto& r : rep.runs)
    if (r.tcrab && r.tcrab->T_opt >= lo && r.tcrab->T_opt <= hi) ++n;
  return n;
}

std::vector<double> crab_curve(const BenchmarkReport& rep) {
  std::vector<double> c;
  for (const auto& r : rep.runs) c.push_back(r.crab ? r.crab->infidelity : std::nan(""));
  return c;
}

struct Extremum {
  bool is_min;
  std::size_t index;
};

// Alternating minima and maxima of a sampled curve, each separated from its neighbours
// by a change of at least `rise` (hysteresis peak picking).
std::vector<Extremum> prominent_extrema(const std::vector<double>& y, double rise) {
  std::vector<Extremum> out;
  if (y.empty()) return out;
  std::size_t lo = 0, hi = 0;
  int dir = 0;  // +1 looking for a maximum, -1 for a minimum, 0 undecided
  for (std::size_t i = 1; i < y.size(); ++i) {
    if (std::isnan(y[i])) continue;
    if (y[i] < y[lo]) lo = i;
    if (y[i] > y[hi]) hi = i;
    if (dir >= 0 && y[i] <= y[hi] - rise && (dir == 1 || hi < i)) {
      out.push_back({false, hi});
      dir = -1;
      lo = i;
    } else if (dir <= 0 && y[i] >= y[lo] + rise) {
      out.push_back({true, lo});
      dir = 1;
      hi = i;
    }
  }
  // A minimum reached after the last recorded maximum counts once the curve has dropped by `rise`.
  if (dir == -1) out.push_back({true, lo});
  return out;
}

int prominent_minima(const std::vector<double>& y, double rise) {
  int n = 0;
  for (const auto& e : prominent_extrema(y, rise)) n += e.is_min;
  return n;
}

// --- 1 ---------------------------------------------------------------------------------
void criterion_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::string worst;
  bool all = true;
  for (const auto& name : experiment_names()) {
    const ExperimentSpec spec = shipped(name);
    const Experiment e = build_experiment(spec);
    const auto pts = verify_experiment(e, 5, spec.master_seed());
    const auto s = summarize_verification(e, pts, 1e-8);
    all = all && s.passed;
    worst += fmtn(" %s=%.2e%s", name.c_str(), s.max_abs_diff, s.certificate_sound ? "" : "(certificate unsound)");
  }
  const double secs = seconds_since(t0);
  report("1", all && secs < 120.0, "oracle |F_shortcut - F_lindblad| < 1e-8 at 5 points each, " + fmt("%.1f s;", secs) + worst);
}

// --- 2 ---------------------------------------------------------------------------------
CMatrix twirl_superoperator(const std::vector<PauliString>& group) {
  const Eigen::Index d = Eigen::Index{1} << group.front().n_qubits();
  CMatrix J = CMatrix::Zero(d * d, d * d);
  for (const auto& g : group) {
    const CMatrix G = pauli_matrix(g);
    J += kron(G.conjugate(), G);
  }
  return J / static_cast<double>(group.size());
}

void criterion_channels() {
  double err_ptm = 0.0, err_pz = 0.0, err_group = 0.0, err_depol = 0.0;
  const double gamma = 0.37;
  for (double T : {0.1, 0.8, 2.5, 7.0}) {
    const double e = std::exp(-gamma * T);
    const auto deph = builtin_channels("local_dephasing", 1, gamma);
    const CMatrix S = dissipative_superoperator(jump_matrices(deph), 2).matrix;
    const RMatrix R = pauli_transfer_matrix(superoperator_exponential(S, T));
    const auto basis = all_pauli_strings(1);
    for (std::size_t i = 0; i < basis.size(); ++i)
      for (std::size_t j = 0; j < basis.size(); ++j) {
        const std::string l = basis[i].label();
        const double want = i != j ? 0.0 : (l == "I" || l == "Z") ? 1.0 : e;
        err_ptm = std::max(err_ptm, std::abs(R(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - want));
      }
    const auto p = pauli_error_probabilities(decay_spectrum(deph), T);
    err_pz = std::max(err_pz, std::abs(p[PauliString::parse("Z").index()] - 0.5 * (1.0 - e)));

    const CMatrix SD = dissipative_superoperator(jump_matrices(builtin_channels("dipole_dipole", 2, gamma)), 4).matrix;
    const CMatrix closed = e * CMatrix::Identity(16, 16) +
                           (1.0 - e) * twirl_superoperator({PauliString::parse("II"), PauliString::parse("ZZ")});
    err_group = std::max(err_group, (superoperator_exponential(SD, T) - closed).cwiseAbs().maxCoeff());
  }
  // Depolarizing closed form against the master equation on the Josephson problem.
  auto spec = default_spec("josephson");
  spec.noise.rate = 0.2;
  Experiment ex = build_experiment(spec);
  Rng rng(11);
  for (int k = 0; k < 4; ++k) {
    std::vector<double> a(ex.problem.controls[0].pulse.n_coefficients());
    for (auto& v : a) v = rng.uniform(-1, 1);
    ex.problem.controls[0].pulse.set_alphas(a);
    const double T = rng.uniform(0.5, 5.0);
    const CVector psi = propagate(ex.problem, T);
    const double FU = std::norm(ex.problem.target_state.dot(psi));
    const double oracle = oracle_fidelity(ex.problem, integrate_master_equation(ex.problem, T));
    err_depol = std::max(err_depol, std::abs(depolarizing_fidelity(FU, 0.2, T, 2) - oracle));
  }
  const bool pass = err_ptm < 1e-12 && err_pz < 1e-12 && err_group < 1e-12 && err_depol < 1e-12;
  report("2", pass,
         fmtn("analytic channels to 1e-12: dephasing PTM %.1e, p_Z %.1e, group channel %.1e, depolarizing %.1e", err_ptm,
              err_pz, err_group, err_depol));
}

// --- 3 ---------------------------------------------------------------------------------
void criterion_josephson() {
  const Sweep s = run_sweep(shipped("josephson"), SweepMode::Both, "josephson");
  const auto* best = best_of(s.report);
  report("3a", best && best->infidelity <= 0.012 && best->T_opt >= 1.30 && best->T_opt <= 1.40,
         best ? fmtn("josephson best infidelity %.5f at T_opt %.4f (need <= 0.012, T in [1.30, 1.40])", best->infidelity,
                     best->T_opt)
              : "josephson: no successful run");
  const int n = runs_in(s.report, 1.30, 1.40);
  report("3b", n >= 60, fmtn("josephson basin-hopping runs with T_opt in [1.30, 1.40]: %d/100 (need >= 60)", n));
  const auto& b = s.report.bisection;
  report("3c", b && b->T_opt >= 1.30 && b->T_opt <= 1.40 && b->n_fopt_evals <= 80,
         b ? fmtn("josephson bisection T_opt %.4f, infidelity %.5f, %d F_opt evaluations, %s (need T in [1.30, 1.40], <= 80)",
                  b->T_opt, b->infidelity, b->n_fopt_evals, to_string(b->converged_reason).c_str())
           : "josephson bisection failed: " + s.report.bisection_error);
}

// --- 4 and 9 ---------------------------------------------------------------------------
double variance(const std::vector<double>& v) {
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s / static_cast<double>(v.size());
}

std::vector<double> tcrab_infidelities(const BenchmarkReport& rep) {
  std::vector<double> v;
  for (const auto& r : rep.runs)
    if (r.tcrab) v.push_back(r.tcrab->infidelity);
  return v;
}

void criterion_lmg() {
  const ExperimentSpec spec = shipped("lmg");
  const Sweep s = run_sweep(spec, SweepMode::Both, "lmg");
  const auto* best = best_of(s.report);
  report("4a", best && best->infidelity <= 0.025 && best->T_opt >= 1.7 && best->T_opt <= 2.0,
         best ? fmtn("lmg best infidelity %.5f at T_opt %.4f (need <= 0.025, T in [1.7, 2.0])", best->infidelity,
                     best->T_opt)
              : "lmg: no successful run");
  if (s.report.bisection)
    std::printf("  (lmg bisection T_opt %.4f, infidelity %.5f, %d F_opt evaluations)\n", s.report.bisection->T_opt,
                s.report.bisection->infidelity, s.report.bisection->n_fopt_evals);

  const auto t0 = std::chrono::steady_clock::now();
  const auto pts = identity_test(s.experiment, spec.N_S, spec.master_seed(), spec.optimizer, g_threads);
  double worst = 0.0, worst_T = 0.0;
  for (const auto& p : pts)
    if (p.infidelity >= worst) {
      worst = p.infidelity;
      worst_T = p.T;
    }
  fs::create_directories(g_out / "lmg_identity");
  write_text(g_out / "lmg_identity" / "identity_sweep.csv", identity_sweep_csv(pts));
  std::printf("  (lmg identity test: %zu runs in %.0f s)\n", pts.size(), seconds_since(t0));
  report("4b", worst < 1e-10, fmtn("lmg identity-test max infidelity %.2e at T %.2f over %zu grid points (need < 1e-10)",
                                   worst, worst_T, pts.size()));

  // 9: M sensitivity, reusing the M = 10 sweep.
  std::vector<std::pair<int, double>> var;
  for (int M : {2, 14}) {
    ExperimentSpec m = spec;
    m.ansatz.M = M;
    const Sweep sm = run_sweep(m, SweepMode::BasinHopping, "lmg_M" + std::to_string(M));
    var.emplace_back(M, variance(tcrab_infidelities(sm.report)));
  }
  const double v10 = variance(tcrab_infidelities(s.report));
  report("9", var[0].second > v10 && var[1].second > v10,
         fmtn("lmg variance of optimized infidelity over the T grid: M=2 %.3e, M=10 %.3e, M=14 %.3e (need M=2, M=14 > M=10)",
              var[0].second, v10, var[1].second));
}

// --- 5 and 6 ---------------------------------------------------------------------------
void criterion_spin(const char* id_best, const char* id_basin, const char* id_osc, const std::string& name, double max_inf,
                    double lo, double hi) {
  const Sweep s = run_sweep(shipped(name), SweepMode::Both, name);
  const auto* best = best_of(s.report);
  report(id_best, best && best->infidelity <= max_inf && best->T_opt >= lo && best->T_opt <= hi,
         best ? fmtn("%s best infidelity %.5f at T_opt %.4f (need <= %.3f, T in [%.2f, %.2f])", name.c_str(),
                     best->infidelity, best->T_opt, max_inf, lo, hi)
              : name + ": no successful run");
  const auto curve = crab_curve(s.report);
  const auto ext = prominent_extrema(curve, 0.05);
  const int minima = prominent_minima(curve, 0.05);
  report(id_osc, minima >= 3,
         fmtn("%s CRAB sweep has %d local minima separated by rises >= 0.05 (need >= 3)", name.c_str(), minima));
  if (id_basin == nullptr || best == nullptr) return;
  // Global basin: between the prominent maxima of the CRAB sweep that bracket the best T.
  const double step = s.report.T_max / static_cast<double>(s.report.N_S);
  double left = 0.0, right = s.report.T_max;
  for (const auto& e : ext) {
    if (e.is_min) continue;
    const double T = step * static_cast<double>(e.index + 1);
    if (T < best->T_opt) left = std::max(left, T);
    if (T > best->T_opt) right = std::min(right, T);
  }
  const int n = runs_in(s.report, left, right);
  report(id_basin, n > 50,
         fmtn("%s runs in the global basin T in [%.2f, %.2f]: %d/100 (need > 50)", name.c_str(), left, right, n));
}

// --- 7 ---------------------------------------------------------------------------------
void criterion_oscillation() {
  // Single-qubit drift w Z_1 (an involution up to w) on the dipole gate, noiseless.
  auto spec = default_spec("spin_cz_dipole");
  spec.params["dE1"] = 1.3;
  spec.params["dE2"] = 0.0;
  spec.noise = {"none", 0.0, {}};
  const Experiment e = build_experiment(spec);
  const double omega = spec.params.at("prefactor").get<double>() * 1.3;
  const CMatrix K0 = e.problem.drift / omega;

  // Frozen alpha: the control-only evolution fixes rho_c; the drift then acts for time T.
  ControlProblem control_only = e.problem;
  control_only.drift = CMatrix::Zero(e.problem.dimension(), e.problem.dimension());
  Rng rng(7);
  std::vector<double> a(control_only.controls[0].pulse.n_coefficients());
  for (auto& v : a) v = rng.uniform(-1, 1);
  control_only.controls[0].pulse.set_alphas(a);
  const CVector psi_c = propagate(control_only, 1.0);
  const CMatrix rho_c = density_matrix(psi_c);
  const CMatrix rho_g = density_matrix(e.problem.target_state);
  const auto comps = oscillation_components(rho_g, rho_c, K0, omega);

  auto direct = [&](double T) {
    const CMatrix U = CMatrix(-kI * T * e.problem.drift).exp();
    return (rho_g * U * rho_c * U.adjoint()).trace().real();
  };
  double err = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double T = rng.uniform(0.0, 10.0);
    err = std::max(err, std::abs(comps.at(T) - direct(T)));
  }
  report("7a", err < 1e-10, fmtn("oscillation components vs direct drift conjugation at 20 random T: %.2e (need < 1e-10)", err));

  // Least-squares fit of a + b cos(W T) + c sin(W T) to the sampled direct fidelity, scanning W.
  std::vector<double> Ts, Fs;
  for (int k = 0; k < 400; ++k) {
    Ts.push_back(10.0 * k / 400.0);
    Fs.push_back(direct(Ts.back()));
  }
  double best_W = 0.0, best_res = 1e300;
  for (double W = 0.1; W <= 5.0; W += 1e-3) {
    Eigen::MatrixXd A(Ts.size(), 3);
    Eigen::VectorXd y(Ts.size());
    for (std::size_t i = 0; i < Ts.size(); ++i) {
      A(static_cast<Eigen::Index>(i), 0) = 1.0;
      A(static_cast<Eigen::Index>(i), 1) = std::cos(W * Ts[i]);
      A(static_cast<Eigen::Index>(i), 2) = std::sin(W * Ts[i]);
      y[static_cast<Eigen::Index>(i)] = Fs[i];
    }
    const Eigen::VectorXd coef = A.colPivHouseholderQr().solve(y);
    const double res = (A * coef - y).squaredNorm();
    if (res < best_res) {
      best_res = res;
      best_W = W;
    }
  }
  const double rel = std::abs(best_W - 2.0 * omega) / (2.0 * omega);
  report("7b", rel < 0.05, fmtn("fitted oscillation angular frequency %.4f vs 2w = %.4f (relative error %.2e, need < 5%%)",
                                best_W, 2.0 * omega, rel));
}

// --- 8 ---------------------------------------------------------------------------------
void criterion_determinism() {
  bool same = true;
  std::string detail;
  for (const auto& name : experiment_names()) {
    ExperimentSpec spec = shipped(name);
    spec.N_S = 16;
    spec.ansatz.M = 4;
    spec.optimizer.basinhopping.iterations = 2;
    spec.optimizer.bisection.max_iterations = 4;
    const Experiment e = build_experiment(spec);
    const ProblemContext ctx(e.problem, e.mode, spec.allow_uncertified);
    std::string out[2];
    int k = 0;
    for (int threads : {1, 8}) {
      const auto rep = benchmark_tcrab(ctx, spec.N_S, spec.master_seed(), spec.optimizer, SweepMode::Both, threads);
      out[k++] = sweep_infidelity_csv(rep) + sweep_nfev_csv(rep) + topt_histogram_csv(rep) +
                 report_json(rep, e, spec).dump(2);
    }
    const bool ok = out[0] == out[1];
    same = same && ok;
    detail += " " + name + (ok ? "=identical" : "=DIFFERENT");
  }
  report("8", same, "outputs at 1 and 8 threads byte-identical:" + detail);
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_out = argv[1];
  g_threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  fs::create_directories(g_out);
  std::printf("acceptance: %d worker thread(s), artifacts in %s\n", g_threads, g_out.string().c_str());
  const auto t0 = std::chrono::steady_clock::now();
  try {
    criterion_oracle();
    criterion_channels();
    criterion_oscillation();
    criterion_determinism();
    criterion_josephson();
    criterion_lmg();
    criterion_spin("5a", "5b", "5c", "spin_cz_dipole", 0.02, 0.70, 0.90);
    criterion_spin("6a", nullptr, "6b", "spin_cz_swap", 0.15, 2.2, 2.6);
  } catch (const std::exception& e) {
    std::printf("FAIL [abort] %s\n", e.what());
    return 1;
  }
  std::printf("acceptance: %d failing line(s), %.0f s total\n", g_failures, seconds_since(t0));
  return g_failures == 0 ? 0 : 1;
}
