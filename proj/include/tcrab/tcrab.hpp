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


#ifndef TCRAB_TCRAB_HPP_
#define TCRAB_TCRAB_HPP_

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "tcrab/dynamics.hpp"
#include "tcrab/fidelity.hpp"
#include "tcrab/local_optimizer.hpp"
#include "tcrab/rng.hpp"

namespace tcrab {

struct BasinHoppingConfig {
  int iterations = 10;
  double step_size = 0.5;
  double temperature = 1.0;
  /// Scale of the T displacement relative to the alpha displacement; <= 0 means T_max / 100.
  double time_step_scale = 0.0;

  void validate() const {
    if (iterations < 0) throw ValidationError("BasinHoppingConfig: negative iteration count");
    if (!(step_size > 0.0) || !(temperature > 0.0))
      throw ValidationError("BasinHoppingConfig: step size and temperature must be positive");
  }
};

struct BisectionConfig {
  double fd_step_T = 1e-4;
  double tol_derivative = 1e-6;
  double tol_interval = 1e-4;
  bool warm_start = true;
  int max_iterations = 200;

  void validate() const {
    if (!(fd_step_T > 0.0) || !(tol_derivative > 0.0) || !(tol_interval > 0.0))
      throw ValidationError("BisectionConfig: step and tolerances must be positive");
  }
};

/// Knobs shared by CRAB, basin-hopping and bisection; bounds are derived per problem.
struct OptimizerSettings {
  int max_fun = 10000;
  double eps = 1e-6;
  double ftol = 1e-8;
  double gtol = 1e-12;
  int memory = 10;
  double alpha_bound = 100.0;
  double initial_alpha_range = 1.0;
  BasinHoppingConfig basinhopping;
  BisectionConfig bisection;

  LocalOptimizerConfig local(Eigen::Index n_alpha, std::optional<double> T_max) const {
    LocalOptimizerConfig c;
    c.max_fun = max_fun;
    c.eps = eps;
    c.ftol = ftol;
    c.gtol = gtol;
    c.memory = memory;
    const Eigen::Index off = T_max ? 1 : 0;
    c.lower = RVector::Constant(n_alpha + off, -alpha_bound);
    c.upper = RVector::Constant(n_alpha + off, alpha_bound);
    if (T_max) {
      c.lower[0] = 0.0;
      c.upper[0] = *T_max;
    }
    return c;
  }
};

struct OptimizationOutcome {
  double T_opt = 0.0;
  std::vector<double> alpha_opt;
  double infidelity = 1.0;
  int n_fun_evals = 0;
  std::vector<std::pair<int, double>> trace;
  ConvergedReason converged_reason = ConvergedReason::NotRun;
  /// Bisection only: number of F_opt(T) evaluations and the (T, infidelity) points visited.
  int n_fopt_evals = 0;
  std::vector<std::pair<double, double>> fopt_points;
};

/*
 * Immutable per-problem data shared by every optimization run: the reduced propagator
 * and the fidelity evaluator with its precomputed target overlaps.
 */
class ProblemContext {
 public:
  ProblemContext(ControlProblem problem, FidelityMode mode, bool allow_uncertified = false)
      : problem_(std::move(problem)), propagator_(problem_), evaluator_(problem_, mode, allow_uncertified) {}

  const ControlProblem& problem() const { return problem_; }
  const Propagator& propagator() const { return propagator_; }
  const FidelityEvaluator& evaluator() const { return evaluator_; }
  std::size_t n_parameters() const { return problem_.n_parameters(); }

 private:
  ControlProblem problem_;
  Propagator propagator_;
  FidelityEvaluator evaluator_;
};

/// Infidelity 1 - F(T, alpha); keeps the pulse basis table of the last T it saw.
class CrabObjective {
 public:
  explicit CrabObjective(const ProblemContext& ctx) : ctx_(&ctx) {}

  const ProblemContext& context() const { return *ctx_; }

  CVector final_state(double T, const double* alphas) {
    const auto& p = ctx_->problem();
    if (!(T > 0.0)) return p.initial_state;
    const std::vector<RMatrix>& tables = tables_for(T);
    samples_.resize(p.controls.size());
    std::size_t off = 0;
    for (std::size_t i = 0; i < p.controls.size(); ++i) {
      const auto k = static_cast<Eigen::Index>(p.controls[i].pulse.n_coefficients());
      samples_[i] = tables[i] * Eigen::Map<const RVector>(alphas + off, k);
      off += static_cast<std::size_t>(k);
    }
    return ctx_->propagator().propagate(T, samples_);
  }

  double infidelity(double T, const double* alphas) {
    const CVector psi = final_state(T, alphas);
    return 1.0 - ctx_->evaluator()(psi, T > 0.0 ? T : 0.0);
  }

  double infidelity(double T, const std::vector<double>& alphas) { return infidelity(T, alphas.data()); }

 private:
  // Finite-difference gradients in T alternate between two times, so two tables are kept.
  const std::vector<RMatrix>& tables_for(double T) {
    for (auto& slot : cache_)
      if (slot.first == T && !slot.second.empty()) return slot.second;
    auto& slot = cache_[next_slot_];
    next_slot_ ^= 1u;
    slot.first = T;
    slot.second.clear();
    const auto& p = ctx_->problem();
    for (const auto& c : p.controls) slot.second.push_back(pulse_basis_table(c.pulse.omegas(), T, p.n_steps));
    return slot.second;
  }

  const ProblemContext* ctx_;
  std::array<std::pair<double, std::vector<RMatrix>>, 2> cache_{{{-1.0, {}}, {-1.0, {}}}};
  unsigned next_slot_ = 0;
  std::vector<RVector> samples_;
};

/// Initial coefficients uniform in [-range, range].
inline std::vector<double> initial_alphas(std::size_t n, std::uint64_t seed, double range = 1.0) {
  Rng rng(seed);
  std::vector<double> a(n);
  for (auto& v : a) v = rng.uniform(-range, range);
  return a;
}

/// Optimizes alpha at fixed T.
inline OptimizationOutcome crab_optimize(const ProblemContext& ctx, double T, const std::vector<double>& alpha0,
                                         const OptimizerSettings& settings = {}) {
  if (!(T > 0.0) || T > ctx.problem().T_max) throw DomainError("crab_optimize: T must lie in (0, T_max]");
  const auto n = static_cast<Eigen::Index>(ctx.n_parameters());
  if (static_cast<Eigen::Index>(alpha0.size()) != n) throw DimensionError("crab_optimize: wrong number of coefficients");
  CrabObjective obj(ctx);
  const Objective f = [&](const RVector& a) { return obj.infidelity(T, a.data()); };
  const auto cfg = settings.local(n, std::nullopt);
  const RVector x0 = Eigen::Map<const RVector>(alpha0.data(), n).cwiseMax(cfg.lower).cwiseMin(cfg.upper);
  const LocalResult r = local_optimize(f, x0, cfg);
  OptimizationOutcome out;
  out.T_opt = T;
  out.alpha_opt.assign(r.x.data(), r.x.data() + n);
  out.infidelity = r.f;
  out.n_fun_evals = r.n_fun_evals;
  out.trace = r.trace;
  out.converged_reason = r.reason;
  return out;
}

inline OptimizationOutcome crab_optimize(const ProblemContext& ctx, double T, std::uint64_t seed,
                                         const OptimizerSettings& settings = {}) {
  return crab_optimize(ctx, T, initial_alphas(ctx.n_parameters(), seed, settings.initial_alpha_range), settings);
}

/*
 * Basin-hopping over the joint vector (T, alpha), started from a CRAB optimum at T_init.
 * The start point is first relaxed jointly; each hop then displaces every coordinate
 * uniformly within +-step_size (T scaled by time_step_scale), clips into the box, runs
 * the local solver and applies the Metropolis rule. The best point ever visited,
 * including the CRAB start, is returned with ties going to the smaller T.
 */
inline OptimizationOutcome tcrab_basinhopping(const ProblemContext& ctx, const OptimizationOutcome& start,
                                              std::uint64_t seed, const OptimizerSettings& settings = {}) {
  const double T_max = ctx.problem().T_max;
  if (!(start.T_opt > 0.0) || start.T_opt > T_max) throw DomainError("tcrab_basinhopping: T_init must lie in (0, T_max]");
  settings.basinhopping.validate();
  const auto n = static_cast<Eigen::Index>(ctx.n_parameters());
  if (static_cast<Eigen::Index>(start.alpha_opt.size()) != n)
    throw DimensionError("tcrab_basinhopping: wrong number of coefficients");
  CrabObjective obj(ctx);
  const Objective f = [&](const RVector& x) { return obj.infidelity(x[0], x.data() + 1); };
  const auto cfg = settings.local(n, T_max);

  RVector x0(n + 1);
  x0[0] = start.T_opt;
  for (Eigen::Index i = 0; i < n; ++i) x0[i + 1] = start.alpha_opt[static_cast<std::size_t>(i)];
  x0 = x0.cwiseMax(cfg.lower).cwiseMin(cfg.upper);

  OptimizationOutcome out;
  out.n_fun_evals = start.n_fun_evals;
  RVector best_x = x0;
  double best_f = start.infidelity;
  LocalResult cur = local_optimize(f, x0, cfg);
  out.n_fun_evals += cur.n_fun_evals;
  if (cur.f < best_f) {
    best_f = cur.f;
    best_x = cur.x;
  }
  out.trace.emplace_back(0, best_f);

  const auto& bh = settings.basinhopping;
  const double t_scale = bh.time_step_scale > 0.0 ? bh.time_step_scale : T_max / 100.0;
  Rng rng(seed);
  for (int it = 1; it <= bh.iterations; ++it) {
    RVector trial = cur.x;
    trial[0] += t_scale * rng.uniform(-bh.step_size, bh.step_size);
    for (Eigen::Index i = 1; i <= n; ++i) trial[i] += rng.uniform(-bh.step_size, bh.step_size);
    trial = trial.cwiseMax(cfg.lower).cwiseMin(cfg.upper);
    LocalResult next = local_optimize(f, trial, cfg);
    out.n_fun_evals += next.n_fun_evals;
    if (next.f < best_f || (next.f == best_f && next.x[0] < best_x[0])) {
      best_f = next.f;
      best_x = next.x;
    }
    const double u = rng.uniform01();
    if (next.f < cur.f || u < std::exp(-(next.f - cur.f) / bh.temperature)) cur = std::move(next);
    out.trace.emplace_back(it, best_f);
  }
  out.T_opt = best_x[0];
  out.alpha_opt.assign(best_x.data() + 1, best_x.data() + 1 + n);
  out.infidelity = best_f;
  out.converged_reason = ConvergedReason::BasinHoppingComplete;
  return out;
}

/// Runs CRAB at T_init from alpha0, then basin-hopping from its optimum.
inline OptimizationOutcome tcrab_basinhopping(const ProblemContext& ctx, double T_init, const std::vector<double>& alpha0,
                                              std::uint64_t seed, const OptimizerSettings& settings = {}) {
  return tcrab_basinhopping(ctx, crab_optimize(ctx, T_init, alpha0, settings), seed, settings);
}

inline OptimizationOutcome tcrab_basinhopping(const ProblemContext& ctx, double T_init, std::uint64_t seed,
                                              const OptimizerSettings& settings = {}) {
  return tcrab_basinhopping(ctx, T_init, initial_alphas(ctx.n_parameters(), seed, settings.initial_alpha_range),
                            derive_seed(seed, 1), settings);
}

/*
 * Bisection on the sign of the forward-difference derivative of F_opt(T) over
 * [0, T_max]. Each derivative costs two CRAB solves, at T and T + h, plus two cross
 * evaluations that swap the optima between the points. In warm-start mode
 * every solve starts from the optimum found at the nearest T already visited.
 */
inline OptimizationOutcome tcrab_bisection(const ProblemContext& ctx, std::uint64_t seed,
                                           const OptimizerSettings& settings = {}) {
  const auto& bc = settings.bisection;
  bc.validate();
  const double T_max = ctx.problem().T_max;
  const std::vector<double> cold = initial_alphas(ctx.n_parameters(), seed, settings.initial_alpha_range);
  std::vector<std::pair<double, std::vector<double>>> visited;
  OptimizationOutcome out;

  auto fopt = [&](double T, const std::vector<double>* start) {
    const std::vector<double>* a0 = &cold;
    if (bc.warm_start) {
      if (start != nullptr) {
        a0 = start;
      } else if (!visited.empty()) {
        auto it = std::min_element(visited.begin(), visited.end(), [&](const auto& l, const auto& r) {
          return std::abs(l.first - T) < std::abs(r.first - T);
        });
        a0 = &it->second;
      }
    }
    OptimizationOutcome r = crab_optimize(ctx, T, *a0, settings);
    out.n_fun_evals += r.n_fun_evals;
    ++out.n_fopt_evals;
    out.fopt_points.emplace_back(T, r.infidelity);
    visited.emplace_back(T, r.alpha_opt);
    return r;
  };

  CrabObjective objective(ctx);
  double lo = 0.0, hi = T_max;
  bool moved_lo = false, moved_hi = false;
  OptimizationOutcome at_mid;
  for (int it = 1;; ++it) {
    const double mid = 0.5 * (lo + hi);
    at_mid = fopt(mid, nullptr);
    // Near T_max the difference is taken backwards so every solve stays inside the range.
    const double h = mid + bc.fd_step_T <= T_max ? bc.fd_step_T : -bc.fd_step_T;
    const OptimizationOutcome ahead = fopt(mid + h, bc.warm_start ? &at_mid.alpha_opt : nullptr);
    // At a local optimum dF_opt/dT equals the partial T-derivative at fixed alpha, so the
    // difference is taken at fixed alpha for both optima and averaged. This cancels the
    // convergence error of the two solves, which otherwise swamps the slope.
    const double cross_ahead = objective.infidelity(mid + h, at_mid.alpha_opt.data());
    const double cross_mid = objective.infidelity(mid, ahead.alpha_opt.data());
    out.n_fun_evals += 2;
    const double dF = -0.5 * ((cross_ahead - at_mid.infidelity) + (ahead.infidelity - cross_mid)) / h;
    out.trace.emplace_back(it, at_mid.infidelity);
    out.T_opt = mid;
    if (std::abs(dF) < bc.tol_derivative) {
      out.converged_reason = ConvergedReason::DerivativeTolerance;
      break;
    }
    if (dF > 0.0) {
      lo = mid;
      moved_lo = true;
    } else {
      hi = mid;
      moved_hi = true;
    }
    if (hi - lo < bc.tol_interval) {
      out.converged_reason = (moved_lo && moved_hi) ? ConvergedReason::IntervalTolerance
                                                    : ConvergedReason::NoBracketedExtremum;
      break;
    }
    if (it >= bc.max_iterations) {
      out.converged_reason = ConvergedReason::MaxIterations;
      break;
    }
  }
  out.alpha_opt = at_mid.alpha_opt;
  out.infidelity = at_mid.infidelity;
  if (out.converged_reason == ConvergedReason::NoBracketedExtremum) {
    auto best = std::min_element(out.fopt_points.begin(), out.fopt_points.end(),
                                 [](const auto& a, const auto& b) { return a.second < b.second; });
    const std::size_t idx = static_cast<std::size_t>(best - out.fopt_points.begin());
    out.T_opt = best->first;
    out.infidelity = best->second;
    out.alpha_opt = visited[idx].second;
  }
  return out;
}

/// Runs fn(i) for i in [0, count) on up to `threads` workers; rethrows the first failure.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

enum class SweepMode { BasinHopping, Bisection, Both };

inline SweepMode parse_sweep_mode(const std::string& s) {
  if (s == "basinhopping") return SweepMode::BasinHopping;
  if (s == "bisection") return SweepMode::Bisection;
  if (s == "both") return SweepMode::Both;
  throw ConfigurationError("unknown mode '" + s + "'");
}

struct SweepRun {
  std::size_t index = 0;  ///< 1-based position in the T grid
  double T_init = 0.0;
  std::uint64_t seed = 0;
  std::optional<OptimizationOutcome> crab;
  std::optional<OptimizationOutcome> tcrab;
  std::string error;  ///< non-empty when the run failed
};

struct BenchmarkReport {
  std::uint64_t master_seed = 0;
  std::size_t N_S = 0;
  double T_max = 0.0;
  std::vector<SweepRun> runs;
  std::optional<OptimizationOutcome> bisection;
  std::string bisection_error;

  /// Run with the lowest basin-hopping infidelity (ties to smaller T_opt), if any.
  std::optional<std::size_t> best_run() const {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      if (!runs[i].tcrab) continue;
      const auto& o = *runs[i].tcrab;
      if (!best) {
        best = i;
        continue;
      }
      const auto& b = *runs[*best].tcrab;
      if (o.infidelity < b.infidelity || (o.infidelity == b.infidelity && o.T_opt < b.T_opt)) best = i;
    }
    return best;
  }

  bool has_failures() const {
    if (!bisection_error.empty()) return true;
    return std::any_of(runs.begin(), runs.end(), [](const SweepRun& r) { return !r.error.empty(); });
  }
};

struct HistogramBin {
  double left = 0.0;
  double right = 0.0;
  int count = 0;
};

/// Counts of basin-hopping T_opt in N_S bins of width T_max / N_S over [0, T_max].
inline std::vector<HistogramBin> topt_histogram(const BenchmarkReport& report) {
  std::vector<HistogramBin> bins(report.N_S);
  const double w = report.T_max / static_cast<double>(report.N_S);
  for (std::size_t b = 0; b < report.N_S; ++b) bins[b] = {w * static_cast<double>(b), w * static_cast<double>(b + 1), 0};
  for (const auto& r : report.runs) {
    if (!r.tcrab) continue;
    auto b = static_cast<std::size_t>(std::floor(r.tcrab->T_opt / w));
    if (b >= report.N_S) b = report.N_S - 1;
    ++bins[b].count;
  }
  return bins;
}

/*
 * Sweep over T_i = T_max i / N_S, i = 1..N_S: CRAB at T_i and basin-hopping started at
 * T_i, then one bisection run. Run i uses seed derive_seed(master, i); results are
 * stored by index so the report does not depend on the thread count.
 */
inline BenchmarkReport benchmark_tcrab(const ProblemContext& ctx, std::size_t N_S, std::uint64_t master_seed,
                                       const OptimizerSettings& settings = {}, SweepMode mode = SweepMode::Both,
                                       int threads = 1) {
  if (N_S < 1) throw DomainError("benchmark_tcrab: N_S must be at least 1");
  BenchmarkReport rep;
  rep.master_seed = master_seed;
  rep.N_S = N_S;
  rep.T_max = ctx.problem().T_max;
  rep.runs.resize(mode == SweepMode::Bisection ? 0 : N_S);

  parallel_for(rep.runs.size(), threads, [&](std::size_t k) {
    SweepRun& run = rep.runs[k];
    run.index = k + 1;
    run.T_init = rep.T_max * static_cast<double>(k + 1) / static_cast<double>(N_S);
    run.seed = derive_seed(master_seed, k + 1);
    try {
      const auto a0 = initial_alphas(ctx.n_parameters(), run.seed, settings.initial_alpha_range);
      run.crab = crab_optimize(ctx, run.T_init, a0, settings);
      run.tcrab = tcrab_basinhopping(ctx, *run.crab, derive_seed(run.seed, 1), settings);
    } catch (const std::exception& e) {
      run.error = e.what();
      log().error("run {} (T_i = {}) failed: {}", run.index, run.T_init, e.what());
    }
  });

  if (mode != SweepMode::BasinHopping) {
    try {
      rep.bisection = tcrab_bisection(ctx, derive_seed(master_seed, 0), settings);
    } catch (const std::exception& e) {
      rep.bisection_error = e.what();
      log().error("bisection failed: {}", e.what());
    }
  }
  return rep;
}

}  // namespace tcrab

#endif  // TCRAB_TCRAB_HPP_
