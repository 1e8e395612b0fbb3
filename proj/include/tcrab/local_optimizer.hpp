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


#ifndef TCRAB_LOCAL_OPTIMIZER_HPP_
#define TCRAB_LOCAL_OPTIMIZER_HPP_

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tcrab/core.hpp"

namespace tcrab {

enum class ConvergedReason {
  NotRun,
  FunctionTolerance,
  GradientTolerance,
  MaxFunctionEvaluations,
  MaxIterations,
  LineSearchFailed,
  DerivativeTolerance,
  IntervalTolerance,
  NoBracketedExtremum,
  BasinHoppingComplete,
};

inline std::string to_string(ConvergedReason r) {
  switch (r) {
    case ConvergedReason::NotRun: return "not_run";
    case ConvergedReason::FunctionTolerance: return "ftol";
    case ConvergedReason::GradientTolerance: return "gtol";
    case ConvergedReason::MaxFunctionEvaluations: return "max_fun";
    case ConvergedReason::MaxIterations: return "max_iter";
    case ConvergedReason::LineSearchFailed: return "line_search_failed";
    case ConvergedReason::DerivativeTolerance: return "derivative_tolerance";
    case ConvergedReason::IntervalTolerance: return "interval_tolerance";
    case ConvergedReason::NoBracketedExtremum: return "no_bracketed_extremum";
    case ConvergedReason::BasinHoppingComplete: return "basinhopping_complete";
  }
  return "?";
}

struct LocalOptimizerConfig {
  int max_fun = 10000;
  int max_iter = 15000;
  RVector lower;
  RVector upper;
  double eps = 1e-6;
  double ftol = 1e-8;
  double gtol = 1e-12;
  int memory = 10;

  void validate(Eigen::Index n) const {
    if (lower.size() != n || upper.size() != n) throw DimensionError("LocalOptimizerConfig: bounds size mismatch");
    for (Eigen::Index i = 0; i < n; ++i)
      if (!(lower[i] <= upper[i])) throw ValidationError("LocalOptimizerConfig: lower bound exceeds upper bound");
    if (!(eps > 0.0) || !(ftol > 0.0) || !(gtol > 0.0)) throw ValidationError("LocalOptimizerConfig: tolerances must be positive");
    if (memory < 1 || max_fun < 1 || max_iter < 1) throw ValidationError("LocalOptimizerConfig: counts must be positive");
  }
};

struct LocalResult {
  RVector x;
  double f = 0.0;
  int n_fun_evals = 0;
  int n_iterations = 0;
  ConvergedReason reason = ConvergedReason::NotRun;
  std::vector<std::pair<int, double>> trace;  ///< (iteration, objective)
};

using Objective = std::function<double(const RVector&)>;

namespace detail {

inline RVector project(const RVector& x, const LocalOptimizerConfig& c) { return x.cwiseMax(c.lower).cwiseMin(c.upper); }

inline constexpr double kWolfeC1 = 1e-4;
inline constexpr double kWolfeC2 = 0.9;
inline constexpr int kMaxZoom = 20;
inline constexpr int kMaxExtrapolation = 20;

}  // namespace detail

/*
 * Bound-constrained limited-memory BFGS.
 *
 * Gradients are forward differences with step eps, switched to a backward difference
 * when the forward point would leave the box. Variables pinned at a bound with the
 * gradient pushing outward are frozen for the step; the search direction comes from
 * the two-loop recursion on the free variables. A strong Wolfe search is tried along
 * the ray while it stays inside the box; otherwise the step falls back to Armijo
 * backtracking along the projected path. Stops on relative decrease below ftol, projected
 * gradient infinity norm below gtol, or the evaluation budget.
 */
inline LocalResult local_optimize(const Objective& objective, const RVector& x0, const LocalOptimizerConfig& config) {
  const Eigen::Index n = x0.size();
  config.validate(n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (!(x0[i] >= config.lower[i] && x0[i] <= config.upper[i]))
      throw DomainError("local_optimize: initial point outside bounds");

  LocalResult r;
  auto eval = [&](const RVector& x) {
    for (Eigen::Index i = 0; i < n; ++i)
      if (x[i] < config.lower[i] || x[i] > config.upper[i])
        throw ContractViolation("local_optimize: objective evaluated outside bounds");
    const double f = objective(x);
    ++r.n_fun_evals;
    if (!std::isfinite(f)) throw NumericalFailure("local_optimize: objective returned a non-finite value");
    return f;
  };
  auto gradient = [&](const RVector& x, double fx) {
    RVector g(n);
    RVector xp = x;
    for (Eigen::Index i = 0; i < n; ++i) {
      double h = config.eps;
      if (x[i] + h > config.upper[i]) h = x[i] - h >= config.lower[i] ? -h : config.upper[i] - x[i];
      if (h == 0.0) {
        g[i] = 0.0;
        continue;
      }
      xp[i] = x[i] + h;
      g[i] = (eval(xp) - fx) / h;
      xp[i] = x[i];
    }
    return g;
  };
  auto projected_gradient_norm = [&](const RVector& x, const RVector& g) {
    return (detail::project(x - g, config) - x).cwiseAbs().maxCoeff();
  };

  RVector x = x0;
  double f = eval(x);
  r.trace.emplace_back(0, f);
  if (r.n_fun_evals + n > config.max_fun) {
    r.x = x;
    r.f = f;
    r.reason = ConvergedReason::MaxFunctionEvaluations;
    return r;
  }
  RVector g = gradient(x, f);
  std::deque<std::pair<RVector, RVector>> history;  // (s, y)

  for (int it = 1;; ++it) {
    if (n == 0 || projected_gradient_norm(x, g) <= config.gtol) {
      r.reason = ConvergedReason::GradientTolerance;
      break;
    }
    if (it > config.max_iter) {
      r.reason = ConvergedReason::MaxIterations;
      break;
    }
    std::vector<char> free(static_cast<std::size_t>(n), 1);
    for (Eigen::Index i = 0; i < n; ++i)
      if ((x[i] <= config.lower[i] && g[i] > 0.0) || (x[i] >= config.upper[i] && g[i] < 0.0))
        free[static_cast<std::size_t>(i)] = 0;
    auto mask = [&](RVector v) {
      for (Eigen::Index i = 0; i < n; ++i)
        if (!free[static_cast<std::size_t>(i)]) v[i] = 0.0;
      return v;
    };

    auto direction = [&]() {
      RVector q = mask(g);
      std::vector<double> alpha(history.size());
      for (std::size_t k = history.size(); k-- > 0;) {
        const RVector s = mask(history[k].first), y = mask(history[k].second);
        const double sy = s.dot(y);
        if (sy <= 0.0) {
          alpha[k] = 0.0;
          continue;
        }
        alpha[k] = s.dot(q) / sy;
        q -= alpha[k] * y;
      }
      if (!history.empty()) {
        const RVector s = mask(history.back().first), y = mask(history.back().second);
        const double yy = y.squaredNorm(), sy = s.dot(y);
        if (yy > 0.0 && sy > 0.0) q *= sy / yy;
      }
      for (std::size_t k = 0; k < history.size(); ++k) {
        const RVector s = mask(history[k].first), y = mask(history[k].second);
        const double sy = s.dot(y);
        if (sy <= 0.0) continue;
        const double beta = y.dot(q) / sy;
        q += (alpha[k] - beta) * s;
      }
      return RVector(-mask(q));
    };

    RVector d = direction();
    if (d.dot(g) >= 0.0) {
      history.clear();
      d = -mask(g);
    }
    double step = history.empty() ? std::min(1.0, 1.0 / std::max(d.cwiseAbs().maxCoeff(), 1e-300)) : 1.0;

    RVector x_new;
    double f_new = f;
    std::optional<RVector> g_new;
    bool accepted = false;

    // Strong Wolfe search along the ray while it stays inside the box.
    double step_max = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      if (d[i] > 0.0) step_max = std::min(step_max, (config.upper[i] - x[i]) / d[i]);
      if (d[i] < 0.0) step_max = std::min(step_max, (config.lower[i] - x[i]) / d[i]);
    }
    if (step_max > 1e-12 * step) {
      const double dphi0 = g.dot(d);
      struct Point {
        double a, phi, dphi;
        RVector x, g;
      };
      auto at = [&](double a) {
        Point p{a, 0.0, 0.0, detail::project(x + a * d, config), {}};
        p.phi = eval(p.x);
        return p;
      };
      auto with_slope = [&](Point& p) {
        p.g = gradient(p.x, p.phi);
        p.dphi = p.g.dot(d);
      };
      auto armijo = [&](const Point& p) { return p.phi <= f + detail::kWolfeC1 * p.a * dphi0; };
      auto curvature = [&](const Point& p) { return std::abs(p.dphi) <= -detail::kWolfeC2 * dphi0; };
      std::optional<Point> found;
      auto zoom = [&](Point lo, Point hi) {
        for (int k = 0; k < detail::kMaxZoom; ++k) {
          if (r.n_fun_evals + n + 1 > config.max_fun) return;
          const double w = hi.a - lo.a;
          const double denom = 2.0 * (hi.phi - lo.phi - lo.dphi * w);
          double a = denom > 0.0 ? lo.a - lo.dphi * w * w / denom : lo.a + 0.5 * w;
          const double lo_edge = std::min(lo.a, hi.a), hi_edge = std::max(lo.a, hi.a);
          const double margin = 0.1 * (hi_edge - lo_edge);
          if (!(a > lo_edge + margin && a < hi_edge - margin)) a = lo.a + 0.5 * w;
          Point p = at(a);
          if (!armijo(p) || p.phi >= lo.phi) {
            hi = std::move(p);
            continue;
          }
          with_slope(p);
          if (curvature(p)) {
            found = std::move(p);
            return;
          }
          if (p.dphi * (hi.a - lo.a) >= 0.0) hi = lo;
          lo = std::move(p);
        }
        // Accept the best Armijo point seen when the bracket collapses.
        if (lo.a > 0.0) found = std::move(lo);
      };
      Point prev{0.0, f, dphi0, x, g};
      double a = std::min(step, step_max);
      for (int k = 0; k < detail::kMaxExtrapolation && !found; ++k) {
        if (r.n_fun_evals + n + 1 > config.max_fun) break;
        Point p = at(a);
        if (!armijo(p) || (k > 0 && p.phi >= prev.phi)) {
          zoom(prev, std::move(p));
          break;
        }
        with_slope(p);
        if (curvature(p) || a >= step_max) {
          found = std::move(p);
          break;
        }
        if (p.dphi >= 0.0) {
          zoom(std::move(p), prev);
          break;
        }
        prev = std::move(p);
        a = std::min(2.0 * a, step_max);
      }
      if (found && found->phi < f) {
        accepted = true;
        x_new = std::move(found->x);
        f_new = found->phi;
        g_new = std::move(found->g);
      }
    }

    // Fallback: Armijo backtracking along the projected path.
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      for (int bt = 0; bt < 40; ++bt) {
        if (r.n_fun_evals + 1 > config.max_fun) break;
        x_new = detail::project(x + step * d, config);
        const double decrease = g.dot(x_new - x);
        if (decrease >= 0.0 && (x_new - x).cwiseAbs().maxCoeff() == 0.0) break;
        f_new = eval(x_new);
        if (f_new <= f + detail::kWolfeC1 * decrease && decrease < 0.0) {
          accepted = true;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) {
        if (history.empty()) break;
        history.clear();
        d = -mask(g);
        step = std::min(1.0, 1.0 / std::max(d.cwiseAbs().maxCoeff(), 1e-300));
      }
    }
    if (!accepted) {
      r.reason = r.n_fun_evals + 1 > config.max_fun ? ConvergedReason::MaxFunctionEvaluations
                                                    : ConvergedReason::LineSearchFailed;
      break;
    }
    r.n_iterations = it;
    r.trace.emplace_back(it, f_new);
    const double rel = (f - f_new) / std::max({std::abs(f), std::abs(f_new), 1.0});
    const RVector s = x_new - x;
    x = x_new;
    f = f_new;
    if (rel <= config.ftol) {
      r.reason = ConvergedReason::FunctionTolerance;
      break;
    }
    if (r.n_fun_evals + n > config.max_fun) {
      r.reason = ConvergedReason::MaxFunctionEvaluations;
      break;
    }
    if (!g_new) g_new = gradient(x, f);
    const RVector y = *g_new - g;
    g = *g_new;
    if (s.dot(y) > 1e-10 * s.norm() * y.norm()) {
      history.emplace_back(s, y);
      if (static_cast<int>(history.size()) > config.memory) history.pop_front();
    }
  }
  r.x = x;
  r.f = f;
  return r;
}

}  // namespace tcrab

#endif  // TCRAB_LOCAL_OPTIMIZER_HPP_
