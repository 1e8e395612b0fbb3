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


// Command-line front end: run | verify | identity-test | list-experiments.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tcrab/report.hpp"
#include "tcrab/verify.hpp"

namespace fs = std::filesystem;
using namespace tcrab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitVerification = 4;

struct CommonOptions {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string mode = "both";
  int points = 5;
};

ExperimentSpec load_spec(const CommonOptions& o) {
  ExperimentSpec s = load_experiment_spec(o.config);
  if (o.seed) s.seeds.front() = *o.seed;
  return s;
}

nlohmann::json manifest(const ExperimentSpec& s, const std::vector<std::uint64_t>& run_seeds, double seconds,
                        const std::vector<std::string>& outputs, int threads) {
  nlohmann::json m;
  m["artifact_version"] = kArtifactVersion;
  m["config_hash"] = hex64(fnv1a64(s.raw.dump()));
  m["experiment"] = s.name;
  m["master_seed"] = s.master_seed();
  m["run_seeds"] = run_seeds;
  m["threads"] = threads;
  m["wall_clock_seconds"] = seconds;
  m["outputs"] = outputs;
  return m;
}

int cmd_run(const CommonOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentSpec spec = load_spec(o);
  const SweepMode mode = parse_sweep_mode(o.mode);
  const Experiment e = build_experiment(spec);
  const ProblemContext ctx(e.problem, e.mode, spec.allow_uncertified);
  log().info("running {} with N_S = {}, master seed {}", e.name, spec.N_S, spec.master_seed());
  const BenchmarkReport rep = benchmark_tcrab(ctx, spec.N_S, spec.master_seed(), spec.optimizer, mode, o.threads);

  fs::create_directories(o.out);
  const fs::path dir(o.out);
  write_text(dir / "sweep_infidelity.csv", sweep_infidelity_csv(rep));
  write_text(dir / "sweep_nfev.csv", sweep_nfev_csv(rep));
  write_text(dir / "topt_histogram.csv", topt_histogram_csv(rep));
  write_text(dir / "result.json", report_json(rep, e, spec).dump(2) + "\n");
  std::vector<std::uint64_t> seeds;
  for (const auto& r : rep.runs) seeds.push_back(r.seed);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text(dir / "manifest.json",
             manifest(spec, seeds, secs,
                      {"sweep_infidelity.csv", "sweep_nfev.csv", "topt_histogram.csv", "result.json", "manifest.json"},
                      o.threads)
                     .dump(2) +
                 "\n");

  if (const auto best = rep.best_run()) {
    const auto& r = *rep.runs[*best].tcrab;
    std::cout << "best infidelity " << format_double(r.infidelity) << " at T_opt " << format_double(r.T_opt) << "\n";
  }
  if (rep.bisection)
    std::cout << "bisection T_opt " << format_double(rep.bisection->T_opt) << " infidelity "
              << format_double(rep.bisection->infidelity) << " after " << rep.bisection->n_fopt_evals
              << " F_opt evaluations (" << to_string(rep.bisection->converged_reason) << ")\n";
  if (rep.has_failures()) {
    std::cerr << "some runs failed; partial results written to " << o.out << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_verify(const CommonOptions& o) {
  const ExperimentSpec spec = load_spec(o);
  const Experiment e = build_experiment(spec);
  const auto pts = verify_experiment(e, o.points, spec.master_seed());
  const std::string text = verify_json(pts).dump(2) + "\n";
  if (o.out != ".") {
    fs::path p(o.out);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_text(p, text);
  } else {
    std::cout << text;
  }
  const VerifySummary s = summarize_verification(e, pts);
  if (!s.passed) {
    std::cerr << "verification failed for " << e.name << ": max |diff| " << format_double(s.max_abs_diff)
              << (s.certificate_sound ? "" : ", certificate contradicted by commutator norm");
    if (s.worst) std::cerr << "; worst point T = " << format_double(s.worst->T) << ", seed = " << s.worst->seed;
    std::cerr << "\n";
    return kExitVerification;
  }
  return kExitOk;
}

int cmd_identity(const CommonOptions& o) {
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentSpec spec = load_spec(o);
  const Experiment e = build_experiment(spec);
  const auto pts = identity_test(e, spec.N_S, spec.master_seed(), spec.optimizer, o.threads);
  fs::create_directories(o.out);
  const fs::path dir(o.out);
  write_text(dir / "identity_sweep.csv", identity_sweep_csv(pts));
  std::vector<std::uint64_t> seeds;
  for (std::size_t k = 0; k < pts.size(); ++k) seeds.push_back(derive_seed(spec.master_seed(), k + 1));
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text(dir / "manifest.json", manifest(spec, seeds, secs, {"identity_sweep.csv", "manifest.json"}, o.threads).dump(2) + "\n");
  double lo = 1.0, hi = 0.0;
  for (const auto& p : pts) {
    lo = std::min(lo, p.infidelity);
    hi = std::max(hi, p.infidelity);
  }
  std::cout << "identity test: infidelity range [" << format_double(lo) << ", " << format_double(hi) << "]\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-optimized CRAB pulse optimization under commuting noise"};
  app.require_subcommand(1);
  CommonOptions o;

  auto add_common = [&](CLI::App* sub, bool sweep) {
    sub->add_option("config", o.config, "experiment JSON config")->required();
    sub->add_option("--seed", o.seed, "override the master seed (seeds[0])");
    if (sweep) {
      sub->add_option("--out", o.out, "output directory");
      sub->add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
    }
  };
  auto* run = app.add_subcommand("run", "sweep T_i with CRAB, basin-hopping and bisection");
  add_common(run, true);
  run->add_option("--mode", o.mode, "basinhopping, bisection or both")
      ->check(CLI::IsMember({"basinhopping", "bisection", "both"}));
  auto* verify = app.add_subcommand("verify", "compare the shortcut fidelity with the master equation");
  add_common(verify, false);
  verify->add_option("--out", o.out, "write the JSON report here instead of stdout");
  verify->add_option("--points", o.points, "random (T, alpha) points")->check(CLI::PositiveNumber);
  auto* identity = app.add_subcommand("identity-test", "CRAB towards the identity over the T grid");
  add_common(identity, true);
  app.add_subcommand("list-experiments", "print the built-in experiment names");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (run->parsed()) return cmd_run(o);
    if (verify->parsed()) return cmd_verify(o);
    if (identity->parsed()) return cmd_identity(o);
    for (const auto& n : experiment_names()) std::cout << n << "\n";
    return kExitOk;
  } catch (const ConfigurationError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractViolation& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
