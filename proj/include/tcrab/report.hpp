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


#ifndef TCRAB_REPORT_HPP_
#define TCRAB_REPORT_HPP_

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tcrab/experiments.hpp"

namespace tcrab {

inline constexpr const char* kArtifactVersion = "0.1.0";

/// 17 significant digits, enough for an exact round trip of a double.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

/// FNV-1a; stable across platforms, used to fingerprint configs.
inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot write '" + path.string() + "'");
  out << text;
}

inline std::string sweep_infidelity_csv(const BenchmarkReport& rep) {
  std::ostringstream os;
  os << "T_i,crab_infid,tcrab_infid\n";
  for (const auto& r : rep.runs) {
    os << format_double(r.T_init) << ',' << (r.crab ? format_double(r.crab->infidelity) : "") << ','
       << (r.tcrab ? format_double(r.tcrab->infidelity) : "") << '\n';
  }
  return os.str();
}

inline std::string sweep_nfev_csv(const BenchmarkReport& rep) {
  std::ostringstream os;
  os << "T_i,nfev_crab,nfev_tcrab\n";
  for (const auto& r : rep.runs) {
    os << format_double(r.T_init) << ',' << (r.crab ? std::to_string(r.crab->n_fun_evals) : "") << ','
       << (r.tcrab ? std::to_string(r.tcrab->n_fun_evals) : "") << '\n';
  }
  return os.str();
}

inline std::string topt_histogram_csv(const BenchmarkReport& rep) {
  std::ostringstream os;
  os << "bin_left,bin_right,count\n";
  if (rep.runs.empty()) return os.str();
  for (const auto& b : topt_histogram(rep))
    os << format_double(b.left) << ',' << format_double(b.right) << ',' << b.count << '\n';
  return os.str();
}

inline std::string identity_sweep_csv(const std::vector<IdentityPoint>& pts) {
  std::ostringstream os;
  os << "T,infidelity,nfev\n";
  for (const auto& p : pts) os << format_double(p.T) << ',' << format_double(p.infidelity) << ',' << p.n_fun_evals << '\n';
  return os.str();
}

/// Parses a CSV written by the functions above into rows of doubles (empty cells become NaN).
inline std::vector<std::vector<double>> read_numeric_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell.empty() ? std::nan("") : std::stod(cell));
    if (!line.empty() && line.back() == ',') row.push_back(std::nan(""));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline nlohmann::json outcome_json(const OptimizationOutcome& o) {
  nlohmann::json j;
  j["T_opt"] = o.T_opt;
  j["infidelity"] = o.infidelity;
  j["n_fun_evals"] = o.n_fun_evals;
  j["converged_reason"] = to_string(o.converged_reason);
  j["alpha_opt"] = o.alpha_opt;
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& [it, v] : o.trace) trace.push_back({it, v});
  j["trace"] = trace;
  if (o.n_fopt_evals > 0) {
    j["n_fopt_evals"] = o.n_fopt_evals;
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& [T, v] : o.fopt_points) pts.push_back({T, v});
    j["fopt_points"] = pts;
  }
  return j;
}

/// Full benchmark result; contains no timings so it is reproducible byte for byte.
inline nlohmann::json report_json(const BenchmarkReport& rep, const Experiment& e, const ExperimentSpec& spec) {
  nlohmann::json j;
  j["experiment"] = e.name;
  j["master_seed"] = rep.master_seed;
  j["N_S"] = rep.N_S;
  j["T_max"] = rep.T_max;
  j["M"] = spec.ansatz.M;
  j["omega_mode"] = to_string(spec.ansatz.omega_mode);
  j["omegas"] = e.problem.controls.front().pulse.omegas();
  j["fidelity_mode"] = to_string(e.mode);
  j["noise"] = {{"type", spec.noise.type}, {"rate", spec.noise.rate}};
  if (const auto best = rep.best_run()) {
    const auto& r = rep.runs[*best];
    j["best_run"] = r.index;
    j["best_infidelity"] = r.tcrab->infidelity;
    j["T_opt"] = r.tcrab->T_opt;
    j["alpha_opt"] = r.tcrab->alpha_opt;
  }
  nlohmann::json runs = nlohmann::json::array();
  for (const auto& r : rep.runs) {
    nlohmann::json rj;
    rj["index"] = r.index;
    rj["T_init"] = r.T_init;
    rj["seed"] = r.seed;
    if (r.crab) rj["crab"] = outcome_json(*r.crab);
    if (r.tcrab) rj["tcrab"] = outcome_json(*r.tcrab);
    if (!r.error.empty()) rj["error"] = r.error;
    runs.push_back(rj);
  }
  j["runs"] = runs;
  if (rep.bisection) j["bisection"] = outcome_json(*rep.bisection);
  if (!rep.bisection_error.empty()) j["bisection_error"] = rep.bisection_error;
  return j;
}

struct VerifyPoint {
  std::string experiment;
  double T = 0.0;
  std::uint64_t seed = 0;
  double fidelity_shortcut = 0.0;
  double fidelity_oracle = 0.0;
  double abs_diff = 0.0;
  double commutator_norm = 0.0;
};

inline nlohmann::json verify_json(const std::vector<VerifyPoint>& pts) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& p : pts)
    out.push_back({{"experiment", p.experiment},
                   {"T", p.T},
                   {"seed", p.seed},
                   {"fidelity_shortcut", p.fidelity_shortcut},
                   {"fidelity_oracle", p.fidelity_oracle},
                   {"abs_diff", p.abs_diff},
                   {"commutator_norm", p.commutator_norm}});
  return out;
}

}  // namespace tcrab

#endif  // TCRAB_REPORT_HPP_
