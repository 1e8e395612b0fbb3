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


#ifndef TCRAB_LOGGING_HPP_
#define TCRAB_LOGGING_HPP_

#include <atomic>
#include <cstdlib>
#include <memory>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace tcrab {

/// Level from TCRAB_LOG (error, warn, info, debug); unset or unknown means warn.
inline spdlog::level::level_enum log_level_from_env() {
  const char* v = std::getenv("TCRAB_LOG");
  if (v == nullptr) return spdlog::level::warn;
  const std::string s(v);
  if (s == "error") return spdlog::level::err;
  if (s == "info") return spdlog::level::info;
  if (s == "debug") return spdlog::level::debug;
  return spdlog::level::warn;
}

/// Shared stderr logger, created on first use.
inline spdlog::logger& log() {
  static std::shared_ptr<spdlog::logger> logger = [] {
    auto existing = spdlog::get("tcrab");
    if (existing) return existing;
    auto l = spdlog::stderr_color_mt("tcrab");
    l->set_level(log_level_from_env());
    l->set_pattern("[%l] %v");
    return l;
  }();
  return *logger;
}

/// Number of fidelity values clamped back into [0, 1] so far in this process.
inline std::atomic<long>& clamp_event_count() {
  static std::atomic<long> count{0};
  return count;
}

}  // namespace tcrab

#endif  // TCRAB_LOGGING_HPP_
