// Copyright 2026 The dissipent Authors
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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace dissipent::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // I/O and anything unclassified
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitInvariant = 4;

struct Invocation {
  std::string command;  // evolve, steady, effective, rates, sweep, fit, reproduce
  std::string figure;   // reproduce only
  std::optional<std::string> config_path;
  std::optional<int> jobs;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  bool timings = false;  // record wall time in metadata and per-cell seconds
};

const std::vector<std::string>& figure_names();

/// Embedded configuration behind `reproduce <figure>`.
RunConfig figure_preset(const std::string& figure);

/// Runs one subcommand and throws the library exceptions. Returns 0, or 3 when
/// a sweep finished with failed cells. Failed figure checks only show up in
/// checks.json and the log.
int execute(const Invocation& invocation, std::ostream& log);

/// argv front end with exception-to-exit-code mapping.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dissipent::cli
