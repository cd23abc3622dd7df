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

// Pass/fail thresholds for the figure presets. Shared by `reproduce` (which
// writes them to checks.json) and the acceptance runner.

#pragma once

#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli/experiments.hpp"

namespace dissipent::cli {

struct Check {
  std::string name;
  bool passed = false;
  double value = std::numeric_limits<double>::quiet_NaN();
  std::string expected;
};

bool all_passed(const std::vector<Check>& checks);
nlohmann::ordered_json to_json(const std::vector<Check>& checks);

/// Final-time fidelity bracket, target dominance, trace and positivity.
std::vector<Check> dynamics_checks(const DynamicsResult& result, Target target);

/// Full vs four-level populations over the whole trajectory, tolerance 0.05.
Check agreement_check(const DynamicsResult& result);

/// Closed-form vs numeric rates within 10% relative, plus the B-variant call.
std::vector<Check> rate_checks(const PhysicalParams& p);

/// Fitted slopes (S in [10, 19], T above S) and per-point optimizer properties.
/// Slopes from the full-solve fits when present, otherwise from the objective fits.
std::vector<Check> scaling_checks(const ScalingResult& result);

/// Minimum fidelity of `target` over a robustness grid.
Check robustness_check(const SweepTable& table, Target target, double threshold);

/// Dip locations for N = 2, 3, 5 and the flat region |delta_x| > delta.
std::vector<Check> spacing_checks(const SpacingResult& result, double delta);

}  // namespace dissipent::cli
