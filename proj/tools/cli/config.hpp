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

// Run configuration: an INI file with [params], [truncation], [integrator],
// [run], [sweep] and [fit] sections, or the same schema as a JSON object.
// Unknown sections and keys are rejected.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dissipent/analysis.hpp"
#include "dissipent/dynamics.hpp"
#include "dissipent/model.hpp"

namespace dissipent::cli {

enum class InitialKind { Ket00, Random };
enum class ModelKind { Full, Effective };
enum class SteadyChoice { Auto, NullSpace, LongTime };

struct IntegratorConfig {
  IntegratorMethod method = IntegratorMethod::Rk4;
  double dt = 0.02;
  double t_final = 9000.0;
  int record_stride = 500;
  double rtol = 1e-8;
  double atol = 1e-10;
};

struct RunSettings {
  InitialKind initial_state = InitialKind::Random;
  std::uint64_t seed = 7;
  std::string output_dir = "out";
  std::vector<std::string> emit{"csv", "json", "svg"};
  ModelKind model = ModelKind::Full;
  SteadyChoice steady_method = SteadyChoice::Auto;

  bool emits(const std::string& kind) const;
};

/// One sweep axis: a parameter name, or `omega_rel` / `omega_m_rel` for a
/// relative error on the drive amplitudes, `delta_x` for the mediator spacing
/// and `cooperativity`.
struct SweepConfig {
  std::vector<SweepAxis> axes;
  Objective evaluator = Objective::Full;
  bool at_time = false;  // evolve to integrator.t_final instead of solving for the steady state
};

struct FitConfig {
  std::vector<double> cooperativities{50, 100, 150, 200, 300, 500};
  std::vector<Target> targets{Target::Singlet, Target::Triplet};
  Objective objective = Objective::Analytic;
  std::vector<ParamBound> free{{"delta", 0.05, 1.0}, {"nu", 0.05, 1.0}};
  int restarts = 3;
  int confirm = 6;  // full steady-state solves on this many cooperativities
};

struct RunConfig {
  PhysicalParams params = PhysicalParams::reference();
  std::optional<double> delta_x;
  Truncation truncation;
  IntegratorConfig integrator;
  RunSettings run;
  SweepConfig sweep;
  FitConfig fit;

  /// Mediating detunings follow delta_x when it is set.
  PhysicalParams resolved_params() const;
  void validate() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_ini(const std::string& text);
RunConfig parse_json(const nlohmann::ordered_json& doc);

/// Fully resolved configuration, re-loadable by parse_json.
nlohmann::ordered_json to_json(const RunConfig& config);

/// Applies a named sweep coordinate to a parameter set.
PhysicalParams apply_coordinate(PhysicalParams p, const PhysicalParams& base,
                                const std::string& name, double value);

std::string to_string(IntegratorMethod m);
std::string to_string(ModelKind m);

}  // namespace dissipent::cli
