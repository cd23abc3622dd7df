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

// Fidelity estimates, inverse-cooperativity fits, parameter search, grid
// sweeps and dip detection.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dissipent/effective.hpp"
#include "dissipent/model.hpp"

namespace dissipent {

enum class Target { Singlet, Triplet };

std::string to_string(Target t);
Target parse_target(const std::string& s);

struct FidelityEstimate {
  Target target = Target::Singlet;
  double infidelity = 0.0;  // clamped to [0, 1]
  double p00_share = 0.0;   // infidelity / 3
};

/// Steady-state closure of the two-level rate balance: leak out of the target
/// over pump into it, times three.
FidelityEstimate estimate_infidelity(const AnalyticRates& rates, Target target);
FidelityEstimate estimate_infidelity(const PhysicalParams& p, Target target,
                                     BVariant variant = BVariant::Corrected);

/// Population of `target` in a 4x4 manifold matrix or a reduced atomic state.
double target_fidelity(const AtomicPopulations& pops, Target target);

struct FitResult {
  double slope = 0.0;  // 1 - F = slope / C
  double residual_rms = 0.0;
  int points_used = 0;
};

/// Least squares through the origin in x = 1/C. Points are (C, infidelity).
FitResult fit_inverse_c(std::span<const std::pair<double, double>> points);

enum class Objective { Analytic, EffectiveModel, Full };

std::string to_string(Objective o);
Objective parse_objective(const std::string& s);

struct ParamBound {
  std::string name;  // delta, nu, delta_cap, omega or omega_m
  double lower = 0.0;
  double upper = 0.0;
};

double& param_ref(PhysicalParams& p, const std::string& name);

struct OptimizeOptions {
  std::vector<ParamBound> free;
  Target target = Target::Singlet;
  Objective objective = Objective::Analytic;
  std::uint64_t seed = 1;
  int restarts = 3;
  int max_evaluations = 4000;
  double x_tolerance = 1e-10;
  Truncation truncation{1, 1};  // full objective only
};

struct OptimizeResult {
  PhysicalParams params;
  double fidelity = 0.0;
  int evaluations = 0;
};

/// Fidelity of `target` for the chosen objective.
double objective_fidelity(const PhysicalParams& p, Target target, Objective objective,
                          const Truncation& truncation = {1, 1});

/// Bounded Nelder-Mead on 1 - F with jittered restarts. The starting point must
/// lie inside the bounds; candidates outside are rejected. Deterministic per seed.
OptimizeResult optimize_fidelity(const PhysicalParams& base, const OptimizeOptions& options);

// --- sweeps -----------------------------------------------------------------

struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

struct CellValue {
  double fidelity_s = 0.0;
  double fidelity_t = 0.0;
  std::string method;
};

struct SweepCell {
  std::vector<double> coords;
  double fidelity_s = 0.0;
  double fidelity_t = 0.0;
  std::string method;
  double seconds = 0.0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

struct SweepTable {
  std::vector<SweepAxis> axes;
  std::vector<SweepCell> cells;  // row-major, last axis fastest

  /// Header <axis names>,F_S,F_T,method,seconds. The seconds column is written
  /// as 0 unless `timings` is set, keeping repeated runs byte-identical.
  void write_csv(std::ostream& os, bool timings = false) const;
  std::string to_json(bool timings = false) const;
};

using CellEvaluator = std::function<CellValue(std::span<const double> coords)>;

/// Evaluates every grid point with up to `parallelism` worker threads. Cell
/// exceptions are captured in the cell.
SweepTable sweep_grid(const std::vector<SweepAxis>& axes, const CellEvaluator& evaluator,
                      int parallelism);

std::string to_json(const FitResult& fit);

// --- dips -------------------------------------------------------------------

struct Dip {
  double x = 0.0;  // refined location
  double value = 0.0;
  double prominence = 0.0;
  int index = 0;  // grid index of the sampled minimum
};

/// Local minima with prominence >= `prominence`, refined by a three-point
/// parabola and sorted by x. Needs >= 5 points with strictly increasing x.
std::vector<Dip> find_dips(std::span<const std::pair<double, double>> curve,
                           double prominence = 0.01);

}  // namespace dissipent
