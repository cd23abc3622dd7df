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

// Experiment drivers shared by the subcommands, the figure presets and the
// acceptance suite.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cli/config.hpp"
#include "dissipent/analysis.hpp"
#include "dissipent/dynamics.hpp"
#include "dissipent/effective.hpp"

namespace dissipent::cli {

/// Ground-manifold amplitudes (|00>, |S>, |T>, |11>) of the initial state.
DenseVector manifold_amplitudes(InitialKind kind, std::uint64_t seed);

/// Initial density matrix on a model space with every field in vacuum.
DensityMatrix initial_density(InitialKind kind, std::uint64_t seed, const CompositeSpace& space,
                              const ModeLayout& layout);

EvolveOptions evolve_options(const IntegratorConfig& cfg);

/// How a single parameter point is turned into (F_S, F_T).
struct CellSpec {
  Objective evaluator = Objective::Full;
  bool at_time = false;
  Truncation truncation{2, 2};
  IntegratorConfig integrator;
  InitialKind initial_state = InitialKind::Random;
  std::uint64_t seed = 7;
};

CellValue evaluate_point(const PhysicalParams& p, const CellSpec& spec);

SweepTable run_sweep(const PhysicalParams& base, const std::vector<SweepAxis>& axes,
                     const CellSpec& spec, int jobs);

// --- population dynamics ------------------------------------------------------

struct DynamicsOptions {
  double theta_m = 0.0;
  Truncation truncation{2, 2};
  IntegratorConfig integrator;
  InitialKind initial_state = InitialKind::Random;
  std::uint64_t seed = 7;
  bool stark_shifts = true;  // effective-model comparison run
};

struct DynamicsResult {
  Trajectory full;
  Trajectory effective;
  double max_deviation = 0.0;  // max over records and the four populations
  double deviation_time = 0.0;
};

DynamicsResult run_population_dynamics(const DynamicsOptions& options);

// --- cooperativity scaling --------------------------------------------------

struct ScalingPoint {
  double cooperativity = 0.0;
  Target target = Target::Singlet;
  PhysicalParams params;
  double infidelity = 0.0;  // from the optimization objective
  std::optional<double> full_infidelity;
};

struct ScalingResult {
  std::vector<ScalingPoint> points;
  std::vector<std::pair<Target, FitResult>> fits;       // objective values
  std::vector<std::pair<Target, FitResult>> full_fits;  // full solves, when at least two exist
  std::vector<double> confirmed;                        // cooperativities with full solves
};

/// Optimizes the free parameters per cooperativity and fits 1 - F = a/C.
ScalingResult run_scaling(const PhysicalParams& base, const FitConfig& fit, const Truncation& truncation,
                          std::uint64_t seed, int jobs);

// --- mediator spacing ---------------------------------------------------------

struct SpacingResult {
  int n_mediating = 1;
  Truncation truncation;
  SweepTable table;
  double reference_fs = 0.0;  // single mediator, same truncation
  std::vector<Dip> dips;
};

/// Steady-state F_S over delta_x in [-1, 1] (41 points) for N mediators.
SpacingResult run_spacing(int n_mediating, const Truncation& truncation, int jobs,
                          int points = 41);

Truncation spacing_truncation(int n_mediating);

}  // namespace dissipent::cli
