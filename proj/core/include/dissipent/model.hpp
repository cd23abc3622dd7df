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

// Two three-level atoms in two cavities, both cavities coupled to N mediating
// bosonic modes. Every quantity is dimensionless in units of the atom-cavity
// coupling g.

#pragma once

#include <array>
#include <string>
#include <vector>

#include "dissipent/qspace.hpp"

namespace dissipent {

struct PhysicalParams {
  double g = 1.0;
  double omega = 0.0;      // drive |0> <-> |2>
  double omega_m = 0.0;    // microwave |0> <-> |1>
  double theta_m = 0.0;    // microwave phase on atom 2
  double delta_cap = 0.0;  // drive detuning
  double delta = 0.0;      // cavity detuning
  double nu = 0.0;         // cavity <-> mediating-mode coupling, same for every mode
  double kappa = 0.0;      // field decay, same for cavities and mediating modes
  double gamma0 = 0.0;     // |2> -> |0>
  double gamma1 = 0.0;     // |2> -> |1>
  std::vector<double> mediating_detunings{0.0};

  int n_mediating() const { return static_cast<int>(mediating_detunings.size()); }
  double gamma() const { return gamma0 + gamma1; }

  /// Throws ParameterError naming the offending field.
  void validate() const;

  /// Human-readable notes when the weak-loss regime is not met, i.e. when
  /// kappa or gamma exceeds a quarter of min(g, |delta|, nu, delta_cap).
  std::vector<std::string> regime_warnings() const;

  /// Working point used for the single-mediator figures: C = 150, gamma = 2 kappa.
  static PhysicalParams reference(double theta_m = 0.0);
};

/// Mediating detunings for the multi-mode presets: N = 1 -> {0}; N = 2 ->
/// {0, dx}; odd N -> {k dx : k = -(N-1)/2 .. (N-1)/2}. Other even N are rejected.
std::vector<double> mediating_layout(int n, double delta_x);

/// Sets kappa and gamma0 = gamma1 so that C = g^2/(kappa gamma) with gamma = 2 kappa.
PhysicalParams with_cooperativity(PhysicalParams p, double cooperativity);

struct Truncation {
  int excitation_cap = 2;
  int per_mode_cap = 2;
};

/// Subsystem positions inside the composite space.
struct ModeLayout {
  int atom1 = 0;
  int atom2 = 1;
  int cavity1 = 2;
  int cavity2 = 3;
  std::vector<int> mediating{4};

  /// [atom, atom, cavity, cavity, b_1..b_N] ordering.
  static ModeLayout standard(int n_mediating);
  void check(const CompositeSpace& space) const;
  std::vector<int> field_modes() const;
};

CompositeSpace build_model_space(int n_mediating, const Truncation& truncation);

struct HamiltonianParts {
  SparseOp h0;
  SparseOp hg;
  SparseOp v_plus;
  SparseOp v_minus;

  SparseOp total() const { return h0 + hg + v_plus + v_minus; }
};

HamiltonianParts build_hamiltonian_parts(const PhysicalParams& p, const CompositeSpace& space,
                                         const ModeLayout& layout);

/// A collapse operator together with its channel label.
struct CollapseOp {
  std::string label;
  SparseOp op;
};

/// Lab-basis set, in order: sqrt(kappa) a_1, a_2, b_1..b_N (labels kappa_a1,
/// kappa_a2, kappa_b1..), then sqrt(gamma0)|0><2| on atoms 1, 2 (gamma1,
/// gamma2) and sqrt(gamma1)|1><2| on atoms 1, 2 (gamma3, gamma4).
std::vector<CollapseOp> build_collapse_ops(const PhysicalParams& p, const CompositeSpace& space,
                                           const ModeLayout& layout);

std::vector<SparseOp> operators_of(const std::vector<CollapseOp>& collapse);

/// Replaces the three single-mediator field channels by the normal-mode
/// channels kappa_c1..kappa_c3 (c1 = (a1-a2)/sqrt2, c2 = (a1+a2+sqrt2 b1)/2,
/// c3 = (a1+a2-sqrt2 b1)/2). Requires exactly one mediating mode.
std::vector<CollapseOp> delocalize_field_channels(const std::vector<CollapseOp>& collapse);

struct DelocalizedModes {
  SparseOp c1, c2, c3;
  /// H0 rewritten on c1..c3 (single resonant mediator).
  SparseOp h0;
  std::array<double, 3> frequencies{};  // delta, delta + sqrt2 nu, delta - sqrt2 nu
};

/// Normal modes of the single resonant mediator. Throws ParameterError unless
/// N = 1 with a resonant mediator, and NumericalError if the rewritten H0
/// differs from the lab-basis H0 by more than 1e-12.
DelocalizedModes delocalized_transform(const PhysicalParams& p, const CompositeSpace& space,
                                       const ModeLayout& layout);

/// Eigenvalues (ascending) of the one-photon coupling matrix of the two
/// cavities and N mediating modes.
std::vector<double> delocalized_frequencies(const PhysicalParams& p);

/// C = g^2 / (kappa gamma), gamma = gamma0 + gamma1.
double cooperativity(const PhysicalParams& p);

}  // namespace dissipent
