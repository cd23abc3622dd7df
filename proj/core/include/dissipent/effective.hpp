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

// Second-order adiabatic elimination of the excited and one-photon states,
// leaving a four-level generator on {|00>, |S>, |T>, |11>}.

#pragma once

#include <array>
#include <complex>
#include <string>
#include <vector>

#include "dissipent/dynamics.hpp"
#include "dissipent/model.hpp"
#include "dissipent/qspace.hpp"

namespace dissipent {

/// Ground-manifold indices.
enum ManifoldState : int { kP00 = 0, kSinglet = 1, kTriplet = 2, kP11 = 3 };

/// |00>, |S> = (|10> - |01>)/sqrt2, |T> = (|10> + |01>)/sqrt2, |11>, each with
/// every field mode in vacuum. |10> means atom 1 in |1>.
class GroundManifold {
 public:
  GroundManifold(const CompositeSpace& space, const ModeLayout& layout);

  int space_dim() const { return static_cast<int>(basis_.rows()); }
  /// dim x 4, orthonormal columns.
  const DenseMatrix& basis() const { return basis_; }

  /// basis^dag * op * basis.
  DenseMatrix compress(const DenseMatrix& op) const;
  DenseMatrix compress(const SparseOp& op) const;
  /// Lifts a 4x4 density matrix into the full space.
  DenseMatrix lift(const DenseMatrix& rho4) const;

 private:
  DenseMatrix basis_;
};

/// H0 - (i/2) sum L^dag L.
SparseOp nonhermitian_hamiltonian(const SparseOp& h0, const std::vector<SparseOp>& collapse);

struct LabeledMatrix {
  std::string label;
  DenseMatrix matrix;
};

/// Numeric reduction. The non-Hermitian Hamiltonian is inverted on the
/// single-excitation block only; that block must be reachable by V+ and have
/// condition number <= 1e12 (NumericalError otherwise).
class EffectiveReducer {
 public:
  EffectiveReducer(const CompositeSpace& space, const HamiltonianParts& parts,
                   const std::vector<CollapseOp>& collapse, const GroundManifold& manifold);

  /// -1/2 V- [H^-1 + (H^-1)^dag] V+ + Hg on the manifold. Hermitian.
  DenseMatrix effective_hamiltonian() const;
  /// L H^-1 V+ on the manifold, one per collapse operator (zero channels dropped).
  std::vector<LabeledMatrix> effective_lindblads() const;

  double block_condition() const { return condition_; }
  int block_dim() const { return static_cast<int>(block_.size()); }

 private:
  const CompositeSpace& space_;
  const HamiltonianParts& parts_;
  const std::vector<CollapseOp>& collapse_;
  const GroundManifold& manifold_;
  std::vector<int> block_;
  DenseMatrix propagated_;  // H_block^-1 (V+ basis)_block, |block| x 4
  double condition_ = 0.0;
};

struct EffectiveModel {
  DenseMatrix h_eff;  // 4x4
  std::vector<LabeledMatrix> lindblads;

  LindbladGenerator generator() const;
};

/// Runs the reduction for N = 1 at excitation cap 1 with the field channels in
/// the delocalized labeling (kappa_c1..c3, gamma1..gamma4). For N > 1 the lab
/// labeling (kappa_a1, kappa_a2, kappa_b*) is kept.
EffectiveModel reduce_model(const PhysicalParams& p);

/// Decay rates on the manifold, named after the channel they belong to.
struct RateSet {
  double kappa_c1_1 = 0.0;  // |00> -> |S>
  double kappa_c1_2 = 0.0;  // |S> -> |11>
  double kappa_c2_1 = 0.0;  // |00> -> |T>
  double kappa_c2_2 = 0.0;  // |T> -> |11>
  double kappa_c3_1 = 0.0;
  double kappa_c3_2 = 0.0;
  double gamma_e = 0.0;
  double gamma_s_12 = 0.0;  // |S> -> |T>, per channel
  double gamma_s_34 = 0.0;  // |S> -> |11>
  double gamma_t_12 = 0.0;  // |T> -> |S>
  double gamma_t_34 = 0.0;  // |T> -> |11>

  /// (name, value) in declaration order.
  std::vector<std::pair<std::string, double>> entries() const;
};

/// Which variant of the B coefficient to use. `Corrected` has (delta^2/2 - nu^2)
/// in the leading factor, `Printed` has (delta/2 - nu^2).
enum class BVariant { Corrected, Printed };

struct AnalyticRates : RateSet {
  double g_e = 0.0;
  Complex delta_p;      // delta - i kappa/2
  Complex delta_cap_p;  // Delta - i gamma/2
  Complex r1, r2, r3;
  double a_coef = 0.0;
  double b_coef = 0.0;
  double c1_coef = 0.0;
  double d1_coef = 0.0;
  double c2_coef = 0.0;
  double d2_coef = 0.0;
  BVariant variant = BVariant::Corrected;

  /// Diagonal light shifts on |00>, |S>, |T>.
  std::array<double, 3> stark_shifts(double omega) const;
};

/// Closed-form rates for a single resonant mediator. Throws ParameterError for
/// N != 1 or a detuned mediator and NumericalError on a vanishing denominator.
AnalyticRates analytic_rates(const PhysicalParams& p, BVariant variant = BVariant::Corrected);

/// Reads the rates off a reduced model in the delocalized labeling.
RateSet numeric_rates(const EffectiveModel& model);

enum class RateSource { Numeric, Analytic };

struct EffectiveOptions {
  RateSource source = RateSource::Numeric;
  bool stark_shifts = false;
  BVariant variant = BVariant::Corrected;
};

/// Four-level generator. The Hamiltonian is the microwave block, plus the
/// light shifts when requested.
LindbladGenerator build_effective_generator(const PhysicalParams& p,
                                            const EffectiveOptions& options = {});

std::string to_string(BVariant v);
std::string to_string(RateSource s);

}  // namespace dissipent
