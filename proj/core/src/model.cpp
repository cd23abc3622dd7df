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

#include "dissipent/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dissipent/errors.hpp"

namespace dissipent {

namespace {

const double kSqrt2 = std::sqrt(2.0);

void require_finite(double v, const char* key) {
  if (!std::isfinite(v)) throw ParameterError(std::string(key) + " must be finite", key);
}

void require_nonnegative(double v, const char* key) {
  require_finite(v, key);
  if (v < 0.0) throw ParameterError(std::string(key) + " must be >= 0", key);
}

SparseOp product(const CompositeSpace& space, std::initializer_list<Factor> factors) {
  return embed_product(space, std::span<const Factor>(factors.begin(), factors.size()));
}

DenseMatrix atom_transition(int to, int from) {
  return local_matrix(SubsystemSpec::atom3(), LocalOp::transition(to, from));
}

}  // namespace

// --- PhysicalParams ---------------------------------------------------------

void PhysicalParams::validate() const {
  require_finite(g, "g");
  if (g <= 0.0) throw ParameterError("g must be > 0", "g");
  require_nonnegative(omega, "omega");
  require_nonnegative(omega_m, "omega_m");
  require_finite(theta_m, "theta_m");
  require_finite(delta_cap, "delta_cap");
  require_finite(delta, "delta");
  require_nonnegative(nu, "nu");
  require_nonnegative(kappa, "kappa");
  require_nonnegative(gamma0, "gamma0");
  require_nonnegative(gamma1, "gamma1");
  if (mediating_detunings.empty()) {
    throw ParameterError("at least one mediating mode is required", "n_mediating");
  }
  for (double d : mediating_detunings) require_finite(d, "mediating_detunings");
}

std::vector<std::string> PhysicalParams::regime_warnings() const {
  std::vector<std::string> out;
  const double scale = std::min({g, std::abs(delta), nu, std::abs(delta_cap)});
  const double limit = 0.25 * scale;
  auto check = [&](double rate, const char* name) {
    if (rate > limit) {
      std::ostringstream os;
      os << name << " = " << rate << " exceeds 0.25 * min(g, |delta|, nu, delta_cap) = " << limit
         << "; the weak-loss reduction may be inaccurate";
      out.push_back(os.str());
    }
  };
  check(kappa, "kappa");
  check(gamma(), "gamma");
  return out;
}

PhysicalParams PhysicalParams::reference(double theta_m) {
  PhysicalParams p;
  p.omega = 0.06;
  p.omega_m = 0.0138;
  p.theta_m = theta_m;
  p.delta_cap = 1.3;
  p.delta = 0.2875;
  p.nu = 0.4528;
  p.kappa = 0.0577;
  p.gamma0 = 0.0577;
  p.gamma1 = 0.0577;
  p.mediating_detunings = {0.0};
  return p;
}

std::vector<double> mediating_layout(int n, double delta_x) {
  if (n < 1) throw ParameterError("n_mediating must be >= 1", "n_mediating");
  if (n == 1) return {0.0};
  if (n == 2) return {0.0, delta_x};
  if (n % 2 == 0) {
    throw ParameterError("delta_x layout is defined for N = 1, 2 or odd N", "n_mediating");
  }
  std::vector<double> out;
  const int half = (n - 1) / 2;
  for (int k = -half; k <= half; ++k) out.push_back(k * delta_x);
  return out;
}

PhysicalParams with_cooperativity(PhysicalParams p, double c) {
  if (!(c > 0.0)) throw ParameterError("cooperativity must be > 0", "cooperativity");
  p.kappa = p.g / std::sqrt(2.0 * c);
  p.gamma0 = p.kappa;
  p.gamma1 = p.kappa;
  return p;
}

double cooperativity(const PhysicalParams& p) {
  if (!(p.kappa > 0.0)) throw ParameterError("cooperativity needs kappa > 0", "kappa");
  if (!(p.gamma() > 0.0)) throw ParameterError("cooperativity needs gamma > 0", "gamma0");
  return p.g * p.g / (p.kappa * p.gamma());
}

// --- layout / space -----------------------------------------------------------

ModeLayout ModeLayout::standard(int n_mediating) {
  ModeLayout l;
  l.mediating.clear();
  for (int n = 0; n < n_mediating; ++n) l.mediating.push_back(4 + n);
  return l;
}

std::vector<int> ModeLayout::field_modes() const {
  std::vector<int> out{cavity1, cavity2};
  out.insert(out.end(), mediating.begin(), mediating.end());
  return out;
}

void ModeLayout::check(const CompositeSpace& space) const {
  std::vector<int> all{atom1, atom2};
  const auto fields = field_modes();
  all.insert(all.end(), fields.begin(), fields.end());
  auto sorted = all;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ParameterError("layout indices are not distinct", "layout");
  }
  for (int i : all) {
    if (i < 0 || i >= space.num_subsystems()) {
      throw ParameterError("layout index outside the space", "layout");
    }
  }
  if (space.subsystem(atom1).kind != SubsystemKind::Atom3 ||
      space.subsystem(atom2).kind != SubsystemKind::Atom3) {
    throw ParameterError("layout atoms must be three-level subsystems", "layout");
  }
  for (int i : fields) {
    if (space.subsystem(i).kind != SubsystemKind::Mode) {
      throw ParameterError("layout field entries must be modes", "layout");
    }
  }
}

CompositeSpace build_model_space(int n_mediating, const Truncation& t) {
  if (n_mediating < 1) throw ParameterError("n_mediating must be >= 1", "n_mediating");
  if (t.per_mode_cap < 1) throw ParameterError("per_mode_cap must be >= 1", "per_mode_cap");
  if (t.excitation_cap < 0) throw ParameterError("excitation_cap must be >= 0", "excitation_cap");
  std::vector<SubsystemSpec> subs{SubsystemSpec::atom3(), SubsystemSpec::atom3()};
  for (int i = 0; i < n_mediating + 2; ++i) subs.push_back(SubsystemSpec::mode(t.per_mode_cap));
  return CompositeSpace::build(std::move(subs), t.excitation_cap);
}

// --- Hamiltonian ------------------------------------------------------------

HamiltonianParts build_hamiltonian_parts(const PhysicalParams& p, const CompositeSpace& space,
                                         const ModeLayout& layout) {
  p.validate();
  layout.check(space);
  if (static_cast<int>(layout.mediating.size()) != p.n_mediating()) {
    throw ParameterError("layout has a different number of mediating modes than params",
                         "n_mediating");
  }
  const int dim = space.dim();
  auto a = [&](int s) { return local_matrix(space.subsystem(s), LocalOp::annihilate()); };
  auto num = [&](int s) {
    const DenseMatrix m = a(s);
    return DenseMatrix(m.adjoint() * m);
  };

  SparseOp h0(dim);
  const std::array<std::pair<int, int>, 2> pairs{{{layout.atom1, layout.cavity1},
                                                  {layout.atom2, layout.cavity2}}};
  for (const auto& [atom, cavity] : pairs) {
    h0 += p.delta_cap * product(space, {{atom, atom_transition(2, 2)}});
    h0 += p.delta * product(space, {{cavity, num(cavity)}});
    const SparseOp jc = p.g * product(space, {{atom, atom_transition(2, 1)}, {cavity, a(cavity)}});
    h0 += jc + jc.adjoint();
  }
  for (int n = 0; n < p.n_mediating(); ++n) {
    const int b = layout.mediating[n];
    h0 += (p.mediating_detunings[n] + p.delta) * product(space, {{b, num(b)}});
    for (int cavity : {layout.cavity1, layout.cavity2}) {
      const DenseMatrix a_dag = a(cavity).adjoint();
      const SparseOp hop = p.nu * product(space, {{b, a(b)}, {cavity, a_dag}});
      h0 += hop + hop.adjoint();
    }
  }

  const Complex phase = std::polar(1.0, -p.theta_m);
  SparseOp raise_m = product(space, {{layout.atom1, atom_transition(1, 0)}}) +
                     phase * product(space, {{layout.atom2, atom_transition(1, 0)}});
  raise_m *= 0.5 * p.omega_m;
  SparseOp hg = raise_m + raise_m.adjoint();

  SparseOp v_plus = product(space, {{layout.atom1, atom_transition(2, 0)}}) +
                    product(space, {{layout.atom2, atom_transition(2, 0)}});
  v_plus *= 0.5 * p.omega;
  SparseOp v_minus = v_plus.adjoint();

  return {std::move(h0), std::move(hg), std::move(v_plus), std::move(v_minus)};
}

// --- collapse operators -----------------------------------------------------

std::vector<CollapseOp> build_collapse_ops(const PhysicalParams& p, const CompositeSpace& space,
                                           const ModeLayout& layout) {
  p.validate();
  layout.check(space);
  if (static_cast<int>(layout.mediating.size()) != p.n_mediating()) {
    throw ParameterError("layout has a different number of mediating modes than params",
                         "n_mediating");
  }
  std::vector<CollapseOp> out;
  const double sk = std::sqrt(p.kappa);
  out.push_back({"kappa_a1", sk * local_operator(space, layout.cavity1, LocalOp::annihilate())});
  out.push_back({"kappa_a2", sk * local_operator(space, layout.cavity2, LocalOp::annihilate())});
  for (int n = 0; n < p.n_mediating(); ++n) {
    out.push_back({"kappa_b" + std::to_string(n + 1),
                   sk * local_operator(space, layout.mediating[n], LocalOp::annihilate())});
  }
  const double s0 = std::sqrt(p.gamma0);
  const double s1 = std::sqrt(p.gamma1);
  out.push_back({"gamma1", s0 * local_operator(space, layout.atom1, LocalOp::transition(0, 2))});
  out.push_back({"gamma2", s0 * local_operator(space, layout.atom2, LocalOp::transition(0, 2))});
  out.push_back({"gamma3", s1 * local_operator(space, layout.atom1, LocalOp::transition(1, 2))});
  out.push_back({"gamma4", s1 * local_operator(space, layout.atom2, LocalOp::transition(1, 2))});
  return out;
}

std::vector<SparseOp> operators_of(const std::vector<CollapseOp>& collapse) {
  std::vector<SparseOp> out;
  out.reserve(collapse.size());
  for (const auto& c : collapse) out.push_back(c.op);
  return out;
}

std::vector<CollapseOp> delocalize_field_channels(const std::vector<CollapseOp>& collapse) {
  const CollapseOp* a1 = nullptr;
  const CollapseOp* a2 = nullptr;
  const CollapseOp* b1 = nullptr;
  std::vector<CollapseOp> rest;
  for (const auto& c : collapse) {
    if (c.label == "kappa_a1") {
      a1 = &c;
    } else if (c.label == "kappa_a2") {
      a2 = &c;
    } else if (c.label == "kappa_b1") {
      b1 = &c;
    } else if (c.label.rfind("kappa_b", 0) == 0) {
      throw ParameterError("delocalized channels need exactly one mediating mode", "n_mediating");
    } else {
      rest.push_back(c);
    }
  }
  if (!a1 || !a2 || !b1) {
    throw ParameterError("collapse set lacks kappa_a1/kappa_a2/kappa_b1", "collapse");
  }
  std::vector<CollapseOp> out;
  out.push_back({"kappa_c1", (1.0 / kSqrt2) * (a1->op - a2->op)});
  out.push_back({"kappa_c2", 0.5 * (a1->op + a2->op + kSqrt2 * b1->op)});
  out.push_back({"kappa_c3", 0.5 * (a1->op + a2->op - kSqrt2 * b1->op)});
  out.insert(out.end(), rest.begin(), rest.end());
  return out;
}

// --- delocalized modes ------------------------------------------------------

DelocalizedModes delocalized_transform(const PhysicalParams& p, const CompositeSpace& space,
                                       const ModeLayout& layout) {
  if (p.n_mediating() != 1 || p.mediating_detunings[0] != 0.0) {
    throw ParameterError("delocalized transform needs exactly one resonant mediating mode",
                         "mediating_detunings");
  }
  const auto parts = build_hamiltonian_parts(p, space, layout);
  const SparseOp a1 = local_operator(space, layout.cavity1, LocalOp::annihilate());
  const SparseOp a2 = local_operator(space, layout.cavity2, LocalOp::annihilate());
  const SparseOp b1 = local_operator(space, layout.mediating[0], LocalOp::annihilate());

  DelocalizedModes out;
  out.c1 = (1.0 / kSqrt2) * (a1 - a2);
  out.c2 = 0.5 * (a1 + a2 + kSqrt2 * b1);
  out.c3 = 0.5 * (a1 + a2 - kSqrt2 * b1);
  out.frequencies = {p.delta, p.delta + kSqrt2 * p.nu, p.delta - kSqrt2 * p.nu};

  const SparseOp e1 = local_operator(space, layout.atom1, LocalOp::project(2));
  const SparseOp e2 = local_operator(space, layout.atom2, LocalOp::project(2));
  const SparseOp r1 = local_operator(space, layout.atom1, LocalOp::transition(2, 1));
  const SparseOp r2 = local_operator(space, layout.atom2, LocalOp::transition(2, 1));

  SparseOp h = p.delta_cap * (e1 + e2);
  const SparseOp field1 = 0.5 * out.c2 + 0.5 * out.c3 + (kSqrt2 / 2.0) * out.c1;
  const SparseOp field2 = 0.5 * out.c2 + 0.5 * out.c3 - (kSqrt2 / 2.0) * out.c1;
  const SparseOp coupling = p.g * (r1 * field1) + p.g * (r2 * field2);
  h += coupling + coupling.adjoint();
  h += out.frequencies[0] * (out.c1.adjoint() * out.c1);
  h += out.frequencies[1] * (out.c2.adjoint() * out.c2);
  h += out.frequencies[2] * (out.c3.adjoint() * out.c3);
  out.h0 = std::move(h);

  const double mismatch = max_abs_diff(out.h0, parts.h0);
  if (mismatch > 1e-12) {
    std::ostringstream os;
    os << "normal-mode H0 differs from lab-basis H0 by " << mismatch;
    throw NumericalError(os.str());
  }
  return out;
}

std::vector<double> delocalized_frequencies(const PhysicalParams& p) {
  const int n = p.n_mediating();
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n + 2, n + 2);
  m(0, 0) = p.delta;
  m(1, 1) = p.delta;
  for (int k = 0; k < n; ++k) {
    m(k + 2, k + 2) = p.delta + p.mediating_detunings[k];
    for (int c = 0; c < 2; ++c) {
      m(c, k + 2) = p.nu;
      m(k + 2, c) = p.nu;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> out(es.eigenvalues().data(), es.eigenvalues().data() + n + 2);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dissipent
