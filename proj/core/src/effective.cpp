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

#include "dissipent/effective.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>
#include <Eigen/SVD>

#include "dissipent/errors.hpp"

namespace dissipent {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);
constexpr double kMaxCondition = 1e12;

int ground_index(const CompositeSpace& space, const ModeLayout& layout, int a1, int a2) {
  std::vector<int> levels(space.num_subsystems(), 0);
  levels[layout.atom1] = a1;
  levels[layout.atom2] = a2;
  const auto idx = space.index_of(levels);
  if (!idx) throw ParameterError("ground state missing from the truncated space", "excitation_cap");
  return *idx;
}

double checked_ratio(double num, double den, const char* what) {
  if (den == 0.0 || !std::isfinite(num / den)) {
    throw NumericalError(std::string("singular parameters: denominator of ") + what + " vanishes");
  }
  return num / den;
}

Complex checked_ratio(Complex num, Complex den, const char* what) {
  if (den == Complex(0.0)) {
    throw NumericalError(std::string("singular parameters: denominator of ") + what + " vanishes");
  }
  return num / den;
}

DenseMatrix ket_bra(int to, int from) {
  DenseMatrix m = DenseMatrix::Zero(4, 4);
  m(to, from) = 1.0;
  return m;
}

DenseMatrix microwave_block(const PhysicalParams& p) {
  const CompositeSpace ground = build_model_space(p.n_mediating(), Truncation{0, 1});
  const ModeLayout layout = ModeLayout::standard(p.n_mediating());
  const auto parts = build_hamiltonian_parts(p, ground, layout);
  return GroundManifold(ground, layout).compress(parts.hg);
}

}  // namespace

// --- manifold ---------------------------------------------------------------

GroundManifold::GroundManifold(const CompositeSpace& space, const ModeLayout& layout) {
  layout.check(space);
  basis_ = DenseMatrix::Zero(space.dim(), 4);
  const int g00 = ground_index(space, layout, 0, 0);
  const int g10 = ground_index(space, layout, 1, 0);
  const int g01 = ground_index(space, layout, 0, 1);
  const int g11 = ground_index(space, layout, 1, 1);
  basis_(g00, kP00) = 1.0;
  basis_(g10, kSinglet) = kInvSqrt2;
  basis_(g01, kSinglet) = -kInvSqrt2;
  basis_(g10, kTriplet) = kInvSqrt2;
  basis_(g01, kTriplet) = kInvSqrt2;
  basis_(g11, kP11) = 1.0;
}

DenseMatrix GroundManifold::compress(const DenseMatrix& op) const {
  return basis_.adjoint() * op * basis_;
}

DenseMatrix GroundManifold::compress(const SparseOp& op) const {
  if (op.dim() != space_dim()) throw ParameterError("operator does not act on the manifold space");
  return basis_.adjoint() * (op.matrix() * basis_);
}

DenseMatrix GroundManifold::lift(const DenseMatrix& rho4) const {
  if (rho4.rows() != 4 || rho4.cols() != 4) throw ParameterError("expected a 4x4 matrix");
  return basis_ * rho4 * basis_.adjoint();
}

SparseOp nonhermitian_hamiltonian(const SparseOp& h0, const std::vector<SparseOp>& collapse) {
  SparseOp out = h0;
  for (const auto& l : collapse) out -= Complex(0.0, 0.5) * (l.adjoint() * l);
  return out;
}

// --- numeric reduction ------------------------------------------------------

EffectiveReducer::EffectiveReducer(const CompositeSpace& space, const HamiltonianParts& parts,
                                   const std::vector<CollapseOp>& collapse,
                                   const GroundManifold& manifold)
    : space_(space), parts_(parts), collapse_(collapse), manifold_(manifold) {
  if (manifold.space_dim() != space.dim() || parts.h0.dim() != space.dim()) {
    throw ParameterError("reduction inputs live on different spaces");
  }
  for (int i = 0; i < space.dim(); ++i) {
    if (space.excitation(i) == 1) block_.push_back(i);
  }
  if (block_.empty()) {
    throw ParameterError("space has no single-excitation states", "excitation_cap");
  }

  const DenseMatrix driven = parts.v_plus.matrix() * manifold.basis();
  std::vector<char> in_block(space.dim(), 0);
  for (int i : block_) in_block[i] = 1;
  for (int i = 0; i < space.dim(); ++i) {
    if (!in_block[i] && driven.row(i).cwiseAbs().maxCoeff() != 0.0) {
      throw ParameterError("drive leaves the single-excitation block", "excitation_cap");
    }
  }

  const SparseOp hnh = nonhermitian_hamiltonian(parts.h0, operators_of(collapse));
  const DenseMatrix hnh_dense = hnh.to_dense();
  const auto nb = static_cast<Eigen::Index>(block_.size());
  DenseMatrix h_block(nb, nb);
  DenseMatrix drive_block(nb, 4);
  for (Eigen::Index r = 0; r < nb; ++r) {
    for (Eigen::Index c = 0; c < nb; ++c) h_block(r, c) = hnh_dense(block_[r], block_[c]);
    drive_block.row(r) = driven.row(block_[r]);
  }

  Eigen::JacobiSVD<DenseMatrix> svd(h_block);
  const auto& sv = svd.singularValues();
  condition_ = sv[nb - 1] > 0.0 ? sv[0] / sv[nb - 1] : std::numeric_limits<double>::infinity();
  if (!(condition_ <= kMaxCondition)) {
    std::ostringstream os;
    os << "single-excitation block is singular or ill-conditioned (condition " << condition_ << ")";
    throw NumericalError(os.str());
  }
  propagated_ = h_block.partialPivLu().solve(drive_block);
}

DenseMatrix EffectiveReducer::effective_hamiltonian() const {
  // basis^dag V- restricted to block columns.
  const DenseMatrix lowered = manifold_.basis().adjoint() * parts_.v_minus.to_dense();
  DenseMatrix lowered_block(4, block_.size());
  for (std::size_t c = 0; c < block_.size(); ++c) lowered_block.col(c) = lowered.col(block_[c]);
  const DenseMatrix m = lowered_block * propagated_;
  DenseMatrix h = -0.5 * (m + m.adjoint()) + manifold_.compress(parts_.hg);
  return 0.5 * (h + h.adjoint());
}

std::vector<LabeledMatrix> EffectiveReducer::effective_lindblads() const {
  std::vector<LabeledMatrix> out;
  const auto nb = static_cast<Eigen::Index>(block_.size());
  for (const auto& c : collapse_) {
    // L restricted to block columns, then projected onto the manifold.
    DenseMatrix l_block = DenseMatrix::Zero(space_.dim(), nb);
    const DenseMatrix l = c.op.to_dense();
    for (Eigen::Index k = 0; k < nb; ++k) l_block.col(k) = l.col(block_[k]);
    DenseMatrix m = manifold_.basis().adjoint() * (l_block * propagated_);
    if (m.cwiseAbs().maxCoeff() == 0.0) continue;
    out.push_back({c.label, std::move(m)});
  }
  return out;
}

LindbladGenerator EffectiveModel::generator() const {
  LindbladGenerator gen{SparseOp::from_dense(h_eff), {}};
  for (const auto& l : lindblads) gen.collapse.push_back(SparseOp::from_dense(l.matrix));
  return gen;
}

EffectiveModel reduce_model(const PhysicalParams& p) {
  p.validate();
  const int n = p.n_mediating();
  const CompositeSpace space = build_model_space(n, Truncation{1, 1});
  const ModeLayout layout = ModeLayout::standard(n);
  const auto parts = build_hamiltonian_parts(p, space, layout);
  auto collapse = build_collapse_ops(p, space, layout);
  if (n == 1) collapse = delocalize_field_channels(collapse);
  const GroundManifold manifold(space, layout);
  const EffectiveReducer reducer(space, parts, collapse, manifold);
  return EffectiveModel{reducer.effective_hamiltonian(), reducer.effective_lindblads()};
}

// --- rates ------------------------------------------------------------------

std::vector<std::pair<std::string, double>> RateSet::entries() const {
  return {{"kappa_c1_1", kappa_c1_1}, {"kappa_c1_2", kappa_c1_2}, {"kappa_c2_1", kappa_c2_1},
          {"kappa_c2_2", kappa_c2_2}, {"kappa_c3_1", kappa_c3_1}, {"kappa_c3_2", kappa_c3_2},
          {"gamma_e", gamma_e},       {"gamma_s_12", gamma_s_12}, {"gamma_s_34", gamma_s_34},
          {"gamma_t_12", gamma_t_12}, {"gamma_t_34", gamma_t_34}};
}

std::array<double, 3> AnalyticRates::stark_shifts(double omega) const {
  const double w2 = omega * omega;
  return {-(w2 * r1).real(), -(0.25 * w2 * r2).real(), -(0.25 * w2 * r3).real()};
}

AnalyticRates analytic_rates(const PhysicalParams& p, BVariant variant) {
  p.validate();
  if (p.n_mediating() != 1) {
    throw ParameterError("closed-form rates exist only for a single mediating mode",
                         "n_mediating");
  }
  if (p.mediating_detunings[0] != 0.0) {
    throw ParameterError("closed-form rates need a resonant mediating mode",
                         "mediating_detunings");
  }
  const double g = p.g;
  const double g2 = g * g;
  const double big = p.delta_cap;
  const double d = p.delta;
  const double d2 = d * d;
  const double nu2 = p.nu * p.nu;
  const double k = p.kappa;
  const double gam = p.gamma();
  const double sqrt2_nu = std::sqrt(2.0) * p.nu;

  AnalyticRates r;
  r.variant = variant;
  r.g_e = g * p.omega;
  const double ge2 = r.g_e * r.g_e;
  r.delta_p = Complex(d, -0.5 * k);
  r.delta_cap_p = Complex(big, -0.5 * gam);

  const Complex dp = r.delta_p;
  const Complex dp2 = dp * dp;
  const Complex bp = r.delta_cap_p;
  r.r1 = checked_ratio(dp * (dp2 - 2.0 * nu2), bp * dp * (dp2 - 2.0 * nu2) - g2 * (dp2 - nu2),
                       "R1");
  const Complex shared = (g2 - dp * bp) * (dp2 * bp - dp * g2 + 2.0 * bp * nu2);
  r.r2 = checked_ratio(bp * dp * (dp2 - 2.0 * nu2) - g2 * dp2, shared, "R2");
  r.r3 = checked_ratio(bp * dp * (dp2 - 2.0 * nu2) - g2 * (dp2 - 2.0 * nu2), shared, "R3");

  r.a_coef = big * d * (d2 - 2.0 * nu2) - g2 * (d2 - nu2);
  const double lead = variant == BVariant::Corrected ? 0.5 * d2 - nu2 : 0.5 * d - nu2;
  r.b_coef = lead * (big * k + gam * d) + d * k * (big * d - g2);
  r.c1_coef = g2 - big * d;
  r.d1_coef = 0.5 * (big * k + d * gam);
  r.c2_coef = g2 * d - big * (d2 - 2.0 * nu2);
  r.d2_coef = k * (big * d - 0.5 * g2) + 0.5 * gam * (d2 - 2.0 * nu2);

  const double ab = r.a_coef * r.a_coef + r.b_coef * r.b_coef;
  const double cd1 = r.c1_coef * r.c1_coef + r.d1_coef * r.d1_coef;
  const double cd2 = r.c2_coef * r.c2_coef + r.d2_coef * r.d2_coef;
  const double minus = (d - sqrt2_nu) * (d - sqrt2_nu);
  const double plus = (d + sqrt2_nu) * (d + sqrt2_nu);

  r.kappa_c1_1 = checked_ratio((d2 - 2.0 * nu2) * (d2 - 2.0 * nu2) * ge2 * k / 4.0, ab, "A^2 + B^2");
  r.kappa_c1_2 = checked_ratio(ge2 * k / 8.0, cd1, "C1^2 + D1^2");
  r.kappa_c2_1 = checked_ratio(d2 * minus * ge2 * k / 8.0, ab, "A^2 + B^2");
  r.kappa_c2_2 = checked_ratio(minus * ge2 * k / 16.0, cd2, "C2^2 + D2^2");
  r.kappa_c3_1 = checked_ratio(d2 * plus * ge2 * k / 8.0, ab, "A^2 + B^2");
  r.kappa_c3_2 = checked_ratio(plus * ge2 * k / 16.0, cd2, "C2^2 + D2^2");

  const double emission_den = big * (d2 - nu2) + d * g2;
  r.gamma_e = checked_ratio(gam * p.omega * p.omega * nu2 * nu2, emission_den * emission_den,
                            "gamma_e");
  r.gamma_s_12 = r.gamma_e / 32.0;
  r.gamma_t_12 = r.gamma_e / 32.0;
  r.gamma_s_34 = r.gamma_e / 16.0;
  r.gamma_t_34 = r.gamma_e / 16.0;
  return r;
}

RateSet numeric_rates(const EffectiveModel& model) {
  auto find = [&](const std::string& label) -> const DenseMatrix* {
    for (const auto& l : model.lindblads) {
      if (l.label == label) return &l.matrix;
    }
    return nullptr;
  };
  auto rate = [&](const std::string& label, int to, int from) {
    const DenseMatrix* m = find(label);
    return m ? std::norm((*m)(to, from)) : 0.0;
  };
  if (!find("kappa_c1") && find("kappa_a1")) {
    throw ParameterError("numeric rates need the delocalized channel labeling", "n_mediating");
  }
  RateSet r;
  r.kappa_c1_1 = rate("kappa_c1", kSinglet, kP00);
  r.kappa_c1_2 = rate("kappa_c1", kP11, kSinglet);
  r.kappa_c2_1 = rate("kappa_c2", kTriplet, kP00);
  r.kappa_c2_2 = rate("kappa_c2", kP11, kTriplet);
  r.kappa_c3_1 = rate("kappa_c3", kTriplet, kP00);
  r.kappa_c3_2 = rate("kappa_c3", kP11, kTriplet);
  r.gamma_s_12 = rate("gamma1", kTriplet, kSinglet);
  r.gamma_s_34 = rate("gamma3", kP11, kSinglet);
  r.gamma_t_12 = rate("gamma1", kSinglet, kTriplet);
  r.gamma_t_34 = rate("gamma3", kP11, kTriplet);
  r.gamma_e = 32.0 * r.gamma_s_12;
  return r;
}

// --- four-level generator ---------------------------------------------------

LindbladGenerator build_effective_generator(const PhysicalParams& p,
                                            const EffectiveOptions& options) {
  p.validate();
  if (options.source == RateSource::Numeric) {
    const EffectiveModel model = reduce_model(p);
    DenseMatrix h = options.stark_shifts ? model.h_eff : microwave_block(p);
    return EffectiveModel{std::move(h), model.lindblads}.generator();
  }

  const AnalyticRates r = analytic_rates(p, options.variant);
  DenseMatrix h = microwave_block(p);
  if (options.stark_shifts) {
    const auto shifts = r.stark_shifts(p.omega);
    for (int i = 0; i < 3; ++i) h(i, i) += shifts[i];
  }
  std::vector<LabeledMatrix> ch;
  auto two_step = [&](const char* label, int mid, double first, double second) {
    ch.push_back({label, std::sqrt(first) * ket_bra(mid, kP00) + std::sqrt(second) * ket_bra(kP11, mid)});
  };
  two_step("kappa_c1", kSinglet, r.kappa_c1_1, r.kappa_c1_2);
  two_step("kappa_c2", kTriplet, r.kappa_c2_1, r.kappa_c2_2);
  two_step("kappa_c3", kTriplet, r.kappa_c3_1, r.kappa_c3_2);
  for (const char* atom : {"1", "2"}) {
    const std::string a(atom);
    ch.push_back({"gamma_s_12_" + a, std::sqrt(r.gamma_s_12) * ket_bra(kTriplet, kSinglet)});
    ch.push_back({"gamma_s_34_" + a, std::sqrt(r.gamma_s_34) * ket_bra(kP11, kSinglet)});
    ch.push_back({"gamma_t_12_" + a, std::sqrt(r.gamma_t_12) * ket_bra(kSinglet, kTriplet)});
    ch.push_back({"gamma_t_34_" + a, std::sqrt(r.gamma_t_34) * ket_bra(kP11, kTriplet)});
  }
  return EffectiveModel{std::move(h), std::move(ch)}.generator();
}

std::string to_string(BVariant v) { return v == BVariant::Corrected ? "corrected" : "printed"; }

std::string to_string(RateSource s) { return s == RateSource::Numeric ? "numeric" : "analytic"; }

}  // namespace dissipent
