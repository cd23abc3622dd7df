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

#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "dissipent/dynamics.hpp"
#include "dissipent/errors.hpp"
#include "dissipent/model.hpp"
#include "oracles.hpp"

using namespace dissipent;

namespace {

// Basis vector with the atoms in (a1, a2) and every field empty.
DenseVector ground_ket(const CompositeSpace& space, int a1, int a2) {
  std::vector<int> idx(space.num_subsystems(), 0);
  idx[0] = a1;
  idx[1] = a2;
  DenseVector v = DenseVector::Zero(space.dim());
  v[*space.index_of(idx)] = 1.0;
  return v;
}

DenseMatrix dense_liouvillian(const LindbladGenerator& gen) {
  return DenseMatrix(liouvillian_matrix(gen));
}

}  // namespace

TEST_SUITE("model") {
  TEST_CASE("reference parameters and cooperativity") {
    const auto p = PhysicalParams::reference();
    CHECK(cooperativity(p) == doctest::Approx(150.18).epsilon(1e-3));
    PhysicalParams q = p;
    q.kappa *= 2;
    q.gamma0 *= 2;
    q.gamma1 *= 2;
    CHECK(cooperativity(q) == doctest::Approx(cooperativity(p) / 4).epsilon(1e-12));
    const auto c = with_cooperativity(p, 150.0);
    CHECK(c.kappa == doctest::Approx(1.0 / std::sqrt(300.0)).epsilon(1e-12));
    CHECK(c.gamma() == doctest::Approx(2 * c.kappa).epsilon(1e-12));
    CHECK(cooperativity(c) == doctest::Approx(150.0).epsilon(1e-12));
    PhysicalParams z = p;
    z.kappa = 0.0;
    CHECK_THROWS_AS(cooperativity(z), ParameterError);
  }

  TEST_CASE("validation names the offending field") {
    PhysicalParams p = PhysicalParams::reference();
    p.kappa = -1.0;
    try {
      p.validate();
      FAIL("expected ParameterError");
    } catch (const ParameterError& e) {
      CHECK(e.key() == "kappa");
      CHECK(std::string(e.what()).find("kappa") != std::string::npos);
    }
    p = PhysicalParams::reference();
    p.mediating_detunings.clear();
    CHECK_THROWS_AS(p.validate(), ParameterError);
  }

  TEST_CASE("weak-loss regime warnings") {
    PhysicalParams p = PhysicalParams::reference();
    p.kappa = 0.01;
    p.gamma0 = p.gamma1 = 0.005;
    CHECK(p.regime_warnings().empty());
    p.kappa = 0.2;
    CHECK(p.regime_warnings().size() == 1);
  }

  TEST_CASE("mediating layouts") {
    CHECK(mediating_layout(1, 0.3) == std::vector<double>{0.0});
    CHECK(mediating_layout(2, -0.3) == std::vector<double>{0.0, -0.3});
    const auto five = mediating_layout(5, 0.2);
    REQUIRE(five.size() == 5);
    CHECK(five[0] == doctest::Approx(-0.4));
    CHECK(five[2] == 0.0);
    CHECK(five[4] == doctest::Approx(0.4));
    CHECK_THROWS_AS(mediating_layout(4, 0.1), ParameterError);
  }

  TEST_CASE("Hamiltonian parts") {
    const auto p = PhysicalParams::reference();
    const auto space = build_model_space(1, {2, 2});
    const auto layout = ModeLayout::standard(1);
    const auto h = build_hamiltonian_parts(p, space, layout);
    CHECK(h.h0.hermiticity_error() <= 1e-12);
    CHECK(h.hg.hermiticity_error() <= 1e-12);
    CHECK(max_abs_diff(h.v_minus, h.v_plus.adjoint()) == 0.0);

    // <00; 1_b|H0|00; 1_a1> = nu
    std::vector<int> src(space.num_subsystems(), 0), dst(space.num_subsystems(), 0);
    src[layout.cavity1] = 1;
    dst[layout.mediating[0]] = 1;
    CHECK(std::abs(h.h0.coeff(*space.index_of(dst), *space.index_of(src)) - 0.4528) < 1e-15);

    PhysicalParams dark = p;
    dark.omega = 0.0;
    CHECK(build_hamiltonian_parts(dark, space, layout).v_plus.is_zero());
  }

  TEST_CASE("microwave block at theta_M = pi couples |00> only to |S>") {
    const auto p = PhysicalParams::reference(std::numbers::pi);
    const auto space = build_model_space(1, {1, 1});
    const auto layout = ModeLayout::standard(1);
    const DenseMatrix hg = build_hamiltonian_parts(p, space, layout).hg.to_dense();
    const DenseVector k00 = ground_ket(space, 0, 0);
    const DenseVector s = (ground_ket(space, 1, 0) - ground_ket(space, 0, 1)) / std::sqrt(2.0);
    const DenseVector t = (ground_ket(space, 1, 0) + ground_ket(space, 0, 1)) / std::sqrt(2.0);
    CHECK(std::abs(t.dot(hg * k00)) < 1e-15);
    CHECK(std::abs(s.dot(hg * k00) - p.omega_m / std::sqrt(2.0)) < 1e-15);
  }

  TEST_CASE("collapse set") {
    const auto p = PhysicalParams::reference();
    const auto space = build_model_space(1, {1, 1});
    const auto layout = ModeLayout::standard(1);
    const auto ops = build_collapse_ops(p, space, layout);
    REQUIRE(ops.size() == 7);
    CHECK(ops[0].label == "kappa_a1");
    CHECK(ops[2].label == "kappa_b1");
    CHECK(ops[6].label == "gamma4");
    PhysicalParams q = p;
    q.kappa = 0.0;
    const auto none = build_collapse_ops(q, space, layout);
    for (int k = 0; k < 3; ++k) CHECK(none[k].op.is_zero());
    CHECK_FALSE(none[3].op.is_zero());
  }

  TEST_CASE("field dissipator is invariant under the delocalizing rotation") {
    const auto space = build_model_space(1, {1, 1});
    const auto layout = ModeLayout::standard(1);
    for (double kappa : {0.01, 0.0577, 0.3, 1.0}) {
      PhysicalParams p = PhysicalParams::reference();
      p.kappa = kappa;
      const auto parts = build_hamiltonian_parts(p, space, layout);
      const auto lab = build_collapse_ops(p, space, layout);
      const auto deloc = delocalize_field_channels(lab);
      const LindbladGenerator a{parts.total(), operators_of(lab)};
      const LindbladGenerator b{parts.total(), operators_of(deloc)};
      CHECK((dense_liouvillian(a) - dense_liouvillian(b)).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK(deloc[0].label == "kappa_c1");
    }
  }

  TEST_CASE("delocalized rewrite of H0") {
    const auto p = PhysicalParams::reference();
    const auto layout = ModeLayout::standard(1);
    for (int cap : {1, 2}) {
      const auto space = build_model_space(1, {cap, 2});
      const auto modes = delocalized_transform(p, space, layout);
      const auto lab = build_hamiltonian_parts(p, space, layout).h0;
      CHECK(max_abs_diff(modes.h0, lab) <= 1e-12);
      CHECK(modes.frequencies[0] == doctest::Approx(0.2875));
      CHECK(modes.frequencies[1] == doctest::Approx(0.2875 + std::sqrt(2.0) * 0.4528).epsilon(1e-12));
      CHECK(modes.frequencies[2] == doctest::Approx(0.2875 - std::sqrt(2.0) * 0.4528).epsilon(1e-12));
    }
    PhysicalParams flat = p;
    flat.nu = 0.0;
    const auto space = build_model_space(1, {1, 1});
    const auto modes = delocalized_transform(flat, space, layout);
    CHECK(modes.frequencies[1] == doctest::Approx(flat.delta));
    CHECK(modes.frequencies[2] == doctest::Approx(flat.delta));

    PhysicalParams two = p;
    two.mediating_detunings = {0.0, 0.5};
    CHECK_THROWS_AS(delocalized_transform(two, build_model_space(2, {1, 1}), ModeLayout::standard(2)),
                    ParameterError);
    PhysicalParams detuned = p;
    detuned.mediating_detunings = {0.1};
    CHECK_THROWS_AS(delocalized_transform(detuned, space, layout), ParameterError);
  }

  TEST_CASE("delocalized canonical commutators on an uncapped three-photon space") {
    const auto p = PhysicalParams::reference();
    const auto space = CompositeSpace::build(
        {SubsystemSpec::atom3(), SubsystemSpec::atom3(), SubsystemSpec::mode(3), SubsystemSpec::mode(3),
         SubsystemSpec::mode(3)},
        3);
    const auto modes = delocalized_transform(p, space, ModeLayout::standard(1));
    // On states with at most one photon the truncation does not bite.
    std::vector<int> vac(5, 0);
    const int v = *space.index_of(vac);
    const DenseMatrix c1 = modes.c1.to_dense(), c2 = modes.c2.to_dense(), c3 = modes.c3.to_dense();
    for (const auto* c : {&c1, &c2, &c3}) {
      const DenseMatrix comm = (*c) * c->adjoint() - c->adjoint() * (*c);
      CHECK(std::abs(comm(v, v) - 1.0) < 1e-12);
    }
    const DenseMatrix mixed = c2 * c3.adjoint() - c3.adjoint() * c2;
    CHECK(mixed.col(v).cwiseAbs().maxCoeff() < 1e-12);
  }

  TEST_CASE("delocalized spectrum") {
    PhysicalParams p = PhysicalParams::reference();
    const auto f1 = delocalized_frequencies(p);
    REQUIRE(f1.size() == 3);
    CHECK(f1[0] == doctest::Approx(p.delta - std::sqrt(2.0) * p.nu).epsilon(1e-12));
    CHECK(f1[1] == doctest::Approx(p.delta).epsilon(1e-12));
    CHECK(f1[2] == doctest::Approx(p.delta + std::sqrt(2.0) * p.nu).epsilon(1e-12));
    CHECK(f1[2] == doctest::Approx(0.9279).epsilon(1e-4));
    CHECK(f1[0] == doctest::Approx(-0.3529).epsilon(1e-3));

    p.nu = 0.0;
    p.mediating_detunings = {0.0, 0.3};
    const auto flat = delocalized_frequencies(p);
    const std::vector<double> expected{p.delta, p.delta, p.delta, p.delta + 0.3};
    for (std::size_t i = 0; i < 4; ++i) CHECK(flat[i] == doctest::Approx(expected[i]).epsilon(1e-12));

    // N = 2 against a dense eigensolver, trace identity, and the far-detuned limit.
    p = PhysicalParams::reference();
    double prev_top = -1e9;
    for (double dx : {-1.0, -0.64, -0.2, 0.0, 0.2, 0.64, 1.0, 50.0}) {
      p.mediating_detunings = {0.0, dx};
      Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
      m(0, 0) = m(1, 1) = p.delta;
      m(2, 2) = p.delta;
      m(3, 3) = p.delta + dx;
      for (int c = 0; c < 2; ++c) {
        for (int b = 2; b < 4; ++b) m(c, b) = m(b, c) = p.nu;
      }
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix4d> es(m);
      const auto f = delocalized_frequencies(p);
      double sum = 0.0;
      for (int i = 0; i < 4; ++i) {
        CHECK(f[i] == doctest::Approx(es.eigenvalues()[i]).epsilon(1e-10));
        sum += f[i];
      }
      CHECK(std::abs(sum - (4 * p.delta + dx)) <= 1e-10);
      CHECK(f[3] >= prev_top - 1e-12);
      prev_top = f[3];
      if (dx == 50.0) {
        CHECK(f[0] == doctest::Approx(f1[0]).epsilon(1e-2));
        CHECK(f[1] == doctest::Approx(f1[1]).epsilon(1e-2));
        CHECK(f[2] == doctest::Approx(f1[2]).epsilon(1e-2));
        CHECK(f[3] == doctest::Approx(p.delta + dx).epsilon(1e-3));
      }
    }
  }
}
