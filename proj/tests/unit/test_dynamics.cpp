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

#include <cmath>
#include <sstream>

#include "dissipent/dynamics.hpp"
#include "dissipent/effective.hpp"
#include "dissipent/errors.hpp"
#include "dissipent/model.hpp"
#include "oracles.hpp"

using namespace dissipent;

namespace {

// Two levels {0, 1} embedded in the four-dim manifold so PopulationProbe::ground_manifold
// can be used as the probe (P00 = level 0, PS = level 1).
LindbladGenerator damping4(double kappa) {
  LindbladGenerator g;
  g.hamiltonian = SparseOp(4);
  g.collapse.push_back(SparseOp::from_dense(std::sqrt(kappa) * oracle::ket_bra(4, 0, 1)));
  return g;
}

LindbladGenerator rabi4(double omega) {
  LindbladGenerator g;
  g.hamiltonian = SparseOp::from_dense(0.5 * omega * (oracle::ket_bra(4, 0, 1) + oracle::ket_bra(4, 1, 0)));
  return g;
}

DensityMatrix level(int dim, int k) {
  DenseVector v = DenseVector::Zero(dim);
  v[k] = 1.0;
  return DensityMatrix::pure(v);
}

DenseMatrix vec_apply(const SparseMatrix& liou, const DenseMatrix& rho) {
  const Eigen::Index n = rho.rows();
  const DenseVector v = Eigen::Map<const DenseVector>(rho.data(), n * n);
  const DenseVector out = liou * v;
  return Eigen::Map<const DenseMatrix>(out.data(), n, n);
}

struct Model1 {
  PhysicalParams p;
  CompositeSpace space;
  ModeLayout layout;
  LindbladGenerator gen;
};

Model1 reference_model(const Truncation& t, double theta = 0.0) {
  const PhysicalParams p = PhysicalParams::reference(theta);
  auto space = build_model_space(1, t);
  const auto layout = ModeLayout::standard(1);
  auto gen = full_generator(p, space, layout);
  return {p, std::move(space), layout, std::move(gen)};
}

double final_population(const LindbladGenerator& g, const DensityMatrix& rho0, double t, int which) {
  EvolveOptions o;
  o.dt = 1e-3;
  o.record_stride = 1'000'000;
  const auto traj = evolve(g, rho0, t, o, PopulationProbe::ground_manifold());
  return std::real(traj.final_state.matrix()(which, which));
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("amplitude-damping superoperator") {
    LindbladGenerator g;
    const double kappa = 0.3;
    g.hamiltonian = SparseOp(2);
    g.collapse.push_back(SparseOp::from_dense(std::sqrt(kappa) * oracle::ket_bra(2, 0, 1)));
    const DenseMatrix out = vec_apply(liouvillian_matrix(g), oracle::ket_bra(2, 1, 1));
    const DenseMatrix expected = kappa * (oracle::ket_bra(2, 0, 0) - oracle::ket_bra(2, 1, 1));
    CHECK((out - expected).cwiseAbs().maxCoeff() < 1e-15);
  }

  TEST_CASE("zero generator gives a zero superoperator") {
    LindbladGenerator g;
    g.hamiltonian = SparseOp(3);
    g.collapse.push_back(SparseOp(3));
    CHECK(liouvillian_matrix(g).norm() == 0.0);
  }

  TEST_CASE("superoperator, matrix-free and kernel paths match the direct formula") {
    const DenseMatrix a = oracle::random_matrix(3, 11);
    const DenseMatrix h = a + a.adjoint();
    const std::vector<DenseMatrix> ls{oracle::random_matrix(3, 12), oracle::random_matrix(3, 13)};
    LindbladGenerator g;
    g.hamiltonian = SparseOp::from_dense(h);
    for (const auto& l : ls) g.collapse.push_back(SparseOp::from_dense(l));
    const SparseMatrix liou = liouvillian_matrix(g);
    const GeneratorKernel kernel(g);
    for (std::uint64_t seed = 100; seed < 120; ++seed) {
      const DenseMatrix rho = oracle::random_matrix(3, seed);
      const DenseMatrix direct = oracle::lindblad_rhs(h, ls, rho);
      CHECK((vec_apply(liou, rho) - direct).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((apply_generator(g, rho) - direct).cwiseAbs().maxCoeff() < 1e-12);
      const DenseMatrix herm = oracle::random_density(3, seed);
      DenseMatrix k;
      kernel.apply(herm, k);
      CHECK((k - oracle::lindblad_rhs(h, ls, herm)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }

  TEST_CASE("model generator: superoperator equals matrix-free application") {
    const auto m = reference_model({1, 1});
    const SparseMatrix liou = liouvillian_matrix(m.gen);
    const GeneratorKernel kernel(m.gen);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const DenseMatrix rho = oracle::random_density(m.gen.dim(), seed);
      const DenseMatrix ref = apply_generator(m.gen, rho);
      CHECK((vec_apply(liou, rho) - ref).cwiseAbs().maxCoeff() < 1e-12);
      DenseMatrix k;
      kernel.apply(rho, k);
      CHECK((k - ref).cwiseAbs().maxCoeff() < 1e-12);
    }
    CHECK_THROWS_AS(liouvillian_matrix(m.gen, 100), ParameterError);
  }

  TEST_CASE("amplitude damping decays exponentially") {
    const double kappa = 0.7;
    const auto g = damping4(kappa);
    for (double kt : {0.5, 1.0, 2.0}) {
      CHECK(std::abs(final_population(g, level(4, 1), kt / kappa, 1) - std::exp(-kt)) < 1e-6);
    }
  }

  TEST_CASE("resonant drive gives Rabi oscillations") {
    const double omega = 0.9;
    const auto g = rabi4(omega);
    for (double t : {0.4, 1.3, 2.9, 5.0}) {
      const double expected = std::pow(std::sin(omega * t / 2), 2);
      CHECK(std::abs(final_population(g, level(4, 0), t, 1) - expected) < 1e-6);
    }
  }

  TEST_CASE("adaptive and fixed-step integrators agree") {
    const auto m = reference_model({1, 1});
    const PopulationProbe probe(m.space, m.layout);
    const GroundManifold gm(m.space, m.layout);
    const DensityMatrix rho0(gm.lift(oracle::random_density(4, 5)));
    EvolveOptions rk;
    rk.record_stride = 100;
    EvolveOptions ad = rk;
    ad.method = IntegratorMethod::Adaptive;
    const auto a = evolve(m.gen, rho0, 50.0, rk, probe);
    const auto b = evolve(m.gen, rho0, 50.0, ad, probe);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t k = 0; k < a.records.size(); ++k) {
      CHECK(a.records[k].t == doctest::Approx(b.records[k].t).epsilon(1e-12));
      CHECK(std::abs(a.records[k].pops.ps - b.records[k].pops.ps) < 1e-7);
      CHECK(std::abs(a.records[k].pops.p00 - b.records[k].pops.p00) < 1e-7);
    }
    CHECK(trace_distance(a.final_state.matrix(), b.final_state.matrix()) < 1e-7);
  }

  TEST_CASE("trajectory invariants on both integrators") {
    const auto m = reference_model({1, 1});
    const PopulationProbe probe(m.space, m.layout);
    const GroundManifold gm(m.space, m.layout);
    const DensityMatrix rho0(gm.lift(oracle::random_density(4, 9)));
    for (auto method : {IntegratorMethod::Rk4, IntegratorMethod::Adaptive}) {
      EvolveOptions o;
      o.method = method;
      o.record_stride = 250;
      o.track_positivity = true;
      const auto traj = evolve(m.gen, rho0, 200.0, o, probe);
      for (std::size_t k = 0; k < traj.records.size(); ++k) {
        const auto& r = traj.records[k];
        if (k > 0) CHECK(r.t > traj.records[k - 1].t);
        CHECK(r.trace_error <= 1e-8);
        CHECK(r.min_eigenvalue >= -1e-8);
        for (double v : {r.pops.p00, r.pops.ps, r.pops.pt, r.pops.p11}) {
          CHECK(v >= -1e-8);
          CHECK(v <= 1 + 1e-8);
        }
      }
      CHECK(traj.final_state.hermiticity_error() == 0.0);
      CHECK_NOTHROW(traj.final_state.check(true));
    }
  }

  TEST_CASE("unstable step size aborts on trace drift") {
    const auto g = damping4(1000.0);
    EvolveOptions o;
    o.dt = 0.02;
    o.record_stride = 1;
    CHECK_THROWS_AS(evolve(g, level(4, 1), 20.0, o, PopulationProbe::ground_manifold()), NumericalError);
  }

  TEST_CASE("evolve preconditions") {
    const auto g = damping4(1.0);
    const auto probe = PopulationProbe::ground_manifold();
    EvolveOptions o;
    CHECK_THROWS_AS(evolve(g, level(4, 1), 0.0, o, probe), ParameterError);
    CHECK_THROWS_AS(evolve(g, level(3, 1), 1.0, o, probe), ParameterError);
    o.dt = -1.0;
    CHECK_THROWS_AS(evolve(g, level(4, 1), 1.0, o, probe), ParameterError);
  }

  TEST_CASE("trajectory CSV layout") {
    const auto g = damping4(1.0);
    EvolveOptions o;
    o.dt = 0.1;
    o.record_stride = 5;
    const auto traj = evolve(g, level(4, 1), 1.0, o, PopulationProbe::ground_manifold());
    std::ostringstream os;
    traj.write_csv(os);
    std::istringstream in(os.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "t,P00,PS,PT,P11,leak,trace_err");
    int rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 3);
  }

  TEST_CASE("steady state of amplitude damping and degenerate cases") {
    LindbladGenerator two;
    two.hamiltonian = SparseOp(2);
    two.collapse.push_back(SparseOp::from_dense(oracle::ket_bra(2, 0, 1)));
    const auto ss = steady_state(two);
    CHECK(ss.method == SteadyMethod::NullSpace);
    CHECK((ss.rho.matrix() - oracle::ket_bra(2, 0, 0)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(ss.residual <= 1e-8);

    // levels 2 and 3 are untouched, so the stationary set is three-dimensional
    CHECK_THROWS_AS(steady_state(damping4(1.0)), NumericalError);
    CHECK_THROWS_AS(steady_state(rabi4(1.0)), ParameterError);
  }

  TEST_CASE("null-space and long-time steady states agree") {
    const auto m = reference_model({1, 1});
    const auto a = steady_state(m.gen);
    SteadyStateOptions o;
    o.force_long_time = true;
    const auto b = steady_state(m.gen, o);
    CHECK(a.method == SteadyMethod::NullSpace);
    CHECK(b.method == SteadyMethod::LongTime);
    CHECK(a.residual <= 1e-8);
    CHECK(b.residual <= 1e-6);
    CHECK(trace_distance(a.rho.matrix(), b.rho.matrix()) <= 1e-5);
    for (const auto& r : {a.rho, b.rho}) {
      CHECK(r.trace_error() <= 1e-8);
      CHECK(r.min_eigenvalue() >= -1e-8);
      CHECK(r.hermiticity_error() <= 1e-12);
    }
  }

  TEST_CASE("steady state does not depend on the initial state") {
    const auto m = reference_model({1, 1});
    const PopulationProbe probe(m.space, m.layout);
    const GroundManifold gm(m.space, m.layout);
    DenseMatrix ket00 = DenseMatrix::Zero(4, 4);
    ket00(0, 0) = 1.0;
    const DenseVector psi = haar_random_state(4, 7);
    EvolveOptions o;
    o.method = IntegratorMethod::Adaptive;
    o.record_stride = 1'000'000;
    const auto a = evolve(m.gen, DensityMatrix(gm.lift(ket00)), 9000.0, o, probe);
    const auto b = evolve(m.gen, DensityMatrix(gm.lift(psi * psi.adjoint())), 9000.0, o, probe);
    CHECK(trace_distance(a.final_state.matrix(), b.final_state.matrix()) <= 1e-3);
  }

  TEST_CASE("atomic populations of product states") {
    const auto space = build_model_space(1, {2, 2});
    const auto layout = ModeLayout::standard(1);
    std::vector<int> idx(space.num_subsystems(), 0);
    const auto pure = [&](int a1, int a2) {
      idx[0] = a1;
      idx[1] = a2;
      DenseVector v = DenseVector::Zero(space.dim());
      v[*space.index_of(idx)] = 1.0;
      return DenseMatrix(v * v.adjoint());
    };
    const auto p00 = atomic_populations(pure(0, 0), space, layout);
    CHECK(p00.p00 == doctest::Approx(1.0));
    CHECK(p00.ps == 0.0);
    CHECK(p00.pt == 0.0);
    CHECK(p00.p11 == 0.0);
    CHECK(std::abs(p00.leak) < 1e-15);
    const auto p10 = atomic_populations(pure(1, 0), space, layout);
    CHECK(p10.ps == doctest::Approx(0.5));
    CHECK(p10.pt == doctest::Approx(0.5));
    const auto p22 = atomic_populations(pure(2, 2), space, layout);
    CHECK(p22.leak == doctest::Approx(1.0));
  }

  TEST_CASE("atomic populations match a brute-force partial trace") {
    const auto space = build_model_space(1, {2, 2});
    const auto layout = ModeLayout::standard(1);
    const PopulationProbe probe(space, layout);
    const auto atom_of = [&](Eigen::Index i) {
      const auto s = space.state(static_cast<int>(i));
      return 3 * s[0] + s[1];
    };
    const auto field_of = [&](Eigen::Index i) {
      const auto s = space.state(static_cast<int>(i));
      return std::vector<int>(s.begin() + 2, s.end());
    };
    const double r = 1.0 / std::sqrt(2.0);
    DenseVector s_ket = DenseVector::Zero(9), t_ket = DenseVector::Zero(9);
    s_ket[3] = r;
    s_ket[1] = -r;
    t_ket[3] = r;
    t_ket[1] = r;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
      const DenseMatrix rho = oracle::random_density(space.dim(), seed);
      const DenseMatrix red = oracle::partial_trace_atoms(rho, atom_of, field_of);
      const auto pops = probe(rho);
      CHECK(std::abs(pops.p00 - std::real(red(0, 0))) < 1e-14);
      CHECK(std::abs(pops.p11 - std::real(red(4, 4))) < 1e-14);
      CHECK(std::abs(pops.ps - std::real(s_ket.dot(red * s_ket))) < 1e-14);
      CHECK(std::abs(pops.pt - std::real(t_ket.dot(red * t_ket))) < 1e-14);
      CHECK((probe.reduced_atoms(rho) - red).cwiseAbs().maxCoeff() < 1e-14);
    }
  }

  TEST_CASE("Haar states are seeded and normalized") {
    const DenseVector a = haar_random_state(6, 42);
    const DenseVector b = haar_random_state(6, 42);
    const DenseVector c = haar_random_state(6, 43);
    CHECK((a - b).norm() == 0.0);
    CHECK((a - c).norm() > 1e-3);
    CHECK(a.norm() == doctest::Approx(1.0).epsilon(1e-14));
  }

  TEST_CASE("density matrix invariant checks") {
    DenseMatrix m = oracle::ket_bra(2, 0, 0);
    CHECK_NOTHROW(DensityMatrix(m).check(true));
    m(0, 1) = 0.1;
    CHECK_THROWS_AS(DensityMatrix(m).check(), InvariantViolation);
    CHECK_THROWS_AS(DensityMatrix(2.0 * oracle::ket_bra(2, 0, 0)).check(), InvariantViolation);
    DenseMatrix neg = DenseMatrix::Zero(2, 2);
    neg(0, 0) = 1.1;
    neg(1, 1) = -0.1;
    CHECK_NOTHROW(DensityMatrix(neg).check(false));
    CHECK_THROWS_AS(DensityMatrix(neg).check(true), InvariantViolation);
    CHECK(trace_distance(oracle::ket_bra(2, 0, 0), oracle::ket_bra(2, 1, 1)) == doctest::Approx(1.0));
  }
}
