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


#include <benchmark/benchmark.h>

#include "dissipent/analysis.hpp"
#include "dissipent/dynamics.hpp"
#include "dissipent/effective.hpp"
#include "dissipent/model.hpp"

using namespace dissipent;

namespace {

struct Setup {
  CompositeSpace space;
  ModeLayout layout;
  LindbladGenerator gen;
};

Setup working_point(int cap) {
  const PhysicalParams p = PhysicalParams::reference();
  auto space = build_model_space(1, {cap, cap});
  const auto layout = ModeLayout::standard(1);
  auto gen = full_generator(p, space, layout);
  return {std::move(space), layout, std::move(gen)};
}

void BM_KernelApply(benchmark::State& state) {
  const Setup s = working_point(static_cast<int>(state.range(0)));
  const GeneratorKernel kernel(s.gen);
  const DenseVector psi = haar_random_state(s.gen.dim(), 1);
  const DenseMatrix rho = psi * psi.adjoint();
  DenseMatrix out;
  for (auto _ : state) {
    kernel.apply(rho, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["dim"] = s.gen.dim();
}
BENCHMARK(BM_KernelApply)->Arg(1)->Arg(2)->Arg(3);

void BM_MatrixFreeApply(benchmark::State& state) {
  const Setup s = working_point(2);
  const DenseVector psi = haar_random_state(s.gen.dim(), 1);
  const DenseMatrix rho = psi * psi.adjoint();
  for (auto _ : state) benchmark::DoNotOptimize(apply_generator(s.gen, rho).data());
}
BENCHMARK(BM_MatrixFreeApply);

void BM_SteadyNullSpace(benchmark::State& state) {
  const Setup s = working_point(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(steady_state(s.gen).residual);
}
BENCHMARK(BM_SteadyNullSpace)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Evolve(benchmark::State& state) {
  const Setup s = working_point(2);
  const PopulationProbe probe(s.space, s.layout);
  const GroundManifold gm(s.space, s.layout);
  DenseMatrix ket00 = DenseMatrix::Zero(4, 4);
  ket00(0, 0) = 1.0;
  const DensityMatrix rho0(gm.lift(ket00));
  EvolveOptions o;
  o.method = state.range(0) == 0 ? IntegratorMethod::Rk4 : IntegratorMethod::Adaptive;
  for (auto _ : state) benchmark::DoNotOptimize(evolve(s.gen, rho0, 100.0, o, probe).steps);
}
BENCHMARK(BM_Evolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Reduction(benchmark::State& state) {
  const PhysicalParams p = PhysicalParams::reference();
  for (auto _ : state) benchmark::DoNotOptimize(reduce_model(p).h_eff.data());
}
BENCHMARK(BM_Reduction)->Unit(benchmark::kMicrosecond);

void BM_AnalyticOptimizer(benchmark::State& state) {
  const PhysicalParams base = PhysicalParams::reference();
  OptimizeOptions o;
  o.free = {{"delta", 0.05, 1.0}, {"nu", 0.05, 1.0}};
  for (auto _ : state) benchmark::DoNotOptimize(optimize_fidelity(base, o).fidelity);
}
BENCHMARK(BM_AnalyticOptimizer)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
