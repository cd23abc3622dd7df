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

#include "cli/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dissipent/errors.hpp"

namespace dissipent::cli {

DenseVector manifold_amplitudes(InitialKind kind, std::uint64_t seed) {
  if (kind == InitialKind::Random) return haar_random_state(4, seed);
  DenseVector v = DenseVector::Zero(4);
  v[kP00] = 1.0;
  return v;
}

DensityMatrix initial_density(InitialKind kind, std::uint64_t seed, const CompositeSpace& space,
                              const ModeLayout& layout) {
  const GroundManifold manifold(space, layout);
  const DenseVector psi = manifold.basis() * manifold_amplitudes(kind, seed);
  return DensityMatrix::pure(psi);
}

EvolveOptions evolve_options(const IntegratorConfig& cfg) {
  EvolveOptions o;
  o.dt = cfg.dt;
  o.method = cfg.method;
  o.record_stride = cfg.record_stride;
  o.rtol = cfg.rtol;
  o.atol = cfg.atol;
  return o;
}

namespace {

AtomicPopulations final_populations(const LindbladGenerator& gen, const DensityMatrix& rho0,
                                    const PopulationProbe& probe, const IntegratorConfig& integrator) {
  EvolveOptions o = evolve_options(integrator);
  o.record_stride = std::max(o.record_stride, 1 << 30);
  const Trajectory traj = evolve(gen, rho0, integrator.t_final, o, probe);
  traj.final_state.check(true);
  return traj.records.back().pops;
}

}  // namespace

CellValue evaluate_point(const PhysicalParams& p, const CellSpec& spec) {
  CellValue out;
  switch (spec.evaluator) {
    case Objective::Analytic: {
      const AnalyticRates rates = analytic_rates(p);
      out.fidelity_s = 1.0 - estimate_infidelity(rates, Target::Singlet).infidelity;
      out.fidelity_t = 1.0 - estimate_infidelity(rates, Target::Triplet).infidelity;
      out.method = "analytic";
      return out;
    }
    case Objective::EffectiveModel: {
      const LindbladGenerator gen = build_effective_generator(p);
      const PopulationProbe probe = PopulationProbe::ground_manifold();
      AtomicPopulations pops;
      if (spec.at_time) {
        const DenseVector psi = manifold_amplitudes(spec.initial_state, spec.seed);
        pops = final_populations(gen, DensityMatrix::pure(psi), probe, spec.integrator);
        out.method = "effective_evolve";
      } else {
        pops = probe(steady_state(gen).rho.matrix());
        out.method = "effective_steady";
      }
      out.fidelity_s = pops.ps;
      out.fidelity_t = pops.pt;
      return out;
    }
    case Objective::Full: {
      const CompositeSpace space = build_model_space(p.n_mediating(), spec.truncation);
      const ModeLayout layout = ModeLayout::standard(p.n_mediating());
      const LindbladGenerator gen = full_generator(p, space, layout);
      const PopulationProbe probe(space, layout);
      AtomicPopulations pops;
      if (spec.at_time) {
        pops = final_populations(gen, initial_density(spec.initial_state, spec.seed, space, layout),
                                 probe, spec.integrator);
        out.method = "full_evolve";
      } else {
        const auto ss = steady_state(gen);
        pops = probe(ss.rho.matrix());
        out.method = "full_" + to_string(ss.method);
      }
      out.fidelity_s = pops.ps;
      out.fidelity_t = pops.pt;
      return out;
    }
  }
  return out;
}

SweepTable run_sweep(const PhysicalParams& base, const std::vector<SweepAxis>& axes,
                     const CellSpec& spec, int jobs) {
  return sweep_grid(
      axes,
      [&](std::span<const double> coords) {
        PhysicalParams p = base;
        for (std::size_t i = 0; i < axes.size(); ++i) p = apply_coordinate(p, base, axes[i].name, coords[i]);
        return evaluate_point(p, spec);
      },
      jobs);
}

// --- population dynamics ------------------------------------------------------

DynamicsResult run_population_dynamics(const DynamicsOptions& o) {
  const PhysicalParams p = PhysicalParams::reference(o.theta_m);
  const CompositeSpace space = build_model_space(1, o.truncation);
  const ModeLayout layout = ModeLayout::standard(1);
  const EvolveOptions eo = evolve_options(o.integrator);

  DynamicsResult out;
  const LindbladGenerator full = full_generator(p, space, layout);
  out.full = evolve(full, initial_density(o.initial_state, o.seed, space, layout), o.integrator.t_final,
                    eo, PopulationProbe(space, layout));
  out.full.final_state.check(true);

  EffectiveOptions eff;
  eff.stark_shifts = o.stark_shifts;
  const LindbladGenerator reduced = build_effective_generator(p, eff);
  const DenseVector psi = manifold_amplitudes(o.initial_state, o.seed);
  out.effective = evolve(reduced, DensityMatrix::pure(psi), o.integrator.t_final, eo,
                         PopulationProbe::ground_manifold());
  out.effective.final_state.check(true);

  if (out.full.records.size() != out.effective.records.size()) {
    throw NumericalError("full and effective trajectories are not aligned");
  }
  for (std::size_t i = 0; i < out.full.records.size(); ++i) {
    const auto& a = out.full.records[i].pops;
    const auto& b = out.effective.records[i].pops;
    const double d = std::max({std::abs(a.p00 - b.p00), std::abs(a.ps - b.ps), std::abs(a.pt - b.pt),
                               std::abs(a.p11 - b.p11)});
    if (d > out.max_deviation) {
      out.max_deviation = d;
      out.deviation_time = out.full.records[i].t;
    }
  }
  return out;
}

// --- cooperativity scaling --------------------------------------------------

ScalingResult run_scaling(const PhysicalParams& base, const FitConfig& fit, const Truncation& truncation,
                          std::uint64_t seed, int jobs) {
  if (base.n_mediating() != 1) {
    throw ParameterError("cooperativity scaling is defined for a single mediating mode", "n_mediating");
  }
  ScalingResult out;
  const auto& cs = fit.cooperativities;
  if (cs.size() < 2) throw ParameterError("need at least two cooperativities", "cooperativities");

  // Confirmation points: evenly spread over the sorted list, always including both ends.
  std::vector<double> sorted = cs;
  std::sort(sorted.begin(), sorted.end());
  const int confirm = std::min<int>(fit.confirm, static_cast<int>(sorted.size()));
  for (int k = 0; k < confirm; ++k) {
    const std::size_t idx =
        confirm == 1 ? sorted.size() / 2
                     : static_cast<std::size_t>(std::lround(static_cast<double>(k) *
                                                            static_cast<double>(sorted.size() - 1) /
                                                            static_cast<double>(confirm - 1)));
    if (std::find(out.confirmed.begin(), out.confirmed.end(), sorted[idx]) == out.confirmed.end()) {
      out.confirmed.push_back(sorted[idx]);
    }
  }

  for (Target target : fit.targets) {
    // triplet runs use theta_m = pi
    PhysicalParams start = base;
    start.theta_m = target == Target::Singlet ? 0.0 : std::numbers::pi;
    std::vector<std::pair<double, double>> pts;
    for (double c : cs) {
      OptimizeOptions opt;
      opt.free = fit.free;
      opt.target = target;
      opt.objective = fit.objective;
      opt.seed = seed;
      opt.restarts = fit.restarts;
      opt.truncation = truncation;
      const OptimizeResult best = optimize_fidelity(with_cooperativity(start, c), opt);
      ScalingPoint sp;
      sp.cooperativity = c;
      sp.target = target;
      sp.params = best.params;
      sp.infidelity = 1.0 - best.fidelity;
      out.points.push_back(sp);
      pts.emplace_back(c, sp.infidelity);
    }
    out.fits.emplace_back(target, fit_inverse_c(pts));
  }

  // Full solves at the confirmation points, in parallel.
  std::vector<std::size_t> todo;
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    if (std::find(out.confirmed.begin(), out.confirmed.end(), out.points[i].cooperativity) !=
        out.confirmed.end()) {
      todo.push_back(i);
    }
  }
  if (!todo.empty()) {
    std::vector<double> index(todo.size());
    for (std::size_t i = 0; i < todo.size(); ++i) index[i] = static_cast<double>(i);
    CellSpec spec;
    spec.evaluator = Objective::Full;
    spec.truncation = truncation;
    const SweepTable table = sweep_grid(
        {SweepAxis{"point", index}},
        [&](std::span<const double> coords) {
          return evaluate_point(out.points[todo[static_cast<std::size_t>(coords[0])]].params, spec);
        },
        jobs);
    for (std::size_t i = 0; i < todo.size(); ++i) {
      const auto& cell = table.cells[i];
      if (!cell.ok()) throw NumericalError("confirmation solve failed: " + cell.error);
      auto& pt = out.points[todo[i]];
      pt.full_infidelity = 1.0 - (pt.target == Target::Singlet ? cell.fidelity_s : cell.fidelity_t);
    }
  }
  for (Target target : fit.targets) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& pt : out.points) {
      if (pt.target == target && pt.full_infidelity) pts.emplace_back(pt.cooperativity, *pt.full_infidelity);
    }
    if (pts.size() >= 2) out.full_fits.emplace_back(target, fit_inverse_c(pts));
  }
  return out;
}

// --- mediator spacing ---------------------------------------------------------

Truncation spacing_truncation(int n_mediating) {
  return n_mediating >= 5 ? Truncation{1, 1} : Truncation{2, 2};
}

SpacingResult run_spacing(int n_mediating, const Truncation& truncation, int jobs, int points) {
  if (points < 5) throw ParameterError("spacing sweep needs at least 5 points", "points");
  SpacingResult out;
  out.n_mediating = n_mediating;
  out.truncation = truncation;

  PhysicalParams base = PhysicalParams::reference(0.0);
  base.mediating_detunings = mediating_layout(n_mediating, 0.0);

  SweepAxis axis{"delta_x", {}};
  for (int i = 0; i < points; ++i) axis.values.push_back(-1.0 + 2.0 * i / (points - 1));

  CellSpec spec;
  spec.evaluator = Objective::Full;
  spec.truncation = truncation;
  out.table = run_sweep(base, {axis}, spec, jobs);
  out.reference_fs = evaluate_point(PhysicalParams::reference(0.0), spec).fidelity_s;

  std::vector<std::pair<double, double>> curve;
  for (const auto& c : out.table.cells) {
    if (!c.ok()) throw NumericalError("spacing sweep cell failed: " + c.error);
    curve.emplace_back(c.coords[0], c.fidelity_s);
  }
  out.dips = find_dips(curve);
  return out;
}

}  // namespace dissipent::cli
