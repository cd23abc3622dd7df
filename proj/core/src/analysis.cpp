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

#include "dissipent/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dissipent/dynamics.hpp"
#include "dissipent/errors.hpp"

namespace dissipent {

namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

std::string to_string(Target t) { return t == Target::Singlet ? "S" : "T"; }

Target parse_target(const std::string& s) {
  if (s == "S" || s == "s" || s == "singlet") return Target::Singlet;
  if (s == "T" || s == "t" || s == "triplet") return Target::Triplet;
  throw ParameterError("unknown target '" + s + "' (expected S or T)", "target");
}

// --- closed-form estimate ---------------------------------------------------

FidelityEstimate estimate_infidelity(const AnalyticRates& r, Target target) {
  double leak = 0.0;
  double pump = 0.0;
  if (target == Target::Singlet) {
    leak = 3.0 * r.kappa_c1_2 + 3.0 * (r.gamma_s_12 + r.gamma_s_34);
    pump = r.kappa_c1_1;
  } else {
    leak = 3.0 * (r.kappa_c2_2 + r.kappa_c3_2) + 3.0 * (r.gamma_t_12 + r.gamma_t_34);
    pump = r.kappa_c2_1 + r.kappa_c3_1;
  }
  if (!(pump > 0.0)) {
    throw NumericalError("pump rate into the target state vanishes");
  }
  FidelityEstimate out;
  out.target = target;
  out.infidelity = clamp01(leak / pump);
  out.p00_share = out.infidelity / 3.0;
  return out;
}

FidelityEstimate estimate_infidelity(const PhysicalParams& p, Target target, BVariant variant) {
  return estimate_infidelity(analytic_rates(p, variant), target);
}

double target_fidelity(const AtomicPopulations& pops, Target target) {
  return target == Target::Singlet ? pops.ps : pops.pt;
}

// --- fit --------------------------------------------------------------------

FitResult fit_inverse_c(std::span<const std::pair<double, double>> points) {
  if (points.size() < 2) throw ParameterError("fit needs at least two points", "points");
  double sxy = 0.0;
  double sxx = 0.0;
  for (const auto& [c, inf] : points) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw ParameterError("cooperativity values must be positive", "cooperativity");
    }
    if (!std::isfinite(inf)) throw ParameterError("infidelity values must be finite", "infidelity");
    const double x = 1.0 / c;
    sxy += x * inf;
    sxx += x * x;
  }
  FitResult fit;
  fit.slope = sxy / sxx;
  double ss = 0.0;
  for (const auto& [c, inf] : points) {
    const double res = inf - fit.slope / c;
    ss += res * res;
  }
  fit.residual_rms = std::sqrt(ss / static_cast<double>(points.size()));
  fit.points_used = static_cast<int>(points.size());
  return fit;
}

std::string to_json(const FitResult& fit) {
  nlohmann::ordered_json j;
  j["slope"] = fit.slope;
  j["residual_rms"] = fit.residual_rms;
  j["points_used"] = fit.points_used;
  return j.dump(2);
}

// --- optimization -----------------------------------------------------------

std::string to_string(Objective o) {
  switch (o) {
    case Objective::Analytic:
      return "analytic";
    case Objective::EffectiveModel:
      return "effective_model";
    case Objective::Full:
      return "full";
  }
  return "analytic";
}

Objective parse_objective(const std::string& s) {
  if (s == "analytic") return Objective::Analytic;
  if (s == "effective_model" || s == "effective") return Objective::EffectiveModel;
  if (s == "full") return Objective::Full;
  throw ParameterError("unknown objective '" + s + "'", "objective");
}

double& param_ref(PhysicalParams& p, const std::string& name) {
  if (name == "delta") return p.delta;
  if (name == "nu") return p.nu;
  if (name == "delta_cap") return p.delta_cap;
  if (name == "omega") return p.omega;
  if (name == "omega_m") return p.omega_m;
  throw ParameterError("parameter '" + name + "' cannot be optimized", name);
}

double objective_fidelity(const PhysicalParams& p, Target target, Objective objective,
                          const Truncation& truncation) {
  switch (objective) {
    case Objective::Analytic:
      return 1.0 - estimate_infidelity(p, target).infidelity;
    case Objective::EffectiveModel: {
      const auto ss = steady_state(build_effective_generator(p));
      return target_fidelity(PopulationProbe::ground_manifold()(ss.rho.matrix()), target);
    }
    case Objective::Full: {
      const CompositeSpace space = build_model_space(p.n_mediating(), truncation);
      const ModeLayout layout = ModeLayout::standard(p.n_mediating());
      const auto ss = steady_state(full_generator(p, space, layout));
      return target_fidelity(PopulationProbe(space, layout)(ss.rho.matrix()), target);
    }
  }
  return 0.0;
}

namespace {

class NelderMead {
 public:
  using Fn = std::function<double(const std::vector<double>&)>;

  NelderMead(Fn f, int max_evals, double xtol) : f_(std::move(f)), max_evals_(max_evals), xtol_(xtol) {}

  // Minimizes from `start` with an axis-aligned initial simplex of edge `step`.
  std::pair<std::vector<double>, double> run(const std::vector<double>& start, double step) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> pts(n + 1, start);
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
      pts[i + 1][i] += (start[i] + step <= 1.0) ? step : -step;
    }
    for (std::size_t i = 0; i <= n; ++i) vals[i] = eval(pts[i]);

    std::vector<std::size_t> order(n + 1);
    while (evals_ < max_evals_) {
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
      const std::size_t best = order.front();
      const std::size_t worst = order.back();
      const std::size_t second = order[n - 1];

      double spread = 0.0;
      for (std::size_t i = 0; i <= n; ++i) {
        for (std::size_t d = 0; d < n; ++d) spread = std::max(spread, std::abs(pts[i][d] - pts[best][d]));
      }
      if (spread < xtol_) break;

      std::vector<double> centroid(n, 0.0);
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == worst) continue;
        for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[i][d] / static_cast<double>(n);
      }
      auto along = [&](double t) {
        std::vector<double> x(n);
        for (std::size_t d = 0; d < n; ++d) x[d] = centroid[d] + t * (pts[worst][d] - centroid[d]);
        return x;
      };

      const auto reflected = along(-1.0);
      const double fr = eval(reflected);
      if (fr < vals[best]) {
        const auto expanded = along(-2.0);
        const double fe = eval(expanded);
        if (fe < fr) {
          pts[worst] = expanded;
          vals[worst] = fe;
        } else {
          pts[worst] = reflected;
          vals[worst] = fr;
        }
        continue;
      }
      if (fr < vals[second]) {
        pts[worst] = reflected;
        vals[worst] = fr;
        continue;
      }
      const bool outside = fr < vals[worst];
      const auto contracted = along(outside ? -0.5 : 0.5);
      const double fc = eval(contracted);
      if (fc < (outside ? fr : vals[worst])) {
        pts[worst] = contracted;
        vals[worst] = fc;
        continue;
      }
      for (std::size_t i = 0; i <= n; ++i) {
        if (i == best) continue;
        for (std::size_t d = 0; d < n; ++d) pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
        vals[i] = eval(pts[i]);
      }
    }
    const auto it = std::min_element(vals.begin(), vals.end());
    return {pts[static_cast<std::size_t>(it - vals.begin())], *it};
  }

  int evaluations() const { return evals_; }

 private:
  double eval(const std::vector<double>& x) {
    ++evals_;
    return f_(x);
  }

  Fn f_;
  int max_evals_;
  double xtol_;
  int evals_ = 0;
};

}  // namespace

OptimizeResult optimize_fidelity(const PhysicalParams& base, const OptimizeOptions& options) {
  base.validate();
  OptimizeResult out;
  out.params = base;
  if (options.free.empty()) {
    out.fidelity = objective_fidelity(base, options.target, options.objective, options.truncation);
    out.evaluations = 1;
    return out;
  }
  if (options.restarts < 0) throw ParameterError("restarts must be >= 0", "restarts");

  std::vector<double> start;
  for (const auto& b : options.free) {
    PhysicalParams probe = base;
    const double v = param_ref(probe, b.name);
    if (!(b.lower < b.upper)) throw ParameterError("empty bound interval for " + b.name, b.name);
    if (v < b.lower || v > b.upper) {
      throw ParameterError("starting value of " + b.name + " violates its bounds", b.name);
    }
    start.push_back((v - b.lower) / (b.upper - b.lower));
  }

  auto to_params = [&](const std::vector<double>& u) {
    PhysicalParams p = base;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const auto& b = options.free[i];
      param_ref(p, b.name) = b.lower + u[i] * (b.upper - b.lower);
    }
    return p;
  };
  auto cost = [&](const std::vector<double>& u) {
    for (double v : u) {
      if (v < 0.0 || v > 1.0) return std::numeric_limits<double>::infinity();
    }
    return 1.0 - objective_fidelity(to_params(u), options.target, options.objective,
                                    options.truncation);
  };

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> jitter(-0.05, 0.05);
  std::vector<double> best_u = start;
  double best = cost(start);
  int evals = 1;
  for (int round = 0; round <= options.restarts; ++round) {
    std::vector<double> from = best_u;
    if (round > 0) {
      for (double& v : from) v = std::clamp(v + jitter(rng), 0.0, 1.0);
    }
    NelderMead nm(cost, options.max_evaluations, options.x_tolerance);
    auto [u, val] = nm.run(from, 0.05);
    evals += nm.evaluations();
    if (val < best) {
      best = val;
      best_u = std::move(u);
    }
  }
  out.params = to_params(best_u);
  out.fidelity = 1.0 - best;
  out.evaluations = evals;
  return out;
}

// --- sweeps -----------------------------------------------------------------

SweepTable sweep_grid(const std::vector<SweepAxis>& axes, const CellEvaluator& evaluator,
                      int parallelism) {
  if (axes.empty()) throw ParameterError("sweep needs at least one axis", "axes");
  if (parallelism < 1) throw ParameterError("parallelism must be >= 1", "jobs");
  std::size_t total = 1;
  for (const auto& a : axes) {
    if (a.values.empty()) throw ParameterError("sweep axis '" + a.name + "' is empty", a.name);
    total *= a.values.size();
  }

  SweepTable table;
  table.axes = axes;
  table.cells.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    std::size_t rest = i;
    std::vector<double> coords(axes.size());
    for (std::size_t k = axes.size(); k-- > 0;) {
      coords[k] = axes[k].values[rest % axes[k].values.size()];
      rest /= axes[k].values.size();
    }
    table.cells[i].coords = std::move(coords);
  }

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < total; i = next++) {
      SweepCell& cell = table.cells[i];
      const auto t0 = std::chrono::steady_clock::now();
      try {
        const CellValue v = evaluator(cell.coords);
        cell.fidelity_s = v.fidelity_s;
        cell.fidelity_t = v.fidelity_t;
        cell.method = v.method;
      } catch (const std::exception& e) {
        cell.fidelity_s = std::numeric_limits<double>::quiet_NaN();
        cell.fidelity_t = std::numeric_limits<double>::quiet_NaN();
        cell.method = "error";
        cell.error = e.what();
        if (cell.error.empty()) cell.error = "unknown error";
      }
      cell.seconds =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
  };

  const auto threads = std::min<std::size_t>(static_cast<std::size_t>(parallelism), total);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return table;
}

void SweepTable::write_csv(std::ostream& os, bool timings) const {
  std::ostringstream line;
  line << std::setprecision(12);
  for (const auto& a : axes) line << a.name << ',';
  line << "F_S,F_T,method,seconds\n";
  for (const auto& c : cells) {
    for (double x : c.coords) line << x << ',';
    line << c.fidelity_s << ',' << c.fidelity_t << ',' << c.method << ','
         << (timings ? c.seconds : 0.0) << '\n';
  }
  os << line.str();
}

std::string SweepTable::to_json(bool timings) const {
  nlohmann::ordered_json j;
  j["axes"] = nlohmann::ordered_json::array();
  for (const auto& a : axes) j["axes"].push_back({{"name", a.name}, {"values", a.values}});
  j["cells"] = nlohmann::ordered_json::array();
  for (const auto& c : cells) {
    nlohmann::ordered_json cell;
    cell["coords"] = c.coords;
    cell["F_S"] = c.fidelity_s;
    cell["F_T"] = c.fidelity_t;
    cell["method"] = c.method;
    cell["seconds"] = timings ? c.seconds : 0.0;
    if (!c.ok()) cell["error"] = c.error;
    j["cells"].push_back(std::move(cell));
  }
  return j.dump(2);
}

// --- dips -------------------------------------------------------------------

std::vector<Dip> find_dips(std::span<const std::pair<double, double>> curve, double prominence) {
  const auto n = static_cast<int>(curve.size());
  if (n < 5) throw ParameterError("dip search needs at least 5 points", "curve");
  for (int i = 1; i < n; ++i) {
    if (!(curve[i].first > curve[i - 1].first)) {
      throw ParameterError("curve x values must be strictly increasing", "curve");
    }
  }
  for (const auto& [x, y] : curve) {
    if (!std::isfinite(x) || !std::isfinite(y)) throw ParameterError("curve has non-finite values", "curve");
  }

  std::vector<Dip> out;
  for (int i = 1; i + 1 < n; ++i) {
    const double y = curve[i].second;
    if (!(y < curve[i - 1].second && y <= curve[i + 1].second)) continue;
    // Walk outward until a lower point; the lower of the two peaks bounds the dip.
    double left = y;
    for (int k = i - 1; k >= 0 && curve[k].second >= y; --k) left = std::max(left, curve[k].second);
    double right = y;
    for (int k = i + 1; k < n && curve[k].second >= y; ++k) right = std::max(right, curve[k].second);
    const double prom = std::min(left, right) - y;
    if (prom < prominence) continue;

    const auto [x0, y0] = curve[i - 1];
    const auto [x1, y1] = curve[i];
    const auto [x2, y2] = curve[i + 1];
    Dip d{x1, y1, prom, i};
    const double den = (x0 - x1) * (x0 - x2) * (x1 - x2);
    const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den;
    const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den;
    if (a > 0.0) {
      const double xv = std::clamp(-b / (2.0 * a), x0, x2);
      const double c = y1 - a * x1 * x1 - b * x1;
      d.x = xv;
      d.value = a * xv * xv + b * xv + c;
    }
    out.push_back(d);
  }
  std::sort(out.begin(), out.end(), [](const Dip& l, const Dip& r) { return l.x < r.x; });
  return out;
}

}  // namespace dissipent
