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

#include "cli/checks.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dissipent::cli {

namespace {

constexpr double kSlack = 1e-12;

Check make(std::string name, bool passed, double value, std::string expected) {
  return Check{std::move(name), passed, value, std::move(expected)};
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

Check range_check(const std::string& name, double value, double lo, double hi) {
  return make(name, value >= lo && value <= hi, value, "[" + fmt(lo) + ", " + fmt(hi) + "]");
}

// Closest dip to `where`; NaN location when there are none.
double nearest_dip(const std::vector<Dip>& dips, double where) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (const auto& d : dips) {
    if (std::isnan(best) || std::abs(d.x - where) < std::abs(best - where)) best = d.x;
  }
  return best;
}

Check dip_check(const std::vector<Dip>& dips, double where, double tol) {
  const double x = nearest_dip(dips, where);
  return make("dip_near_" + fmt(where), !std::isnan(x) && std::abs(x - where) <= tol + kSlack, x,
              fmt(where) + " +/- " + fmt(tol));
}

}  // namespace

bool all_passed(const std::vector<Check>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

nlohmann::ordered_json to_json(const std::vector<Check>& checks) {
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json j;
    j["name"] = c.name;
    j["passed"] = c.passed;
    if (std::isfinite(c.value)) {
      j["value"] = c.value;
    } else {
      j["value"] = nullptr;
    }
    j["expected"] = c.expected;
    list.push_back(std::move(j));
  }
  return {{"all_passed", all_passed(checks)}, {"checks", std::move(list)}};
}

std::vector<Check> dynamics_checks(const DynamicsResult& result, Target target) {
  std::vector<Check> out;
  const auto& last = result.full.records.back();
  const auto& pops = last.pops;
  const double f = target_fidelity(pops, target);
  if (target == Target::Singlet) {
    out.push_back(range_check("final_F_S", f, 0.88, 0.97));
  } else {
    out.push_back(range_check("final_F_T", f, 0.78, 0.93));
  }
  const double others = target == Target::Singlet ? std::max({pops.p00, pops.pt, pops.p11})
                                                  : std::max({pops.p00, pops.ps, pops.p11});
  out.push_back(make("target_population_largest", f > others, f - others, "> 0"));
  double trace_err = 0.0;
  for (const auto& r : result.full.records) trace_err = std::max(trace_err, r.trace_error);
  out.push_back(make("max_trace_error", trace_err <= 1e-8, trace_err, "<= 1e-8"));
  const double min_eig = result.full.final_state.min_eigenvalue();
  out.push_back(make("final_min_eigenvalue", min_eig >= -1e-8, min_eig, ">= -1e-8"));
  return out;
}

Check agreement_check(const DynamicsResult& result) {
  return make("effective_vs_full_max_deviation", result.max_deviation <= 0.05, result.max_deviation,
              "<= 0.05");
}

std::vector<Check> rate_checks(const PhysicalParams& p) {
  const RateSet numeric = numeric_rates(reduce_model(p));
  const AnalyticRates corrected = analytic_rates(p, BVariant::Corrected);
  const AnalyticRates printed = analytic_rates(p, BVariant::Printed);

  const auto num = numeric.entries();
  const auto ana = corrected.entries();
  std::vector<Check> out;
  const std::vector<std::string> compared{"kappa_c1_1", "kappa_c1_2", "kappa_c2_1", "kappa_c2_2",
                                          "kappa_c3_1", "kappa_c3_2", "gamma_e"};
  for (std::size_t i = 0; i < num.size(); ++i) {
    if (std::find(compared.begin(), compared.end(), num[i].first) == compared.end()) continue;
    const double rel = std::abs(ana[i].second - num[i].second) / std::abs(num[i].second);
    out.push_back(make(num[i].first + "_relative_deviation", rel <= 0.10, rel, "<= 0.1"));
  }
  const double dc = std::abs(corrected.kappa_c1_1 - numeric.kappa_c1_1);
  const double dp = std::abs(printed.kappa_c1_1 - numeric.kappa_c1_1);
  out.push_back(make("b_variant_corrected_closer", dc < dp, dc / std::abs(numeric.kappa_c1_1),
                     "corrected deviation < printed deviation " + fmt(dp / std::abs(numeric.kappa_c1_1))));
  return out;
}

std::vector<Check> scaling_checks(const ScalingResult& result) {
  const auto& fits = result.full_fits.empty() ? result.fits : result.full_fits;
  double slope_s = std::numeric_limits<double>::quiet_NaN();
  double slope_t = std::numeric_limits<double>::quiet_NaN();
  for (const auto& [target, fit] : fits) {
    (target == Target::Singlet ? slope_s : slope_t) = fit.slope;
  }
  return {range_check("slope_S", slope_s, 10.0, 19.0),
          make("slope_T_above_S", slope_t > slope_s, slope_t, "> slope_S")};
}

Check robustness_check(const SweepTable& table, Target target, double threshold) {
  double worst = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (const auto& c : table.cells) {
    if (!c.ok()) ok = false;
    worst = std::min(worst, target == Target::Singlet ? c.fidelity_s : c.fidelity_t);
  }
  return make(std::string("min_F_") + to_string(target), ok && worst >= threshold, worst, ">= " + fmt(threshold));
}

std::vector<Check> spacing_checks(const SpacingResult& result, double delta) {
  std::vector<Check> out;
  const auto& dips = result.dips;
  switch (result.n_mediating) {
    case 2: {
      const auto dominant = std::max_element(dips.begin(), dips.end(), [](const Dip& a, const Dip& b) {
        return a.prominence < b.prominence;
      });
      const double x = dominant == dips.end() ? std::numeric_limits<double>::quiet_NaN() : dominant->x;
      out.push_back(make("dominant_dip", !std::isnan(x) && std::abs(x + 0.64) <= 0.06 + kSlack, x,
                         "-0.64 +/- 0.06"));
      break;
    }
    case 3:
      out.push_back(dip_check(dips, -0.54, 0.06));
      out.push_back(dip_check(dips, 0.54, 0.06));
      break;
    case 5:
      out.push_back(dip_check(dips, -0.58, 0.06));
      out.push_back(dip_check(dips, 0.58, 0.06));
      out.push_back(dip_check(dips, -0.20, 0.05));
      out.push_back(dip_check(dips, 0.20, 0.05));
      break;
    default:
      break;
  }
  double worst = 0.0;
  for (const auto& c : result.table.cells) {
    if (std::abs(c.coords[0]) > delta) worst = std::max(worst, std::abs(c.fidelity_s - result.reference_fs));
  }
  out.push_back(make("flat_beyond_delta_max_deviation", worst <= 0.02, worst, "<= 0.02"));
  return out;
}

}  // namespace dissipent::cli
