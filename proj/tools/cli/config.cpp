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

#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "dissipent/errors.hpp"

namespace dissipent::cli {

using nlohmann::ordered_json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_number(const std::string& raw, const std::string& key) {
  const std::string s = trim(raw);
  if (s == "pi") return std::numbers::pi;
  if (s == "-pi") return -std::numbers::pi;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParameterError("value of '" + key + "' is not a number: '" + raw + "'", key);
}

double as_number(const ordered_json& v, const std::string& key) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return parse_number(v.get<std::string>(), key);
  throw ParameterError("value of '" + key + "' must be a number", key);
}

long long as_integer(const ordered_json& v, const std::string& key) {
  const double d = as_number(v, key);
  if (std::floor(d) != d || std::abs(d) > 9e15) {
    throw ParameterError("value of '" + key + "' must be an integer", key);
  }
  return static_cast<long long>(d);
}

std::string as_string(const ordered_json& v, const std::string& key) {
  if (v.is_string()) return trim(v.get<std::string>());
  throw ParameterError("value of '" + key + "' must be a string", key);
}

bool as_bool(const ordered_json& v, const std::string& key) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const auto s = trim(v.get<std::string>());
    if (s == "true" || s == "1" || s == "yes") return true;
    if (s == "false" || s == "0" || s == "no") return false;
  }
  throw ParameterError("value of '" + key + "' must be true or false", key);
}

std::vector<std::string> as_string_list(const ordered_json& v, const std::string& key) {
  if (v.is_array()) {
    std::vector<std::string> out;
    for (const auto& e : v) out.push_back(as_string(e, key));
    return out;
  }
  return split(as_string(v, key), ',');
}

std::vector<double> as_number_list(const ordered_json& v, const std::string& key) {
  std::vector<double> out;
  if (v.is_array()) {
    for (const auto& e : v) out.push_back(as_number(e, key));
  } else if (v.is_number()) {
    out.push_back(v.get<double>());
  } else {
    for (const auto& s : split(as_string(v, key), ',')) out.push_back(parse_number(s, key));
  }
  return out;
}

std::pair<double, double> as_bounds(const ordered_json& v, const std::string& key) {
  std::vector<double> b;
  if (v.is_array()) {
    b = as_number_list(v, key);
  } else {
    for (const auto& s : split(as_string(v, key), ':')) b.push_back(parse_number(s, key));
  }
  if (b.size() != 2 || !(b[0] < b[1])) {
    throw ParameterError("'" + key + "' must be lower:upper with lower < upper", key);
  }
  return {b[0], b[1]};
}

/// "name:start:stop:count" or "name=v1,v2,...".
SweepAxis parse_axis(const ordered_json& v, const std::string& key) {
  SweepAxis axis;
  if (v.is_object()) {
    if (!v.contains("name") || !v.contains("values")) {
      throw ParameterError("'" + key + "' needs name and values", key);
    }
    axis.name = as_string(v["name"], key);
    axis.values = as_number_list(v["values"], key);
  } else {
    const std::string s = as_string(v, key);
    if (const auto eq = s.find('='); eq != std::string::npos) {
      axis.name = trim(s.substr(0, eq));
      for (const auto& item : split(s.substr(eq + 1), ',')) axis.values.push_back(parse_number(item, key));
    } else {
      const auto parts = split(s, ':');
      if (parts.size() != 4) {
        throw ParameterError("'" + key + "' must be name:start:stop:count or name=v1,v2,...", key);
      }
      axis.name = parts[0];
      const double start = parse_number(parts[1], key);
      const double stop = parse_number(parts[2], key);
      const long long count = static_cast<long long>(parse_number(parts[3], key));
      if (count < 1 || count > 100000) throw ParameterError("'" + key + "' count out of range", key);
      for (long long i = 0; i < count; ++i) {
        axis.values.push_back(count == 1 ? start
                                         : start + (stop - start) * static_cast<double>(i) /
                                                       static_cast<double>(count - 1));
      }
    }
  }
  if (axis.name.empty() || axis.values.empty()) throw ParameterError("'" + key + "' is empty", key);
  return axis;
}

void check_keys(const ordered_json& section, const std::string& name,
                const std::set<std::string>& allowed) {
  if (!section.is_object()) throw ParameterError("section [" + name + "] must be a table", name);
  for (const auto& [k, v] : section.items()) {
    if (!allowed.count(k)) {
      throw ParameterError("unknown key '" + name + "." + k + "'", name + "." + k);
    }
  }
}

const std::set<std::string> kParamKeys{
    "preset", "g",     "omega",  "omega_m", "theta_m",     "delta_cap",           "delta",
    "nu",     "kappa", "gamma0", "gamma1",  "n_mediating", "mediating_detunings", "delta_x",
    "cooperativity"};
const std::set<std::string> kScalarParams{"g",     "omega",  "omega_m", "theta_m", "delta_cap",
                                          "delta", "nu",     "kappa",   "gamma0",  "gamma1"};
const std::set<std::string> kBoundNames{"delta", "nu", "delta_cap", "omega", "omega_m"};

double& scalar_param(PhysicalParams& p, const std::string& name) {
  if (name == "g") return p.g;
  if (name == "omega") return p.omega;
  if (name == "omega_m") return p.omega_m;
  if (name == "theta_m") return p.theta_m;
  if (name == "delta_cap") return p.delta_cap;
  if (name == "delta") return p.delta;
  if (name == "nu") return p.nu;
  if (name == "kappa") return p.kappa;
  if (name == "gamma0") return p.gamma0;
  if (name == "gamma1") return p.gamma1;
  throw ParameterError("unknown parameter '" + name + "'", name);
}

void read_params(const ordered_json& s, RunConfig& cfg) {
  check_keys(s, "params", kParamKeys);
  if (s.contains("preset")) {
    const auto preset = as_string(s["preset"], "params.preset");
    if (preset == "reference") {
      cfg.params = PhysicalParams::reference();
    } else if (preset == "none") {
      cfg.params = PhysicalParams{};
    } else {
      throw ParameterError("unknown preset '" + preset + "'", "params.preset");
    }
  }
  for (const auto& name : kScalarParams) {
    if (s.contains(name)) scalar_param(cfg.params, name) = as_number(s[name], name);
  }
  if (s.contains("cooperativity")) {
    cfg.params = with_cooperativity(cfg.params, as_number(s["cooperativity"], "cooperativity"));
  }
  std::optional<long long> n;
  if (s.contains("n_mediating")) {
    n = as_integer(s["n_mediating"], "n_mediating");
    if (*n < 1 || *n > 64) throw ParameterError("n_mediating must be in 1..64", "n_mediating");
  }
  if (s.contains("mediating_detunings")) {
    if (s.contains("delta_x")) {
      throw ParameterError("give either mediating_detunings or delta_x, not both", "delta_x");
    }
    cfg.params.mediating_detunings = as_number_list(s["mediating_detunings"], "mediating_detunings");
    if (n && *n != cfg.params.n_mediating()) {
      throw ParameterError("n_mediating does not match mediating_detunings", "n_mediating");
    }
  } else if (n) {
    cfg.params.mediating_detunings.assign(static_cast<std::size_t>(*n), 0.0);
  }
  if (s.contains("delta_x")) cfg.delta_x = as_number(s["delta_x"], "delta_x");
}

void read_truncation(const ordered_json& s, RunConfig& cfg) {
  check_keys(s, "truncation", {"excitation_cap", "per_mode_cap"});
  if (s.contains("excitation_cap")) {
    cfg.truncation.excitation_cap = static_cast<int>(as_integer(s["excitation_cap"], "excitation_cap"));
  }
  if (s.contains("per_mode_cap")) {
    cfg.truncation.per_mode_cap = static_cast<int>(as_integer(s["per_mode_cap"], "per_mode_cap"));
  }
}

void read_integrator(const ordered_json& s, RunConfig& cfg) {
  check_keys(s, "integrator", {"method", "dt", "t_final", "record_stride", "rtol", "atol"});
  auto& it = cfg.integrator;
  if (s.contains("method")) {
    const auto m = as_string(s["method"], "method");
    if (m == "rk4") {
      it.method = IntegratorMethod::Rk4;
    } else if (m == "adaptive") {
      it.method = IntegratorMethod::Adaptive;
    } else {
      throw ParameterError("unknown integrator method '" + m + "'", "method");
    }
  }
  if (s.contains("dt")) it.dt = as_number(s["dt"], "dt");
  if (s.contains("t_final")) it.t_final = as_number(s["t_final"], "t_final");
  if (s.contains("record_stride")) {
    it.record_stride = static_cast<int>(as_integer(s["record_stride"], "record_stride"));
  }
  if (s.contains("rtol")) it.rtol = as_number(s["rtol"], "rtol");
  if (s.contains("atol")) it.atol = as_number(s["atol"], "atol");
}

void read_run(const ordered_json& s, RunConfig& cfg) {
  check_keys(s, "run", {"initial_state", "seed", "output_dir", "emit", "model", "steady_method"});
  auto& r = cfg.run;
  if (s.contains("initial_state")) {
    const auto v = as_string(s["initial_state"], "initial_state");
    if (v == "ket00") {
      r.initial_state = InitialKind::Ket00;
    } else if (v == "random") {
      r.initial_state = InitialKind::Random;
    } else {
      throw ParameterError("initial_state must be ket00 or random", "initial_state");
    }
  }
  if (s.contains("seed")) {
    const auto seed = as_integer(s["seed"], "seed");
    if (seed < 0) throw ParameterError("seed must be >= 0", "seed");
    r.seed = static_cast<std::uint64_t>(seed);
  }
  if (s.contains("output_dir")) r.output_dir = as_string(s["output_dir"], "output_dir");
  if (s.contains("emit")) r.emit = as_string_list(s["emit"], "emit");
  if (s.contains("model")) {
    const auto m = as_string(s["model"], "model");
    if (m == "full") {
      r.model = ModelKind::Full;
    } else if (m == "effective") {
      r.model = ModelKind::Effective;
    } else {
      throw ParameterError("model must be full or effective", "model");
    }
  }
  if (s.contains("steady_method")) {
    const auto m = as_string(s["steady_method"], "steady_method");
    if (m == "auto") {
      r.steady_method = SteadyChoice::Auto;
    } else if (m == "null_space") {
      r.steady_method = SteadyChoice::NullSpace;
    } else if (m == "long_time") {
      r.steady_method = SteadyChoice::LongTime;
    } else {
      throw ParameterError("steady_method must be auto, null_space or long_time", "steady_method");
    }
  }
}

void read_sweep(const ordered_json& s, RunConfig& cfg) {
  std::set<std::string> allowed{"evaluator", "at_time"};
  for (int i = 1; i <= 8; ++i) allowed.insert("axis" + std::to_string(i));
  check_keys(s, "sweep", allowed);
  for (int i = 1; i <= 8; ++i) {
    const std::string key = "axis" + std::to_string(i);
    if (s.contains(key)) cfg.sweep.axes.push_back(parse_axis(s[key], key));
  }
  if (s.contains("evaluator")) cfg.sweep.evaluator = parse_objective(as_string(s["evaluator"], "evaluator"));
  if (s.contains("at_time")) cfg.sweep.at_time = as_bool(s["at_time"], "at_time");
}

void read_fit(const ordered_json& s, RunConfig& cfg) {
  std::set<std::string> allowed{"cooperativities", "targets", "objective", "free", "restarts", "confirm"};
  for (const auto& b : kBoundNames) allowed.insert(b + "_bounds");
  check_keys(s, "fit", allowed);
  auto& f = cfg.fit;
  if (s.contains("cooperativities")) f.cooperativities = as_number_list(s["cooperativities"], "cooperativities");
  if (s.contains("targets")) {
    f.targets.clear();
    for (const auto& t : as_string_list(s["targets"], "targets")) f.targets.push_back(parse_target(t));
  }
  if (s.contains("objective")) f.objective = parse_objective(as_string(s["objective"], "objective"));
  if (s.contains("restarts")) f.restarts = static_cast<int>(as_integer(s["restarts"], "restarts"));
  if (s.contains("confirm")) f.confirm = static_cast<int>(as_integer(s["confirm"], "confirm"));
  if (s.contains("free")) {
    std::vector<ParamBound> free;
    for (const auto& name : as_string_list(s["free"], "free")) {
      if (!kBoundNames.count(name)) throw ParameterError("parameter '" + name + "' cannot be optimized", "free");
      ParamBound b{name, 0.0, 0.0};
      const auto old = std::find_if(f.free.begin(), f.free.end(),
                                    [&](const ParamBound& x) { return x.name == name; });
      if (old != f.free.end()) b = *old;
      free.push_back(b);
    }
    f.free = std::move(free);
  }
  for (auto& b : f.free) {
    const std::string key = b.name + "_bounds";
    if (s.contains(key)) std::tie(b.lower, b.upper) = as_bounds(s[key], key);
  }
}

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

bool RunSettings::emits(const std::string& kind) const {
  return std::find(emit.begin(), emit.end(), kind) != emit.end();
}

PhysicalParams RunConfig::resolved_params() const {
  PhysicalParams p = params;
  if (delta_x) p.mediating_detunings = mediating_layout(p.n_mediating(), *delta_x);
  return p;
}

void RunConfig::validate() const {
  resolved_params().validate();
  if (truncation.excitation_cap < 0) throw ParameterError("excitation_cap must be >= 0", "excitation_cap");
  if (truncation.per_mode_cap < 1) throw ParameterError("per_mode_cap must be >= 1", "per_mode_cap");
  if (!(integrator.dt > 0.0)) throw ParameterError("dt must be > 0", "dt");
  if (!(integrator.t_final > 0.0)) throw ParameterError("t_final must be > 0", "t_final");
  if (integrator.record_stride < 1) throw ParameterError("record_stride must be >= 1", "record_stride");
  if (!(integrator.rtol > 0.0)) throw ParameterError("rtol must be > 0", "rtol");
  if (!(integrator.atol > 0.0)) throw ParameterError("atol must be > 0", "atol");
  for (const auto& e : run.emit) {
    if (e != "csv" && e != "json" && e != "svg") {
      throw ParameterError("emit entries must be csv, json or svg (got '" + e + "')", "emit");
    }
  }
  if (run.output_dir.empty()) throw ParameterError("output_dir must not be empty", "output_dir");
  const PhysicalParams base = resolved_params();
  for (const auto& a : sweep.axes) {
    for (double v : a.values) apply_coordinate(base, base, a.name, v).validate();
  }
  for (double c : fit.cooperativities) {
    if (!(c > 0.0)) throw ParameterError("cooperativities must be > 0", "cooperativities");
  }
  if (fit.targets.empty()) throw ParameterError("targets must not be empty", "targets");
  if (fit.restarts < 0) throw ParameterError("restarts must be >= 0", "restarts");
  if (fit.confirm < 0) throw ParameterError("confirm must be >= 0", "confirm");
  for (const auto& b : fit.free) {
    if (!(b.lower < b.upper)) {
      throw ParameterError("missing or empty bounds for " + b.name, b.name + "_bounds");
    }
  }
}

PhysicalParams apply_coordinate(PhysicalParams p, const PhysicalParams& base, const std::string& name,
                                double value) {
  if (name == "omega_rel") {
    p.omega = base.omega * (1.0 + value);
  } else if (name == "omega_m_rel") {
    p.omega_m = base.omega_m * (1.0 + value);
  } else if (name == "delta_x") {
    p.mediating_detunings = mediating_layout(p.n_mediating(), value);
  } else if (name == "cooperativity") {
    p = with_cooperativity(p, value);
  } else if (kScalarParams.count(name)) {
    scalar_param(p, name) = value;
  } else {
    throw ParameterError("unknown sweep axis '" + name + "'", name);
  }
  return p;
}

RunConfig parse_json(const ordered_json& doc) {
  if (!doc.is_object()) throw ParameterError("configuration must be a table of sections", "config");
  RunConfig cfg;
  for (const auto& [name, section] : doc.items()) {
    if (name == "params") {
      read_params(section, cfg);
    } else if (name == "truncation") {
      read_truncation(section, cfg);
    } else if (name == "integrator") {
      read_integrator(section, cfg);
    } else if (name == "run") {
      read_run(section, cfg);
    } else if (name == "sweep") {
      read_sweep(section, cfg);
    } else if (name == "fit") {
      read_fit(section, cfg);
    } else {
      throw ParameterError("unknown section [" + name + "]", name);
    }
  }
  cfg.validate();
  return cfg;
}

RunConfig parse_ini(const std::string& text) {
  boost::property_tree::ptree tree;
  std::istringstream is(text);
  try {
    boost::property_tree::ini_parser::read_ini(is, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ParameterError(std::string("malformed config: ") + e.what(), "config");
  }
  ordered_json doc = ordered_json::object();
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ParameterError("key '" + section + "' must sit inside a [section]", section);
    }
    ordered_json& s = doc[section];
    s = ordered_json::object();
    for (const auto& [key, value] : body) s[key] = value.get_value<std::string>();
  }
  return parse_json(doc);
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config file '" + path + "'", "config");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    ordered_json doc;
    try {
      doc = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParameterError(std::string("malformed JSON config: ") + e.what(), "config");
    }
    return parse_json(doc);
  }
  return parse_ini(text);
}

std::string to_string(IntegratorMethod m) { return m == IntegratorMethod::Rk4 ? "rk4" : "adaptive"; }

std::string to_string(ModelKind m) { return m == ModelKind::Full ? "full" : "effective"; }

ordered_json to_json(const RunConfig& cfg) {
  ordered_json j;
  const auto& p = cfg.params;
  auto& params = j["params"];
  params["preset"] = "none";
  params["g"] = p.g;
  params["omega"] = p.omega;
  params["omega_m"] = p.omega_m;
  params["theta_m"] = p.theta_m;
  params["delta_cap"] = p.delta_cap;
  params["delta"] = p.delta;
  params["nu"] = p.nu;
  params["kappa"] = p.kappa;
  params["gamma0"] = p.gamma0;
  params["gamma1"] = p.gamma1;
  params["n_mediating"] = p.n_mediating();
  if (cfg.delta_x) {
    params["delta_x"] = *cfg.delta_x;
  } else {
    params["mediating_detunings"] = p.mediating_detunings;
  }
  j["truncation"] = {{"excitation_cap", cfg.truncation.excitation_cap},
                     {"per_mode_cap", cfg.truncation.per_mode_cap}};
  const auto& it = cfg.integrator;
  j["integrator"] = {{"method", to_string(it.method)}, {"dt", it.dt},     {"t_final", it.t_final},
                     {"record_stride", it.record_stride}, {"rtol", it.rtol}, {"atol", it.atol}};
  const auto& r = cfg.run;
  const char* steady = r.steady_method == SteadyChoice::Auto
                           ? "auto"
                           : (r.steady_method == SteadyChoice::NullSpace ? "null_space" : "long_time");
  j["run"] = {{"initial_state", r.initial_state == InitialKind::Ket00 ? "ket00" : "random"},
              {"seed", r.seed},
              {"output_dir", r.output_dir},
              {"emit", r.emit},
              {"model", to_string(r.model)},
              {"steady_method", steady}};
  auto& sweep = j["sweep"];
  sweep = ordered_json::object();
  for (std::size_t i = 0; i < cfg.sweep.axes.size(); ++i) {
    const auto& a = cfg.sweep.axes[i];
    std::string spec = a.name + "=";
    for (std::size_t k = 0; k < a.values.size(); ++k) spec += (k ? "," : "") + format_number(a.values[k]);
    sweep["axis" + std::to_string(i + 1)] = spec;
  }
  sweep["evaluator"] = to_string(cfg.sweep.evaluator);
  sweep["at_time"] = cfg.sweep.at_time;
  auto& fit = j["fit"];
  fit["cooperativities"] = cfg.fit.cooperativities;
  std::vector<std::string> targets;
  for (auto t : cfg.fit.targets) targets.push_back(to_string(t));
  fit["targets"] = targets;
  fit["objective"] = to_string(cfg.fit.objective);
  std::vector<std::string> free;
  for (const auto& b : cfg.fit.free) free.push_back(b.name);
  fit["free"] = free;
  for (const auto& b : cfg.fit.free) fit[b.name + "_bounds"] = {b.lower, b.upper};
  fit["restarts"] = cfg.fit.restarts;
  fit["confirm"] = cfg.fit.confirm;
  return j;
}

}  // namespace dissipent::cli
