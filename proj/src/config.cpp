#include "fraclab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace fraclab {
namespace {

using nlohmann::json;

const std::set<std::string>& known_scenarios() {
  static const std::set<std::string> s = {"eigen",    "stationary", "pure_singular",
                                          "semilinear", "evolve_g", "evolve_p",
                                          "stabilize", "study_gap", "study_seminorm",
                                          "verify_all"};
  return s;
}

void reject_unknown(const json& j, const std::set<std::string>& known,
                    const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key()))
      throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

ParamMap parse_params(const json& j, const std::string& where) {
  ParamMap out;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_number())
      throw ConfigError("parameter '" + it.key() + "' in " + where + " must be numeric");
    out[it.key()] = it.value().get<double>();
  }
  return out;
}

RunConfig parse_json(const json& j) {
  RunConfig cfg;
  reject_unknown(j, {"scenario", "domain", "n", "s", "q", "lambda", "epsilon",
                     "g_const", "T", "n_steps", "source", "nonlinearity", "initial",
                     "beta_factor", "ns", "dt_levels", "seed", "out", "export_matrix",
                     "check_uniqueness", "tolerances"},
                 "config");
  if (j.contains("scenario")) cfg.scenario = j["scenario"].get<std::string>();
  if (j.contains("domain")) {
    reject_unknown(j["domain"], {"a", "b"}, "domain");
    if (j["domain"].contains("a")) cfg.a = j["domain"]["a"].get<double>();
    if (j["domain"].contains("b")) cfg.b = j["domain"]["b"].get<double>();
  }
  if (j.contains("n")) cfg.n = j["n"].get<int>();
  if (j.contains("s")) cfg.s = j["s"].get<double>();
  if (j.contains("q")) cfg.q = j["q"].get<double>();
  if (j.contains("lambda")) cfg.lambda = j["lambda"].get<double>();
  if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
  if (j.contains("g_const")) cfg.g_const = j["g_const"].get<double>();
  if (j.contains("T")) cfg.T = j["T"].get<double>();
  if (j.contains("n_steps")) cfg.n_steps = j["n_steps"].get<int>();
  if (j.contains("source")) {
    reject_unknown(j["source"], {"name", "params"}, "source");
    if (j["source"].contains("name")) cfg.source_name = j["source"]["name"].get<std::string>();
    if (j["source"].contains("params"))
      cfg.source_params = parse_params(j["source"]["params"], "source.params");
  }
  if (j.contains("nonlinearity")) {
    reject_unknown(j["nonlinearity"], {"name", "params"}, "nonlinearity");
    if (j["nonlinearity"].contains("name"))
      cfg.nonlinearity_name = j["nonlinearity"]["name"].get<std::string>();
    if (j["nonlinearity"].contains("params"))
      cfg.nonlinearity_params = parse_params(j["nonlinearity"]["params"],
                                             "nonlinearity.params");
  }
  if (j.contains("initial")) {
    reject_unknown(j["initial"], {"name", "mix"}, "initial");
    if (j["initial"].contains("name")) cfg.initial_name = j["initial"]["name"].get<std::string>();
    if (j["initial"].contains("mix")) cfg.initial_mix = j["initial"]["mix"].get<double>();
  }
  if (j.contains("beta_factor")) cfg.beta_factor = j["beta_factor"].get<double>();
  if (j.contains("ns")) cfg.ns = j["ns"].get<std::vector<int>>();
  if (j.contains("dt_levels")) cfg.dt_levels = j["dt_levels"].get<int>();
  if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
  if (j.contains("export_matrix")) cfg.export_matrix = j["export_matrix"].get<bool>();
  if (j.contains("check_uniqueness"))
    cfg.check_uniqueness = j["check_uniqueness"].get<bool>();
  if (j.contains("tolerances")) {
    reject_unknown(j["tolerances"], {"tol_newton", "tol_cont", "tol_iter",
                                     "stab_threshold"},
                   "tolerances");
    const auto& t = j["tolerances"];
    if (t.contains("tol_newton")) cfg.tol_newton = t["tol_newton"].get<double>();
    if (t.contains("tol_cont")) cfg.tol_cont = t["tol_cont"].get<double>();
    if (t.contains("tol_iter")) cfg.tol_iter = t["tol_iter"].get<double>();
    if (t.contains("stab_threshold")) cfg.stab_threshold = t["stab_threshold"].get<double>();
  }
  return cfg;
}

}  // namespace

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse failure: ") + e.what());
  }
  return parse_json(j);
}

RunConfig parse_config_string(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config parse failure: ") + e.what());
  }
  return parse_json(j);
}

void apply_override(RunConfig& cfg, const std::string& kv) {
  const auto eq = kv.find('=');
  if (eq == std::string::npos)
    throw ConfigError("--set expects key=value, got '" + kv + "'");
  const std::string key = kv.substr(0, eq);
  const std::string val = kv.substr(eq + 1);
  auto as_double = [&]() {
    try {
      size_t pos = 0;
      double d = std::stod(val, &pos);
      if (pos != val.size()) throw std::invalid_argument(val);
      return d;
    } catch (const std::exception&) {
      throw ConfigError("value for '" + key + "' must be numeric, got '" + val + "'");
    }
  };
  auto as_int = [&]() { return static_cast<int>(as_double()); };

  if (key == "scenario") cfg.scenario = val;
  else if (key == "domain.a") cfg.a = as_double();
  else if (key == "domain.b") cfg.b = as_double();
  else if (key == "n") cfg.n = as_int();
  else if (key == "s") cfg.s = as_double();
  else if (key == "q") cfg.q = as_double();
  else if (key == "lambda") cfg.lambda = as_double();
  else if (key == "epsilon") cfg.epsilon = as_double();
  else if (key == "g_const") cfg.g_const = as_double();
  else if (key == "T") cfg.T = as_double();
  else if (key == "n_steps") cfg.n_steps = as_int();
  else if (key == "source.name") cfg.source_name = val;
  else if (key == "nonlinearity.name") cfg.nonlinearity_name = val;
  else if (key == "initial.name") cfg.initial_name = val;
  else if (key == "initial.mix") cfg.initial_mix = as_double();
  else if (key == "beta_factor") cfg.beta_factor = as_double();
  else if (key == "dt_levels") cfg.dt_levels = as_int();
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(as_double());
  else if (key == "out") cfg.out_dir = val;
  else if (key == "export_matrix") cfg.export_matrix = (val == "true" || val == "1");
  else if (key == "check_uniqueness") cfg.check_uniqueness = (val == "true" || val == "1");
  else if (key.rfind("source.params.", 0) == 0)
    cfg.source_params[key.substr(14)] = as_double();
  else if (key.rfind("nonlinearity.params.", 0) == 0)
    cfg.nonlinearity_params[key.substr(20)] = as_double();
  else
    throw ConfigError("unknown override key '" + key + "'");
}

void validate_config(const RunConfig& cfg) {
  if (!known_scenarios().count(cfg.scenario))
    throw ConfigError("unknown scenario '" + cfg.scenario + "'");
  if (!(cfg.b > cfg.a)) throw ConfigError("domain requires b > a");
  if (cfg.n < 3) throw ConfigError("n must be at least 3");
  if (!(cfg.s > 0.0 && cfg.s < 1.0)) throw ConfigError("s must lie in (0,1)");
  if (!(cfg.q > 0.0)) throw ConfigError("q must be positive");
  if (!(cfg.lambda > 0.0)) throw ConfigError("lambda must be positive");
  if (cfg.epsilon < 0.0) throw ConfigError("epsilon must be nonnegative");
  const bool evolution = cfg.scenario == "evolve_g" || cfg.scenario == "evolve_p" ||
                         cfg.scenario == "stabilize" || cfg.scenario == "study_gap";
  if (evolution && (!(cfg.T > 0.0) || cfg.n_steps < 1))
    throw ConfigError("evolution scenarios require T > 0 and n_steps >= 1");
  if (cfg.scenario == "study_gap" && cfg.dt_levels < 4)
    throw ConfigError("study_gap requires at least 4 dt levels");
  if (cfg.scenario == "study_seminorm") {
    if (cfg.ns.size() < 2) throw ConfigError("study_seminorm requires at least 2 grid sizes");
    if (validate_params(cfg.q, cfg.s) != Regime::very_singular)
      throw ConfigError("study_seminorm requires very-singular parameters: q(2s-1) >= 2s+1");
    if (!(cfg.beta_factor > 1.0))
      throw ConfigError("study_seminorm requires beta_factor > 1");
  }
  // catalog names resolve (throws on unknown)
  if (evolution || cfg.scenario == "semilinear") {
    try {
      if (cfg.scenario == "evolve_g" || cfg.scenario == "study_gap")
        find_source(cfg.source_name);
      else
        find_nonlinearity(cfg.nonlinearity_name);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  const std::set<std::string> initials = {"mix", "pure_singular", "subsolution",
                                          "supersolution"};
  if (!initials.count(cfg.initial_name))
    throw ConfigError("unknown initial datum '" + cfg.initial_name + "'");
}

std::string config_to_json(const RunConfig& cfg) {
  json j;
  j["scenario"] = cfg.scenario;
  j["domain"] = {{"a", cfg.a}, {"b", cfg.b}};
  j["n"] = cfg.n;
  j["s"] = cfg.s;
  j["q"] = cfg.q;
  j["lambda"] = cfg.lambda;
  j["epsilon"] = cfg.epsilon;
  j["g_const"] = cfg.g_const;
  j["T"] = cfg.T;
  j["n_steps"] = cfg.n_steps;
  j["source"] = {{"name", cfg.source_name}, {"params", cfg.source_params}};
  j["nonlinearity"] = {{"name", cfg.nonlinearity_name},
                       {"params", cfg.nonlinearity_params}};
  j["initial"] = {{"name", cfg.initial_name}, {"mix", cfg.initial_mix}};
  j["beta_factor"] = cfg.beta_factor;
  j["ns"] = cfg.ns;
  j["dt_levels"] = cfg.dt_levels;
  j["seed"] = cfg.seed;
  j["out"] = cfg.out_dir;
  j["export_matrix"] = cfg.export_matrix;
  j["check_uniqueness"] = cfg.check_uniqueness;
  j["tolerances"] = {{"tol_newton", cfg.tol_newton},
                     {"tol_cont", cfg.tol_cont},
                     {"tol_iter", cfg.tol_iter},
                     {"stab_threshold", cfg.stab_threshold}};
  return j.dump(2);
}

}  // namespace fraclab
