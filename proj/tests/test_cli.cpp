#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fraclab/scenarios.hpp"

using namespace fraclab;
namespace fs = std::filesystem;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}
}  // namespace

TEST_CASE("config parsing accepts the documented schema") {
  RunConfig cfg = parse_config_string(R"({
    "scenario": "stationary",
    "domain": {"a": -2.0, "b": 2.0},
    "n": 64, "s": 0.3, "q": 1.5, "lambda": 0.5,
    "source": {"name": "sine_time", "params": {"c": 0.7}},
    "tolerances": {"tol_newton": 1e-11},
    "seed": 42
  })");
  CHECK(cfg.scenario == "stationary");
  CHECK(cfg.a == -2.0);
  CHECK(cfg.n == 64);
  CHECK(cfg.source_params.at("c") == 0.7);
  CHECK(cfg.tol_newton == 1e-11);
  CHECK(cfg.seed == 42);
  validate_config(cfg);
}

TEST_CASE("unknown keys are errors, not warnings") {
  CHECK_THROWS_AS(parse_config_string(R"({"scenario": "eigen", "typo_key": 1})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_string(R"({"domain": {"a": 0, "middle": 1}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_string(R"({"tolerances": {"tol_foo": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config_string("{not json"), ConfigError);
}

TEST_CASE("overrides follow the documented key paths") {
  RunConfig cfg;
  apply_override(cfg, "scenario=eigen");
  apply_override(cfg, "n=48");
  apply_override(cfg, "domain.a=-3");
  apply_override(cfg, "source.params.c=0.25");
  CHECK(cfg.scenario == "eigen");
  CHECK(cfg.n == 48);
  CHECK(cfg.a == -3.0);
  CHECK(cfg.source_params.at("c") == 0.25);
  CHECK_THROWS_AS(apply_override(cfg, "nonsense=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "n"), ConfigError);
  CHECK_THROWS_AS(apply_override(cfg, "n=abc"), ConfigError);
}

TEST_CASE("validation rejects bad scenario configurations") {
  RunConfig cfg;
  cfg.scenario = "unknown_thing";
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg.scenario = "study_seminorm";
  cfg.q = 0.5;
  cfg.s = 0.4;  // standard regime
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  cfg.scenario = "evolve_p";
  cfg.nonlinearity_name = "no_such_entry";
  CHECK_THROWS_AS(validate_config(cfg), ConfigError);
}

TEST_CASE("catalog meets the interface contract") {
  CHECK(source_catalog().size() >= 3);
  CHECK(nonlinearity_catalog().size() >= 3);
  for (const auto& e : nonlinearity_catalog()) {
    NonlinearitySpec nl = e.make(e.defaults, 1.0);
    CHECK(verify_monotone_quotient(nl, 0.2, 8.0) == e.monotone_quotient);
  }
  CHECK_THROWS_AS(find_source("missing"), std::invalid_argument);
  CHECK_THROWS_AS(find_nonlinearity("missing"), std::invalid_argument);
  CHECK_THROWS_AS(
      resolve_params({{"c", 1.0}}, {{"d", 2.0}}, "source"), std::invalid_argument);
}

TEST_CASE("growth bound above lambda1 exits with a config error") {
  RunConfig cfg;
  cfg.scenario = "evolve_p";
  cfg.n = 32;
  cfg.s = 0.4;
  cfg.q = 0.5;
  cfg.T = 0.2;
  cfg.n_steps = 4;
  cfg.out_dir = "cli_test_out/reject";
  cfg.nonlinearity_params["mu_frac"] = 1.5;  // growth above lambda1
  CHECK(run_scenario(cfg) == 2);
  fs::remove_all("cli_test_out");
}

TEST_CASE("scenario runs are deterministic and manifests reproduce them") {
  RunConfig cfg;
  cfg.scenario = "eigen";
  cfg.n = 48;
  cfg.s = 0.35;
  cfg.out_dir = "cli_test_out/a";
  REQUIRE(run_scenario(cfg) == 0);
  cfg.out_dir = "cli_test_out/b";
  REQUIRE(run_scenario(cfg) == 0);
  CHECK(slurp("cli_test_out/a/eigenpair.csv") == slurp("cli_test_out/b/eigenpair.csv"));

  // a manifest is self-contained: re-running from it reproduces the run
  std::string manifest = slurp("cli_test_out/a/manifest.json");
  const auto cfg_pos = manifest.find("\"config\"");
  REQUIRE(cfg_pos != std::string::npos);
  // extract the embedded config object by brace matching
  const auto start = manifest.find('{', cfg_pos);
  int depth = 0;
  size_t end = start;
  for (size_t i = start; i < manifest.size(); ++i) {
    if (manifest[i] == '{') ++depth;
    if (manifest[i] == '}' && --depth == 0) {
      end = i;
      break;
    }
  }
  RunConfig replay = parse_config_string(manifest.substr(start, end - start + 1));
  replay.out_dir = "cli_test_out/c";
  REQUIRE(run_scenario(replay) == 0);
  CHECK(slurp("cli_test_out/a/eigenpair.csv") == slurp("cli_test_out/c/eigenpair.csv"));
  fs::remove_all("cli_test_out");
}

TEST_CASE("stationary scenario writes the documented artifacts") {
  RunConfig cfg;
  cfg.scenario = "stationary";
  cfg.n = 32;
  cfg.s = 0.45;
  cfg.q = 1.0;
  cfg.out_dir = "cli_test_out/st";
  REQUIRE(run_scenario(cfg) == 0);
  CHECK(fs::exists("cli_test_out/st/manifest.json"));
  CHECK(fs::exists("cli_test_out/st/solution.csv"));
  CHECK(fs::exists("cli_test_out/st/summary.txt"));
  const std::string solution = slurp("cli_test_out/st/solution.csv");
  CHECK(solution.rfind("x,delta,u", 0) == 0);
  fs::remove_all("cli_test_out");
}
