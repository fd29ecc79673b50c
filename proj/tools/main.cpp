#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fraclab/scenarios.hpp"

int main(int argc, char** argv) {
  CLI::App app{"fraclab: solver and verification laboratory for singular "
               "fractional diffusion problems"};
  app.require_subcommand(0, 1);

  std::string config_path, out_dir, scenario;
  long long seed = -1;
  std::vector<std::string> overrides;

  CLI::App* run = app.add_subcommand("run", "execute a scenario");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--seed", seed, "random seed for property batteries");
  run->add_option("--scenario", scenario, "scenario name");
  run->add_option("--set", overrides, "override, e.g. --set n=512")->take_all();

  CLI::App* cat = app.add_subcommand("catalog", "list built-in sources and nonlinearities");

  CLI11_PARSE(app, argc, argv);

  if (cat->parsed()) {
    fraclab::print_catalog(std::cout);
    return 0;
  }
  if (!run->parsed()) {
    std::cout << app.help();
    return 0;
  }

  fraclab::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = fraclab::parse_config_file(config_path);
    if (!scenario.empty()) cfg.scenario = scenario;
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    for (const std::string& kv : overrides) fraclab::apply_override(cfg, kv);
    if (cfg.scenario.empty())
      throw fraclab::ConfigError("no scenario given (use --scenario or a config file)");
  } catch (const std::exception& e) {
    std::cerr << "error: config: " << e.what() << "\n";
    return 2;
  }
  return fraclab::run_scenario(cfg);
}
