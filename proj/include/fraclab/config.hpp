#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclab/catalog.hpp"

namespace fraclab {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvariantError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Fully-resolved run configuration. Parsed from a JSON config file with
/// strict unknown-key rejection, then overridden by --set key=value pairs.
struct RunConfig {
  std::string scenario;
  double a = -1.0;
  double b = 1.0;
  int n = 256;
  double s = 0.4;
  double q = 0.5;
  double lambda = 1.0;
  double epsilon = 0.0;
  double g_const = 1.0;
  double T = 1.0;
  int n_steps = 20;
  std::string source_name = "sine_time";
  ParamMap source_params;
  std::string nonlinearity_name = "saturating";
  ParamMap nonlinearity_params;
  std::string initial_name = "mix";  // mix | pure_singular | subsolution | supersolution
  double initial_mix = 0.5;
  double beta_factor = 1.1;
  std::vector<int> ns = {128, 256, 512, 1024};
  int dt_levels = 4;
  std::uint64_t seed = 0;
  std::string out_dir = "out";
  bool export_matrix = false;
  bool check_uniqueness = false;
  // tolerances, defaulted per the module decisions; recorded in the manifest
  double tol_newton = 1e-10;
  double tol_cont = 1e-7;
  double tol_iter = 1e-8;
  double stab_threshold = 1e-4;
};

/// Parses a JSON file; unknown keys are errors, not warnings.
RunConfig parse_config_file(const std::string& path);

/// Parses a JSON string (used by tests and by manifest replay).
RunConfig parse_config_string(const std::string& text);

/// Applies one --set override, e.g. "domain.a=-2" or "source.params.c=0.5".
void apply_override(RunConfig& cfg, const std::string& key_equals_value);

/// Scenario-specific validation; throws ConfigError.
void validate_config(const RunConfig& cfg);

/// Serializes the resolved config back to JSON (manifest embedding; a
/// manifest is self-contained and can reproduce the run).
std::string config_to_json(const RunConfig& cfg);

}  // namespace fraclab
