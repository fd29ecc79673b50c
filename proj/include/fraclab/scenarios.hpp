#pragma once

#include "fraclab/config.hpp"

namespace fraclab {

/// Executes one scenario: writes manifest.json, CSV artifacts and summary.txt
/// under cfg.out_dir. Exit status semantics: 0 success, 2 config validation,
/// 3 solver failure, 4 invariant violation.
int run_scenario(const RunConfig& cfg);

/// Prints the catalog of built-in sources and nonlinearities, with a sampled
/// verification of each declared hypothesis.
void print_catalog(std::ostream& os);

}  // namespace fraclab
