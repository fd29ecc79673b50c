#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace fraclab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Runs the full desk-scale verification battery, writing per-criterion CSV
/// artifacts and a summary under out_dir. The final determinism criterion
/// re-runs the battery into a sibling directory and byte-compares the CSVs.
std::vector<CriterionResult> acceptance_run_all(std::uint64_t seed,
                                                const std::string& out_dir);

/// Single pass of criteria 1-13 (no determinism re-run); used internally and
/// by the determinism check.
std::vector<CriterionResult> acceptance_run_battery(std::uint64_t seed,
                                                    const std::string& out_dir);

}  // namespace fraclab
