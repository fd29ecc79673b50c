#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace fraclab {

/// Full round-trip precision decimal formatting ("%.17g").
std::string full_precision(double v);

void ensure_directory(const std::string& path);

/// Minimal CSV writer; every numeric cell goes through full_precision.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);
  void header(const std::vector<std::string>& names);
  void row(const std::vector<double>& values);
  void raw_row(const std::vector<std::string>& cells);

 private:
  std::ofstream out_;
};

}  // namespace fraclab
