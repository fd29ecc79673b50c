#pragma once

#include <map>
#include <string>
#include <vector>

#include "fraclab/evolution.hpp"

namespace fraclab {

using ParamMap = std::map<std::string, double>;

struct SourceEntry {
  std::string name;
  std::string description;
  ParamMap defaults;
  SourceSpec (*make)(const ParamMap& params);
};

struct NonlinearityEntry {
  std::string name;
  std::string description;
  ParamMap defaults;
  bool monotone_quotient;   // declared; verified by sampling
  std::string hypotheses;   // which scheme hypotheses the entry satisfies
  // lambda1 is needed because the growth bound must sit below it
  NonlinearitySpec (*make)(const ParamMap& params, double lambda1);
};

const std::vector<SourceEntry>& source_catalog();
const std::vector<NonlinearityEntry>& nonlinearity_catalog();

const SourceEntry& find_source(const std::string& name);
const NonlinearityEntry& find_nonlinearity(const std::string& name);

/// Fills missing parameters with defaults; unknown parameter names are errors.
ParamMap resolve_params(const ParamMap& defaults, const ParamMap& given,
                        const std::string& what);

/// Samples f(x,y)/y on a grid of y values and checks the declared
/// monotone-quotient flag; returns true when the declaration holds.
bool verify_monotone_quotient(const NonlinearitySpec& nl, double x, double y_max);

}  // namespace fraclab
