#pragma once

#include <string>
#include <vector>

#include "nlslab/config.hpp"

namespace nlslab {

struct Check {
  std::string name;
  double value;
  double limit;
  std::string relation;  // "<", ">", "<=" ...
  bool pass;
};

struct ExperimentResult {
  int status = 0;                     // 0 all checks passed, 1 otherwise
  std::string summary_json;           // also written to <output_dir>/summary.json
  std::vector<Check> checks;
  std::vector<std::string> failures;  // failed check names and caught errors
  std::vector<std::string> files;     // artifacts, relative to output_dir
};

// Validates cfg (ValidationError on bad input), runs the preset, and writes
// summary.json plus CSV artifacts to cfg.output_dir. Numerical failures inside
// the run are caught and reported as failures with status 1.
ExperimentResult run_experiment(const RunConfig& cfg);

}  // namespace nlslab
