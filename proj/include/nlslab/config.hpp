#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace nlslab {

// One experiment invocation. Zero-valued grid/trial/alpha entries mean "use
// the preset default" for the chosen experiment; see resolve().
struct RunConfig {
  std::string experiment = "groundstate";
  int dimension = 1;
  std::uint64_t seed = 1;
  std::string output_dir = "nlslab_out";

  // [grid] For radial experiments n is the radial cell count and box the
  // radius; for field experiments they describe the periodic grid.
  int n = 0;
  double box = 0.0;

  // [tolerances]
  double tol_ode = 1e-8;
  double tol_orth = 1e-9;
  double tol_id = 1e-5;

  // [evolve]
  double dt = 1e-3;
  double t_end = 1.0;
  int record_every = 10;
  std::string initial = "soliton";  // soliton | gaussian (evolve only)

  // [extra]
  int trials = 0;
  double alpha = 0.0;
  double t_stop = 0.25;  // pc-blowup end time

  bool operator==(const RunConfig&) const = default;
};

const std::vector<std::string>& experiment_names();

// Text format: "key = value" lines, optional [section] headers ([grid],
// [tolerances], [evolve], [extra]); '#' or ';' start a comment. A key may
// appear at top level or in its own section. Unknown keys, duplicates and
// malformed lines raise ParseError; out-of-range values raise ValidationError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

// Sets one key from its textual value (command-line overrides).
void set_config_value(RunConfig& cfg, const std::string& key, const std::string& value);
std::vector<std::string> config_keys();

void validate(const RunConfig& cfg);
// Copy with preset defaults filled in for n, box, trials and alpha.
RunConfig resolve(const RunConfig& cfg);

}  // namespace nlslab
