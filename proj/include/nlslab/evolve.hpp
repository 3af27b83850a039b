#pragma once

#include <functional>
#include <string>
#include <vector>

#include "nlslab/fields.hpp"

namespace nlslab {

struct EvolveConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  int record_every = 10;
  int sign = 1;  // +1 focusing, -1 defocusing, 0 linear
  double blowup_linf = 1e6;
  bool dealias = false;
};

void validate(const EvolveConfig& cfg);

// Strang splitting: half linear, full nonlinear phase rotation, half linear.
// dt may be negative; step(step(u, dt), -dt) == u up to round-off.
class SplitStepper {
 public:
  SplitStepper(const GridSpec& grid, int sign, bool dealias);
  void advance(FieldState& u, double dt);

 private:
  void linear(std::vector<cplx>& f, double dt);
  GridSpec grid_;
  int sign_;
  bool dealias_;
  std::vector<double> k2_;
  std::vector<char> keep_;
  double cached_dt_ = 0.0;
  std::vector<cplx> half_;
};

FieldState step(const FieldState& u, double dt, int sign, bool dealias = false);

struct ObservationRow {
  double t;
  double mass, energy, virial, morawetz, sup_abs, grad_sq;
  std::vector<double> extra;
};

struct Observers {
  double morawetz_radius = 0.0;  // 0 disables the column (NaN)
  // Extra columns evaluated on each recorded snapshot (e.g. a decompose hook).
  std::vector<std::string> hook_columns;
  std::function<std::vector<double>(const FieldState&)> hook;
  // Soliton core width; the run stops once it falls below 4 grid cells.
  std::function<double(const FieldState&)> core_width;
};

enum class Termination { Completed, BlowupDetected, ResolutionFloor };
const char* to_string(Termination t);

struct RunResult {
  std::vector<FieldState> snapshots;
  std::vector<ObservationRow> log;
  std::vector<std::string> columns;
  Termination cause = Termination::Completed;
  double t_stop = 0.0;
  std::string detail;
};

// Evolves u0 from u0.t towards cfg.t_end (either direction) with |dt|
// adjusted to divide the interval evenly.
RunResult run(const FieldState& u0, const EvolveConfig& cfg, const Observers& obs = {}, bool keep_snapshots = true);

struct DriftSummary {
  double mass_drift;    // max |M - M0| / M0
  double energy_drift;  // max |E - E0| / max(|E0|, ||grad u0||^2 / 2)
  double energy_scale;
};
DriftSummary conservation_report(const std::vector<ObservationRow>& log);

// Per recorded interval: |(V1 - V0)/(t1 - t0) - 4 (E0 + E1)/2| / |E|.
std::vector<double> virial_identity_errors(const std::vector<ObservationRow>& log);

// Self-convergence in dt: errors ||u_dt - u_{dt/2}|| and ||u_{dt/2} - u_{dt/4}||
// at cfg.t_end; their ratio is about 4 for a second-order scheme.
struct ConvergenceCheck {
  double err_coarse;
  double err_fine;
  double ratio;
};
ConvergenceCheck self_convergence(const FieldState& u0, const EvolveConfig& cfg);

void write_log_csv(const RunResult& r, const std::string& path);

}  // namespace nlslab
