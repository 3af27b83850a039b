#pragma once

#include <array>
#include <cmath>
#include <functional>

namespace nlslab::ode {

using State = std::array<double, 2>;
using Rhs = std::function<State(double, const State&)>;

struct StepControl {
  double rtol = 1e-12;
  double atol = 1e-30;
  double h_initial = 1e-3;
  double h_max = 0.1;
  int max_steps = 2'000'000;
};

// Return true from the observer to stop the integration after this step.
using Observer = std::function<bool(double, const State&)>;

struct Outcome {
  double t;
  State y;
  bool stopped_early;
  int steps;
};

// Adaptive Dormand-Prince 5(4) from (t0, y0) to t1 (either direction). The
// final step is clipped so the integration lands exactly on t1. `h_hint` is
// updated with the last accepted step so consecutive calls keep their pace.
Outcome integrate(const Rhs& rhs, double t0, const State& y0, double t1,
                  const StepControl& control, const Observer& observe = {},
                  double* h_hint = nullptr);

}  // namespace nlslab::ode
