#include "nlslab/ode.hpp"

#include <algorithm>
#include <stdexcept>

namespace nlslab::ode {

namespace {

// Dormand-Prince tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

State axpy(const State& y, double h, std::initializer_list<std::pair<double, const State*>> terms) {
  State out = y;
  for (const auto& [coef, k] : terms) {
    out[0] += h * coef * (*k)[0];
    out[1] += h * coef * (*k)[1];
  }
  return out;
}

}  // namespace

Outcome integrate(const Rhs& rhs, double t0, const State& y0, double t1,
                  const StepControl& control, const Observer& observe, double* h_hint) {
  const double span = t1 - t0;
  if (span == 0.0) return {t0, y0, false, 0};
  const double dir = span > 0 ? 1.0 : -1.0;
  double h = std::min(std::abs(h_hint && *h_hint > 0 ? *h_hint : control.h_initial),
                      control.h_max);
  double t = t0;
  State y = y0;
  State k1 = rhs(t, y);
  int steps = 0;

  while (dir * (t1 - t) > 0) {
    if (++steps > control.max_steps) throw std::runtime_error("ode::integrate: step budget exhausted");
    bool last = false;
    if (h >= std::abs(t1 - t)) {
      h = std::abs(t1 - t);
      last = true;
    }
    const double hs = dir * h;
    const State k2 = rhs(t + c2 * hs, axpy(y, hs, {{a21, &k1}}));
    const State k3 = rhs(t + c3 * hs, axpy(y, hs, {{a31, &k1}, {a32, &k2}}));
    const State k4 = rhs(t + c4 * hs, axpy(y, hs, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
    const State k5 =
        rhs(t + c5 * hs, axpy(y, hs, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
    const State k6 = rhs(t + hs, axpy(y, hs, {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4},
                                              {a65, &k5}}));
    const State y_new =
        axpy(y, hs, {{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
    const State k7 = rhs(t + hs, y_new);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
      const double e =
          hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double scale =
          control.atol + control.rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    if (!std::isfinite(err)) err = 1e10;

    if (err <= 1.0) {
      t = last ? t1 : t + hs;
      y = y_new;
      k1 = k7;
      if (h_hint && !last) *h_hint = h;
      if (observe && observe(t, y)) return {t, y, true, steps};
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (!last) h = std::min(h * factor, control.h_max);
    } else {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.25));
      if (h < 1e-15 * std::max(1.0, std::abs(t))) throw std::runtime_error("ode::integrate: step size underflow");
    }
  }
  return {t, y, false, steps};
}

}  // namespace nlslab::ode
