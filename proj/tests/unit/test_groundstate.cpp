#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <vector>

#include "nlslab/error.hpp"
#include "nlslab/groundstate.hpp"

using namespace nlslab;

namespace {

const RadialProfile& q1() {
  static const RadialProfile p = solve_ground_state(1);
  return p;
}
const RadialProfile& q2() {
  static const RadialProfile p = solve_ground_state(2);
  return p;
}

double closed_form(double x) { return std::pow(3.0, 0.25) / std::sqrt(std::cosh(2 * x)); }

// Independent shooting oracle for d = 2: classical RK4 on a fixed step with
// bisection on Q(0), mass by the trapezoid rule.
int townes_shot(double a, double r_stop, double* mass) {
  const double h = 2.5e-4;
  auto f = [](double r, double q, double p) { return -p / r + q - q * q * q; };
  double r = 1e-4, q = a + r * r / 4 * (a - a * a * a), p = r / 2 * (a - a * a * a);
  double m = 0.0;
  while (r < r_stop) {
    const double k1q = p, k1p = f(r, q, p);
    const double k2q = p + h / 2 * k1p, k2p = f(r + h / 2, q + h / 2 * k1q, p + h / 2 * k1p);
    const double k3q = p + h / 2 * k2p, k3p = f(r + h / 2, q + h / 2 * k2q, p + h / 2 * k2p);
    const double k4q = p + h * k3p, k4p = f(r + h, q + h * k3q, p + h * k3p);
    const double qn = q + h / 6 * (k1q + 2 * k2q + 2 * k3q + k4q);
    p += h / 6 * (k1p + 2 * k2p + 2 * k3p + k4p);
    m += h / 2 * (q * q * r + qn * qn * (r + h));
    q = qn;
    r += h;
    if (q < 0) return -1;  // crossed: Q(0) too large
    if (p > 0) return 1;   // turned up: Q(0) too small
  }
  if (mass) *mass = 2 * M_PI * m;
  return 0;
}

double townes_mass_oracle() {
  double lo = 2.0, hi = 2.4;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (townes_shot(mid, 14.0, nullptr) < 0 ? hi : lo) = mid;
  }
  double m = 0.0;
  townes_shot(0.5 * (lo + hi), 10.0, &m);
  return m;
}

}  // namespace

TEST_CASE("closed form solves the d=1 ground state equation") {
  // Q'' = Q - Q^5 checked by central differences on the closed form itself.
  const double h = 2e-4;
  for (double x = 0.1; x < 8; x += 0.37) {
    const double qpp = (closed_form(x + h) - 2 * closed_form(x) + closed_form(x - h)) / (h * h);
    const double q = closed_form(x);
    CHECK(std::abs(qpp - (q - std::pow(q, 5))) < 1e-6);
  }
}

TEST_CASE("d=1 solver matches 3^(1/4) sech^(1/2)(2x)") {
  const auto& p = q1();
  CHECK(std::abs(p.q0 - std::pow(3.0, 0.25)) < 1e-9);
  double err = 0.0;
  for (std::size_t i = 0; i < p.q.size(); ++i) err = std::max(err, std::abs(p.q[i] - closed_form(p.r_grid[i])));
  CHECK(err < 1e-8);
}

TEST_CASE("d=2 Townes mass") {
  const double oracle = townes_mass_oracle();
  CHECK(std::abs(q2().mass_sq - oracle) < 1e-5);
  // Frozen from the oracle above and a doubled-density solve.
  CHECK(std::abs(q2().mass_sq - 11.7008965) < 1e-6);
  CHECK(std::abs(q2().q0 - 2.2062008647) < 1e-8);
}

TEST_CASE("profile invariants hold for every dimension") {
  for (int d = 1; d <= 15; ++d) {
    CAPTURE(d);
    const auto p = solve_ground_state(d);
    bool positive = true, decreasing = true;
    for (std::size_t i = 0; i < p.q.size(); ++i) {
      positive = positive && p.q[i] > 0;
      if (i > 0) decreasing = decreasing && p.dq[i] < 0;
    }
    CHECK(positive);
    CHECK(decreasing);
    double worst = 0.0;
    for (double r : ode_residual(p)) worst = std::max(worst, r);
    CHECK(worst < 1e-8 * std::max(1.0, std::pow(p.q0, 1.0 + 4.0 / d)));
    CHECK(p.q.back() < std::exp(-p.delta * p.r_max / 2) * p.q0);
    // Fitted on log q, so the r^{-(d-1)/2} prefactor adds about (d-1)/(2r).
    CHECK(p.delta > 0.95);
    CHECK(p.delta < 1.0 + (d - 1.0) / p.r_max);
    const auto n = profile_norms(p);
    CHECK(std::abs(pohozaev_energy(p)) < 1e-6 * n.grad_sq);
  }
}

TEST_CASE("grid refinement and quadrature agreement") {
  GroundStateOptions fine;
  fine.h = 0.0025;
  const auto pf = solve_ground_state(2, fine);
  CHECK(std::abs(pf.q0 - q2().q0) < 10 * 1e-10 * q2().q0 + 1e-9);
  std::vector<double> q2s(q2().q.size());
  for (std::size_t i = 0; i < q2s.size(); ++i) q2s[i] = q2().q[i] * q2().q[i];
  const double s = radial_integral(q2(), q2s, RadialRule::Simpson);
  const double t = radial_integral(q2(), q2s, RadialRule::TrapezoidEndCorrected);
  CHECK(std::abs(s - t) / s < 1e-8);
}

TEST_CASE("evaluate_radial") {
  const auto& p = q1();
  const auto at_nodes = evaluate_radial(p, {p.r_grid[0], p.r_grid[10], p.r_grid[777]});
  CHECK(at_nodes[0] == doctest::Approx(p.q0).epsilon(1e-15));
  CHECK(at_nodes[1] == doctest::Approx(p.q[10]).epsilon(1e-14));
  CHECK(at_nodes[2] == doctest::Approx(p.q[777]).epsilon(1e-14));
  // Beyond r_max: exponential extrapolation vs a solve on a larger domain.
  const auto wide = solve_ground_state(1, 1e-10, 60.0);
  const double far = evaluate_radial(p, {2 * p.r_max})[0];
  const double ref = evaluate_radial(wide, {2 * p.r_max})[0];
  CHECK(far / ref > 0.5);
  CHECK(far / ref < 2.0);
}

TEST_CASE("Gagliardo-Nirenberg equality at Q") {
  for (const auto* p : {&q1(), &q2()}) {
    const int d = p->d;
    const double cd = gn_sharp_constant(*p);
    CHECK(std::abs(cd * std::pow(p->mass_sq, 2.0 / d) - (d + 2.0) / d) < 1e-8 * (d + 2.0) / d);
  }
}

TEST_CASE("gradient ratio") {
  const auto& p = q1();
  double maxgrad = 0.0;
  for (double v : p.dq) maxgrad = std::max(maxgrad, std::abs(v));
  CHECK(gradient_ratio_sup(p, 1.0) == doctest::Approx(maxgrad));
  CHECK(gradient_ratio_sup(p, 0.25) >= gradient_ratio_sup(p, 0.5));
  // |Q'/Q| = tanh(2x) for the closed form, so the small-alpha sup tends to 1.
  const double small = gradient_ratio_sup(p, 1e-3);
  CHECK(small > 0.99);
  CHECK(small < std::pow(p.q0, 1e-3) + 1e-9);
}

TEST_CASE("profile CSV round trip") {
  const auto path = (std::filesystem::temp_directory_path() / "nlslab_profile_test.csv").string();
  write_profile_csv(q1(), path);
  const auto back = read_profile_csv(path);
  CHECK(back.d == 1);
  CHECK(back.q0 == q1().q0);
  CHECK(back.q.size() == q1().q.size());
  CHECK(back.q[123] == q1().q[123]);
  std::filesystem::remove(path);
}

TEST_CASE("preconditions") {
  CHECK_THROWS_AS(solve_ground_state(0), std::invalid_argument);
  CHECK_THROWS_AS(solve_ground_state(16), std::invalid_argument);
  CHECK_THROWS_AS(solve_ground_state(1, -1.0, 30.0), std::invalid_argument);
}

TEST_CASE("corrupted profile is rejected by the Pohozaev quadrature") {
  auto p = q1();
  for (std::size_t i = 0; i < p.dq.size(); ++i) p.dq[i] *= 1 + 0.5 * std::sin(3 * p.r_grid[i]);
  CHECK_THROWS_AS(pohozaev_energy(p), Error);
}
