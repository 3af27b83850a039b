// Acceptance run: one line per criterion, exit status 1 if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "nlslab/evolve.hpp"
#include "nlslab/fields.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/modulation.hpp"
#include "nlslab/spectral.hpp"

using namespace nlslab;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Cached ground states and spectral data for d = 1, 2.
const RadialProfile& profile(int d) {
  static std::vector<RadialProfile> cache(16);
  if (cache[static_cast<std::size_t>(d)].d == 0) cache[static_cast<std::size_t>(d)] = solve_ground_state(d);
  return cache[static_cast<std::size_t>(d)];
}
const SpectralData& spectral(int d) {
  static std::vector<SpectralData> cache(3);
  if (cache[static_cast<std::size_t>(d)].d == 0) cache[static_cast<std::size_t>(d)] = compute_spectral_data(profile(d));
  return cache[static_cast<std::size_t>(d)];
}

Outcome c1() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto p = solve_ground_state(1);
  const double secs = seconds_since(t0);
  double err = 0.0;
  for (std::size_t i = 0; i < p.q.size(); ++i)
    err = std::max(err, std::abs(p.q[i] - std::pow(3.0, 0.25) / std::sqrt(std::cosh(2 * p.r_grid[i]))));
  return {err < 1e-8 && secs < 1.0, fmt("sup|Q - 3^(1/4) sech^(1/2)(2x)| = %.2e (< 1e-8), runtime %.2f s (< 1 s)", err, secs)};
}

Outcome c2() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int worst_d = 0;
  for (int d = 1; d <= 15; ++d) {
    const auto& p = profile(d);
    const double r = std::abs(pohozaev_energy(p)) / profile_norms(p).grad_sq;
    if (r > worst) worst = r, worst_d = d;
  }
  const double secs = seconds_since(t0);
  return {worst < 1e-6 && secs < 30.0,
          fmt("max |E(Q)|/||grad Q||^2 = %.2e at d=%d (< 1e-6), runtime %.1f s (< 30 s)", worst, worst_d, secs)};
}

Outcome c3() {
  double eq_worst = 0.0;
  int failures = 0, trials = 0;
  for (int d = 1; d <= 2; ++d) {
    const auto& p = profile(d);
    const double cd = gn_sharp_constant(p);
    const double eq = std::abs(cd * std::pow(p.mass_sq, 2.0 / d) - (d + 2.0) / d) / ((d + 2.0) / d);
    eq_worst = std::max(eq_worst, eq);
    const GridSpec g = d == 1 ? GridSpec{1, 256, 30.0} : GridSpec{2, 64, 20.0};
    std::mt19937_64 rng(2024 + d);
    RandomFieldOptions rf;
    rf.center_spread = g.box / 10;
    for (int k = 0; k < 1000; ++k, ++trials)
      if (!gn_check(random_smooth_field(g, rng, rf), cd)) ++failures;
  }
  return {eq_worst < 1e-8 && failures == 0,
          fmt("equality at Q: %.2e (< 1e-8); inequality held on %d/%d random fields", eq_worst, trials - failures, trials)};
}

Outcome c4() {
  const auto& s1 = spectral(1);
  SectorOptions fine;
  fine.n = 1600;
  const double l2 = spectral(2).lambda_d;
  const double l2f = compute_spectral_data(profile(2), fine).lambda_d;
  const double e1 = std::abs(s1.lambda_d - 8.0);
  const double k1 = std::abs(s1.kernel_ell1);
  const double shift = std::abs(l2f - l2);
  return {e1 < 1e-5 && k1 < 1e-5 && shift < 1e-5,
          fmt("d=1: |lambda_1 - 8| = %.2e, |ell=1 kernel| = %.2e; d=2: lambda_2 = %.8f, doubling shift %.2e (all < 1e-5)",
              e1, k1, l2, shift)};
}

Outcome c5() {
  double worst = 0.0;
  std::string where;
  bool ok = true;
  for (int d : {1, 2, 3, 5, 8, 15}) {
    const auto rep = operator_identity_suite(profile(d), {}, 1e-5);
    for (const auto& e : rep.entries) {
      if (!e.expected_zero) continue;
      if (e.residual > worst) worst = e.residual, where = e.name + " d=" + std::to_string(d);
      ok = ok && e.residual < 1e-5;
    }
  }
  return {ok, fmt("worst relative residual %.2e (%s), limit 1e-5", worst, where.c_str())};
}

Outcome c6() {
  std::string detail;
  bool ok = true;
  for (int d = 1; d <= 2; ++d) {
    CoercivityOptions o;
    o.seed = 7;
    const auto r = coercivity_trials(spectral(d), profile(d), 1000, o);
    ok = ok && r.positive == r.trials;
    detail += fmt("d=%d: %d/%d positive, min %.4f; ", d, r.positive, r.trials, r.minimum);
  }
  return {ok, detail};
}

Outcome c7() {
  bool ok = true;
  std::string detail;
  for (int d = 1; d <= 2; ++d) {
    const ModulationBasis basis(profile(d), spectral(d));
    const GridSpec g = d == 1 ? GridSpec{1, 512, 40.0} : GridSpec{2, 256, 36.0};
    std::mt19937_64 rng(77 + d);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    auto uni = [&](double a, double b) { return a + (b - a) * u01(rng); };
    double worst_param = 0.0, worst_ratio = 0.0;
    for (int k = 0; k < 100; ++k) {
      SolitonParams fam;
      fam.lambda = uni(0.85, 1.2);
      fam.gamma = uni(0.0, 2 * std::numbers::pi);
      for (int j = 0; j < d; ++j) fam.x0[j] = uni(-2, 2), fam.xi[j] = uni(-0.5, 0.5);
      const auto truth = decomposition_of_soliton(fam, 0.0, d);
      SolitonParams guess = truth;
      guess.lambda *= 1 + uni(-0.05, 0.05);
      guess.gamma += uni(-0.1, 0.1);
      for (int j = 0; j < d; ++j) guess.x0[j] += uni(-0.1, 0.1), guess.xi[j] += uni(-0.05, 0.05);
      DecomposeOptions o;
      o.build_epsilon = false;
      const auto dec = decompose(synthesize_soliton(profile(d), fam, g), basis, guess, o);
      double e = std::abs(dec.params.lambda - truth.lambda);
      e = std::max(e, std::abs(std::remainder(dec.params.gamma - truth.gamma, 2 * std::numbers::pi)));
      for (int j = 0; j < d; ++j)
        e = std::max({e, std::abs(dec.params.x0[j] - truth.x0[j]), std::abs(dec.params.xi[j] - truth.xi[j])});
      worst_param = std::max(worst_param, e);
    }
    RandomFieldOptions rf;
    rf.center_spread = 1.0;
    rf.cutoff_min = 0.03;
    rf.cutoff_max = 0.15;
    rf.width_min = 0.7;
    rf.width_max = 2.0;
    for (int k = 0; k < 100; ++k) {
      SolitonParams fam;
      fam.lambda = uni(0.9, 1.1);
      fam.gamma = uni(0.0, 2 * std::numbers::pi);
      for (int j = 0; j < d; ++j) fam.x0[j] = uni(-1, 1), fam.xi[j] = uni(-0.3, 0.3);
      auto u = synthesize_soliton(profile(d), fam, g);
      const auto pert = random_smooth_field(g, rng, rf);
      const double eta = uni(0.005, 0.1) * basis.q_norm() / std::sqrt(mass(pert));
      for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] += eta * pert.values[i];
      const auto dec = decompose(u, basis, decomposition_of_soliton(fam, 0.0, d));
      worst_ratio = std::max(worst_ratio, dec.distance / dec.proximity);
    }
    ok = ok && worst_param < 1e-6 && worst_ratio <= 3.0;
    detail += fmt("d=%d: max param error %.2e (< 1e-6), max ||eps||/proximity %.3f (<= 3); ", d, worst_param, worst_ratio);
  }
  return {ok, detail};
}

Outcome c8() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto& p = profile(1);
  const GridSpec g{1, 512, 30.0};
  EvolveConfig cfg;  // dt 1e-3, t_end 1
  const auto res = run(synthesize_soliton(p, {}, g), cfg, {}, true);
  const ModulationBasis basis(p, spectral(1));
  const auto tr = track(res.snapshots, basis);
  double max_eps = 0.0;
  for (const auto& s : tr.samples) max_eps = std::max(max_eps, s.eps_l2);
  const auto drift = conservation_report(res.log);
  const double secs = seconds_since(t0);
  const bool ok = drift.mass_drift < 1e-12 && drift.energy_drift < 1e-8 && max_eps < 1e-6 && secs < 60;
  return {ok, fmt("mass drift %.2e (< 1e-12), energy drift %.2e (< 1e-8), max ||eps|| %.2e (< 1e-6), runtime %.1f s",
                  drift.mass_drift, drift.energy_drift, max_eps, secs)};
}

Outcome c9() {
  const auto& p = profile(1);
  const GridSpec g{1, 1024, 40.0};
  const auto u0 = pseudoconformal_transform(synthesize_soliton(p, {}, g, 1.0));
  EvolveConfig cfg;
  cfg.t_end = 0.25;
  cfg.dealias = true;
  const auto res = run(u0, cfg, {}, true);
  const ModulationBasis basis(p, spectral(1));
  DecomposeOptions o;
  o.alpha = 0.7;
  SolitonParams guess;
  guess.gamma = 1.0;
  const auto tr = track(res.snapshots, basis, guess, o);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(tr.samples.size());
  for (const auto& s : tr.samples) {
    const double x = std::log(s.t), y = std::log(s.lambda);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  double gmin = INFINITY, gmax = 0, gsum = 0;
  for (const auto& row : res.log) {
    const double v = std::sqrt(row.grad_sq) * row.t;
    gmin = std::min(gmin, v), gmax = std::max(gmax, v), gsum += v;
  }
  const double gvar = (gmax - gmin) / (gsum / static_cast<double>(res.log.size()));
  const bool ok = std::abs(slope - 1) < 0.02 && gvar < 0.05;
  return {ok, fmt("(a) log-log slope of lambda(t) %.4f, error %.2e (< 2e-2); (b) spread of ||grad u||*t %.2f%% (< 5%%)",
                  slope, std::abs(slope - 1), 100 * gvar)};
}

FieldState gaussian(const GridSpec& g) {
  FieldState u(g, 0.0);
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const auto x = u.coords(i);
    u.values[i] = std::exp(-0.5 * (x[0] * x[0] + (g.d == 2 ? x[1] * x[1] : 0.0)));
  }
  return u;
}

Outcome c10() {
  const GridSpec g{1, 512, 30.0};
  EvolveConfig cfg;
  const auto res = run(gaussian(g), cfg, {}, false);
  double worst = 0.0;
  for (double e : virial_identity_errors(res.log)) worst = std::max(worst, e);
  return {worst < 0.02, fmt("max per-interval |dV/dt - 4E|/|E| = %.2e (< 2e-2) over %zu intervals", worst,
                            res.log.size() - 1)};
}

Outcome c11() {
  const auto& p = profile(1);
  const ModulationBasis basis(p, spectral(1));
  const GridSpec g{1, 512, 40.0};
  auto series = [&](const SolitonParams& fam) {
    std::vector<FieldState> traj;
    for (int k = 0; k <= 50; ++k) traj.push_back(synthesize_soliton(p, fam, g, 0.02 * k));
    return modulation_rates(track(traj, basis, decomposition_of_soliton(fam, 0.0, 1)));
  };
  SolitonParams boosted;
  boosted.lambda = 1.1;
  boosted.xi[0] = 0.3;
  const auto rb = series(boosted);
  const auto rs = series(SolitonParams{});
  double xmax = 0, lmax = 0;
  for (double v : rb.x_rate) xmax = std::max(xmax, std::abs(v));
  for (double v : rs.lambda_rate) lmax = std::max(lmax, std::abs(v));
  return {xmax < 1e-6 && lmax < 1e-8,
          fmt("boosted: max |x_s/lambda + 2 xi| = %.2e (< 1e-6); exact soliton: max |lambda_s/lambda| = %.2e (< 1e-8)",
              xmax, lmax)};
}

Outcome c12() {
  struct Preset {
    const char* name;
    FieldState u0;
    EvolveConfig cfg;
  };
  std::vector<Preset> presets;
  EvolveConfig base;
  base.t_end = 0.5;
  presets.push_back({"soliton d=1", synthesize_soliton(profile(1), {}, GridSpec{1, 512, 30.0}), base});
  presets.push_back({"gaussian d=1", gaussian(GridSpec{1, 512, 30.0}), base});
  presets.push_back({"soliton d=2", synthesize_soliton(profile(2), {}, GridSpec{2, 128, 32.0}), base});
  bool ok = true;
  std::string detail;
  for (const auto& pr : presets) {
    const auto c = self_convergence(pr.u0, pr.cfg);
    ok = ok && c.ratio >= 3 && c.ratio <= 5;
    detail += fmt("%s %.3f; ", pr.name, c.ratio);
  }
  return {ok, "error ratios dt : dt/2 in [3,5]: " + detail};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"ground state d=1", c1},       {"Pohozaev d=1..15", c2},     {"Gagliardo-Nirenberg", c3},
      {"spectrum", c4},               {"operator identities", c5},  {"coercivity", c6},
      {"decomposition round trip", c7}, {"soliton persistence", c8}, {"pseudoconformal blowup", c9},
      {"virial identity", c10},       {"modulation rates", c11},    {"order-2 splitting", c12},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] criterion %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - static_cast<std::size_t>(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
