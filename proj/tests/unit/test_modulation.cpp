#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "nlslab/error.hpp"
#include "nlslab/modulation.hpp"

using namespace nlslab;

namespace {

const RadialProfile& prof(int d) {
  static std::vector<RadialProfile> cache(3);
  auto& p = cache[static_cast<std::size_t>(d)];
  if (p.d == 0) p = solve_ground_state(d);
  return p;
}

const ModulationBasis& basis(int d) {
  static std::vector<SpectralData> spec(3);
  static std::vector<std::unique_ptr<ModulationBasis>> cache(3);
  const auto i = static_cast<std::size_t>(d);
  if (!cache[i]) {
    spec[i] = compute_spectral_data(prof(d));
    cache[i] = std::make_unique<ModulationBasis>(prof(d), spec[i]);
  }
  return *cache[i];
}

double max_abs(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double param_error(const SolitonParams& a, const SolitonParams& b, int d) {
  double e = std::max(std::abs(a.lambda - b.lambda), std::abs(std::remainder(a.gamma - b.gamma, 2 * std::numbers::pi)));
  for (int j = 0; j < d; ++j) e = std::max({e, std::abs(a.x0[j] - b.x0[j]), std::abs(a.xi[j] - b.xi[j])});
  return e;
}

// Closed forms in d = 1.
double q1(double x) { return std::pow(3.0 / std::pow(std::cosh(2 * x), 2), 0.25); }
double dq1(double x) { return -q1(x) * std::tanh(2 * x); }
double chi1(double x) { return std::pow(std::cosh(2 * x), -1.5); }

}  // namespace

TEST_CASE("Q decomposes to the identity") {
  for (int d = 1; d <= 2; ++d) {
    const GridSpec g = d == 1 ? GridSpec{1, 512, 30.0} : GridSpec{2, 128, 32.0};
    const auto dec = decompose(synthesize_soliton(prof(d), {}, g), basis(d));
    CHECK(param_error(dec.params, SolitonParams{}, d) < 1e-9);
    CHECK(dec.distance < 1e-8);
    CHECK(dec.iterations <= 2);
  }
}

TEST_CASE("group elements are recovered") {
  const GridSpec g{1, 1024, 50.0};
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u01(0, 1);
  for (int k = 0; k < 20; ++k) {
    SolitonParams fam;
    fam.lambda = 0.85 + 0.35 * u01(rng);
    fam.gamma = 2 * std::numbers::pi * u01(rng);
    fam.x0[0] = 4 * u01(rng) - 2;
    fam.xi[0] = u01(rng) - 0.5;
    const auto truth = decomposition_of_soliton(fam, 0.0, 1);
    SolitonParams guess = truth;
    guess.lambda *= 1.03;
    guess.x0[0] += 0.05;
    const auto dec = decompose(synthesize_soliton(prof(1), fam, g), basis(1), guess);
    CHECK(param_error(dec.params, truth, 1) < 1e-8);
    CHECK(dec.distance < 1e-8);
  }
}

TEST_CASE("an orthogonal perturbation of Q is returned as epsilon") {
  const GridSpec g{1, 512, 40.0};
  const auto& b = basis(1);
  FieldState pert(g, 0.0);
  for (std::size_t i = 0; i < pert.values.size(); ++i) {
    const double x = pert.coords(i)[0];
    pert.values[i] = cplx(std::exp(-x * x) * (1 + x), 0.5 * x * x * std::exp(-0.5 * x * x));
  }
  // remove the four directions; they are mutually orthogonal by parity and phase
  std::vector<std::vector<cplx>> dirs(4, std::vector<cplx>(pert.values.size()));
  for (std::size_t i = 0; i < pert.values.size(); ++i) {
    const double x = pert.coords(i)[0];
    const double chi = b.chi(std::abs(x));
    const double dq = b.q().derivative(std::abs(x)) * (x < 0 ? -1 : 1);
    dirs[0][i] = chi;
    dirs[1][i] = cplx(0, chi);
    dirs[2][i] = dq;
    dirs[3][i] = cplx(0, dq);
  }
  for (const auto& e : dirs) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < e.size(); ++i) {
      num += (std::conj(e[i]) * pert.values[i]).real();
      den += std::norm(e[i]);
    }
    for (std::size_t i = 0; i < e.size(); ++i) pert.values[i] -= num / den * e[i];
  }
  const double scale = 0.01 / std::sqrt(mass(pert));
  auto u = synthesize_soliton(prof(1), {}, g);
  for (std::size_t i = 0; i < u.values.size(); ++i) u.values[i] += scale * pert.values[i];
  const auto dec = decompose(u, b);
  CHECK(dec.iterations <= 8);
  CHECK(dec.distance > 0.009);
  CHECK(dec.distance < 0.011);
  CHECK(max_abs(dec.residuals) < 1e-9 * b.q_norm());
  CHECK(max_abs(orthogonality_residuals(dec, b)) < 1e-9 * b.q_norm());
  CHECK(param_error(dec.params, SolitonParams{}, 1) < 1e-6);
}

TEST_CASE("orthogonality residuals pick out single directions") {
  const GridSpec g{1, 1024, 40.0};
  const auto& b = basis(1);
  FieldState chi(g, 0.0), iqx(g, 0.0);
  for (std::size_t i = 0; i < chi.values.size(); ++i) {
    const double x = chi.coords(i)[0];
    chi.values[i] = b.chi(std::abs(x));
    iqx.values[i] = cplx(0, dq1(x));
  }
  const auto r1 = orthogonality_residuals(chi, b);
  CHECK(r1[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(std::abs(r1[1]) < 1e-12);
  CHECK(std::abs(r1[2]) < 1e-12);
  CHECK(std::abs(r1[3]) < 1e-12);
  const auto r2 = orthogonality_residuals(iqx, b);
  CHECK(r2[3] == doctest::Approx(b.grad_q_sq()).epsilon(1e-6));
  CHECK(std::abs(r2[0]) < 1e-12);
  CHECK(std::abs(r2[1]) < 1e-12);
  CHECK(std::abs(r2[2]) < 1e-12);
}

TEST_CASE("Jacobian at Q matches the reference and closed forms") {
  const auto& b = basis(1);
  const auto ref = reference_jacobian(b);
  const auto jac = modulation_jacobian(synthesize_soliton(prof(1), {}, GridSpec{1, 512, 30.0}), b, {});
  CHECK((jac - ref).cwiseAbs().maxCoeff() < 1e-8);
  // independent midpoint quadrature of the closed forms
  const double h = 1e-3, L = 20.0;
  double chi2 = 0, q2 = 0, qx2 = 0, chi_q = 0, chi_lq = 0;
  for (double x = -L + h / 2; x < L; x += h) {
    chi2 += chi1(x) * chi1(x) * h;
    q2 += q1(x) * q1(x) * h;
    qx2 += dq1(x) * dq1(x) * h;
    chi_q += chi1(x) * q1(x) * h;
    chi_lq += chi1(x) * (0.5 * q1(x) + x * dq1(x)) * h;
  }
  const double nc = 1.0 / std::sqrt(chi2);
  CHECK(ref(0, 0) == doctest::Approx(nc * chi_lq).epsilon(1e-6));
  CHECK(ref(1, 1) == doctest::Approx(nc * chi_q).epsilon(1e-6));
  CHECK(ref(2, 2) == doctest::Approx(qx2).epsilon(1e-6));
  CHECK(ref(3, 3) == doctest::Approx(-0.5 * q2).epsilon(1e-6));
  CHECK(-0.5 * q2 == doctest::Approx(-std::sqrt(3.0) * std::numbers::pi / 4).epsilon(1e-8));
}

TEST_CASE("tracking an exact soliton") {
  const GridSpec g{1, 512, 40.0};
  SolitonParams fam;
  fam.lambda = 1.1;
  fam.xi[0] = 0.2;
  std::vector<FieldState> traj;
  for (int k = 0; k < 10; ++k) traj.push_back(synthesize_soliton(prof(1), fam, g, 0.05 * k));
  const auto tr = track(traj, basis(1), decomposition_of_soliton(fam, 0.0, 1));
  REQUIRE(tr.samples.size() == 10);
  for (std::size_t k = 0; k < tr.samples.size(); ++k) {
    const auto& s = tr.samples[k];
    const auto truth = decomposition_of_soliton(fam, s.t, 1);
    CHECK(std::abs(s.lambda - truth.lambda) < 1e-8);
    CHECK(std::abs(s.x[0] - truth.x0[0]) < 1e-8);
    CHECK(std::abs(s.xi[0] - truth.xi[0]) < 1e-8);
    // constant lambda: s = t / lambda^2 exactly under the trapezoid rule
    CHECK(s.s == doctest::Approx(s.t / (truth.lambda * truth.lambda)).epsilon(1e-8));
    if (k > 0) {
      CHECK(s.s > tr.samples[k - 1].s);
      // gamma_s = -1 - |xi|^2 in the decomposition variables
      CHECK((s.gamma - tr.samples[k - 1].gamma) / (s.s - tr.samples[k - 1].s) ==
            doctest::Approx(-1.0 - fam.xi[0] * fam.xi[0] / (fam.lambda * fam.lambda)).epsilon(1e-6));
    }
  }
  const auto one = track({traj.front()}, basis(1), decomposition_of_soliton(fam, 0.0, 1));
  CHECK(one.samples.size() == 1);
  CHECK(one.samples[0].s == 0.0);
}

TEST_CASE("s is signed with the direction of time") {
  const GridSpec g{1, 512, 40.0};
  std::vector<FieldState> traj;
  for (int k = 0; k < 5; ++k) traj.push_back(synthesize_soliton(prof(1), {}, g, -0.1 * k));
  const auto tr = track(traj, basis(1));
  for (std::size_t k = 1; k < tr.samples.size(); ++k) CHECK(tr.samples[k].s < tr.samples[k - 1].s);
  CHECK(tr.samples.back().s == doctest::Approx(-0.4).epsilon(1e-9));
}

TEST_CASE("modulation rates of exact solitons") {
  const GridSpec g{1, 512, 40.0};
  SolitonParams fam;
  fam.lambda = 1.1;
  fam.xi[0] = 0.3;
  std::vector<FieldState> traj;
  for (int k = 0; k <= 20; ++k) traj.push_back(synthesize_soliton(prof(1), fam, g, 0.02 * k));
  const auto r = modulation_rates(track(traj, basis(1), decomposition_of_soliton(fam, 0.0, 1)));
  CHECK(max_abs(r.lambda_rate) < 1e-8);
  CHECK(max_abs(r.xi_rate) < 1e-8);
  CHECK(max_abs(r.x_rate) < 1e-6);
  CHECK(max_abs(r.gamma_rate) < 1e-6);
  CHECK(r.avg_eps < 1e-8);
  // halving the sampling leaves the averages unchanged
  std::vector<FieldState> coarse;
  for (std::size_t k = 0; k < traj.size(); k += 2) coarse.push_back(traj[k]);
  const auto rc = modulation_rates(track(coarse, basis(1), decomposition_of_soliton(fam, 0.0, 1)));
  CHECK(std::abs(rc.avg_gamma - r.avg_gamma) < 1e-6);
}

TEST_CASE("rate preconditions") {
  const GridSpec g{1, 512, 40.0};
  std::vector<FieldState> traj{synthesize_soliton(prof(1), {}, g, 0.0), synthesize_soliton(prof(1), {}, g, 0.05)};
  auto check_sparse = [&](const ModulationTrack& tr, double max_ds) {
    try {
      modulation_rates(tr, max_ds);
      FAIL("expected TooSparse");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TooSparse);
    }
  };
  check_sparse(track(traj, basis(1)), 0.1);
  traj.push_back(synthesize_soliton(prof(1), {}, g, 0.2));  // gap of 0.15 in s
  check_sparse(track(traj, basis(1)), 0.1);
}

TEST_CASE("fields far from the family are refused") {
  const GridSpec g{1, 512, 40.0};
  SolitonParams far;
  far.x0[0] = 6.0;
  try {
    decompose(synthesize_soliton(prof(1), far, g), basis(1));
    FAIL("expected NotInBasin");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInBasin);
  }
  std::vector<FieldState> traj;
  for (int k = 0; k < 3; ++k) traj.push_back(synthesize_soliton(prof(1), {}, g, 0.01 * k));
  traj.push_back(synthesize_soliton(prof(1), far, g, 0.03));
  try {
    track(traj, basis(1));
    FAIL("expected BasinLost");
  } catch (const BasinLost& e) {
    CHECK(e.code() == ErrorCode::BasinLost);
    CHECK(e.index() == 3);
    CHECK(e.time() == doctest::Approx(0.03));
  }
}
