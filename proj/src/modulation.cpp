#include "nlslab/modulation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nlslab/csv.hpp"
#include "nlslab/error.hpp"

namespace nlslab {

namespace {

constexpr double kTwoPi = 2 * std::numbers::pi;

double wrap_2pi(double g) {
  g = std::fmod(g, kTwoPi);
  return g < 0 ? g + kTwoPi : g;
}

double wrap_pi(double g) {
  g = std::fmod(g + std::numbers::pi, kTwoPi);
  if (g < 0) g += kTwoPi;
  return g - std::numbers::pi;
}

// Complex pulled-back integrals A[g] = int conj(a(y)) e^{-i gamma - i x.xi}
// lambda^{-d/2} g(x) dy, x = (y - x~)/lambda, for the functions the
// conditions and their parameter derivatives need.
struct Moments {
  cplx chi{}, chi_xg{};
  cplx chi_x[2]{}, chi_d[2]{};
  cplx qx[2]{}, qx_xg[2]{};
  cplx qx_x[2][2]{}, qx_d[2][2]{};
  cplx x2q{}, lam_q{};
};

struct Evaluation {
  Moments mu;  // moments of u (Jacobian)
  Moments mr;  // moments of r = u - T_p^{-1} Q (residuals)
  double r_norm_sq = 0.0;
};

Evaluation evaluate(const FieldState& u, const ModulationBasis& b, const SolitonParams& p, bool jacobian) {
  const int d = u.d();
  const double lam = p.lambda, box = u.box();
  const double amp = std::pow(lam, -d / 2.0);
  const double cell = u.grid.cell();
  const double q2_0 = b.q().second_derivative(0.0);
  Evaluation ev;
  for (std::size_t idx = 0; idx < u.values.size(); ++idx) {
    const auto y = u.coords(idx);
    double x[2] = {0.0, 0.0};
    double r2 = 0.0, xxi = 0.0;
    for (int k = 0; k < d; ++k) {
      double dy = y[static_cast<std::size_t>(k)] - p.x0[static_cast<std::size_t>(k)];
      dy -= box * std::round(dy / box);
      x[k] = dy / lam;
      r2 += x[k] * x[k];
      xxi += x[k] * p.xi[static_cast<std::size_t>(k)];
    }
    const double r = std::sqrt(r2);
    const cplx ph = amp * std::polar(1.0, -p.gamma - xxi);
    const double qv = b.q().value(r);
    const double dqv = b.q().derivative(r);
    const double chi = b.chi(r);
    const cplx uy = u.values[idx];
    const cplx ry = uy - ph * qv;
    ev.r_norm_sq += std::norm(ry) * cell;

    const double qx_over = r > 1e-10 ? dqv / r : q2_0;  // Q'/r
    const cplx wr = std::conj(ry) * ph * cell;
    ev.mr.chi += wr * chi;
    for (int j = 0; j < d; ++j) ev.mr.qx[j] += wr * (qx_over * x[j]);
    ev.mr.x2q += wr * (r2 * qv);
    ev.mr.lam_q += wr * (0.5 * d * qv + r * dqv);
    if (!jacobian) continue;

    const double dchi = b.dchi(r);
    const double d2q = r > 1e-10 ? b.q().second_derivative(r) : q2_0;
    const double chi_over = r > 1e-10 ? dchi / r : 0.0;
    const double cross = r > 1e-10 ? (d2q - qx_over) / r2 : 0.0;
    const cplx wu = std::conj(uy) * ph * cell;
    Moments& m = ev.mu;
    m.chi += wu * chi;
    m.chi_xg += wu * (r * dchi);
    for (int k = 0; k < d; ++k) {
      m.chi_x[k] += wu * (x[k] * chi);
      m.chi_d[k] += wu * (chi_over * x[k]);
    }
    for (int j = 0; j < d; ++j) {
      const double qxj = qx_over * x[j];
      m.qx[j] += wu * qxj;
      m.qx_xg[j] += wu * (d2q * x[j]);
      for (int k = 0; k < d; ++k) {
        m.qx_x[j][k] += wu * (x[k] * qxj);
        m.qx_d[j][k] += wu * (cross * x[j] * x[k] + (j == k ? qx_over : 0.0));
      }
    }
  }
  return ev;
}

std::vector<double> residual_vector(const Moments& m, int d) {
  std::vector<double> f(static_cast<std::size_t>(2 * d + 2));
  f[0] = m.chi.real();
  f[1] = -m.chi.imag();  // Re(i A)
  for (int j = 0; j < d; ++j) {
    f[static_cast<std::size_t>(2 + j)] = m.qx[j].real();
    f[static_cast<std::size_t>(2 + d + j)] = -m.qx[j].imag();
  }
  return f;
}

Eigen::MatrixXd jacobian_from(const Moments& m, int d, const SolitonParams& p) {
  const int n = 2 * d + 2;
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(n, n);
  const cplx I(0.0, 1.0);
  auto re = [](cplx c, cplx a) { return std::real(c * a); };
  const double lam = p.lambda;
  // One row per (base function, coefficient c).
  auto fill = [&](int row, cplx c, cplx a_g, const cplx* a_xg, const cplx* a_dg, cplx a_xgrad) {
    j(row, 1) = re(-I * c, a_g);
    double xi_term = 0.0;
    for (int k = 0; k < d; ++k) {
      const double xk = p.xi[static_cast<std::size_t>(k)];
      j(row, 2 + d + k) = re(-I * c, a_xg[k]);
      j(row, 2 + k) = (-re(c, a_dg[k]) - xk * re(-I * c, a_g)) / lam;
      xi_term += xk * re(-I * c, a_xg[k]);
    }
    j(row, 0) = (-0.5 * d * re(c, a_g) - re(c, a_xgrad) - xi_term) / lam;
  };
  fill(0, 1.0, m.chi, m.chi_x, m.chi_d, m.chi_xg);
  fill(1, I, m.chi, m.chi_x, m.chi_d, m.chi_xg);
  for (int q = 0; q < d; ++q) {
    fill(2 + q, 1.0, m.qx[q], m.qx_x[q], m.qx_d[q], m.qx_xg[q]);
    fill(2 + d + q, I, m.qx[q], m.qx_x[q], m.qx_d[q], m.qx_xg[q]);
  }
  return j;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double norm2(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x * x;
  return std::sqrt(m);
}

SolitonParams shifted(const SolitonParams& p, const Eigen::VectorXd& delta, double step, int d) {
  SolitonParams q = p;
  q.lambda += step * delta[0];
  q.gamma += step * delta[1];
  for (int k = 0; k < d; ++k) {
    q.x0[static_cast<std::size_t>(k)] += step * delta[2 + k];
    q.xi[static_cast<std::size_t>(k)] += step * delta[2 + d + k];
  }
  return q;
}

}  // namespace

ModulationBasis::ModulationBasis(const RadialProfile& profile, const SpectralData& spectral)
    : d_(profile.d), q_(profile), chi0_(spectral.chi0), lambda_d_(spectral.lambda_d) {
  if (spectral.d != profile.d) throw std::invalid_argument("ModulationBasis: dimension mismatch");
  {
    const double hf = chi0_.h() / 8;
    const auto m = static_cast<std::size_t>(std::ceil(chi0_.extent() / hf)) + 1;
    std::vector<double> v(m), dv(m);
    for (std::size_t i = 0; i < m; ++i) {
      v[i] = chi0_.value(hf * static_cast<double>(i));
      dv[i] = chi0_.derivative(hf * static_cast<double>(i));
    }
    chi_ = UniformHermite(0.0, hf, std::move(v), std::move(dv));
  }
  const auto nrm = profile_norms(profile);
  q_norm_ = std::sqrt(nrm.mass_sq);
  grad_q_sq_ = nrm.grad_sq;
  const double h = chi0_.h() / 4;
  auto m = static_cast<std::size_t>(std::ceil(chi0_.extent() / h));
  if (m % 2) ++m;
  double acc = 0.0;
  for (std::size_t i = 0; i <= m; ++i) {
    const double r = h * static_cast<double>(i);
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * q_.value(r) * chi0_.value(r) * std::pow(r, d_ - 1);
  }
  q_chi0_ = sphere_area(d_) * acc * h / 3.0;
}

SolitonParams decomposition_of_soliton(const SolitonParams& f, double t, int d) {
  SolitonParams p;
  p.lambda = 1.0 / f.lambda;
  double xi2 = 0.0, xdot = 0.0;
  for (int k = 0; k < d; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    p.x0[kk] = 2 * t * f.xi[kk] - f.x0[kk] / f.lambda;
    p.xi[kk] = -f.xi[kk] / f.lambda;
    xi2 += f.xi[kk] * f.xi[kk];
    xdot += p.x0[kk] * f.xi[kk];
  }
  p.gamma = wrap_2pi(f.gamma + t * xi2 - f.lambda * f.lambda * t - xdot);
  return p;
}

double proximity(const FieldState& u, const ModulationBasis& basis, const SolitonParams& guess) {
  return std::sqrt(evaluate(u, basis, guess, false).r_norm_sq);
}

Eigen::MatrixXd modulation_jacobian(const FieldState& u, const ModulationBasis& basis, const SolitonParams& p) {
  return jacobian_from(evaluate(u, basis, p, true).mu, u.d(), p);
}

Eigen::MatrixXd reference_jacobian(const ModulationBasis& b) {
  const int d = b.d();
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(2 * d + 2, 2 * d + 2);
  j(0, 0) = 2.0 / b.lambda_d() * b.q_chi0();
  j(1, 1) = b.q_chi0();
  for (int k = 0; k < d; ++k) {
    j(2 + k, 2 + k) = b.grad_q_sq() / d;
    j(2 + d + k, 2 + d + k) = -0.5 * b.q_norm() * b.q_norm();
  }
  return j;
}

Decomposition decompose(const FieldState& u, const ModulationBasis& basis, const SolitonParams& guess,
                        const DecomposeOptions& opts) {
  const int d = u.d();
  if (d != basis.d()) throw std::invalid_argument("decompose: dimension mismatch");
  if (!(guess.lambda > 0)) throw std::invalid_argument("decompose: guess lambda must be positive");
  const double qn = basis.q_norm();
  SolitonParams p = guess;
  Evaluation ev = evaluate(u, basis, p, false);
  Decomposition dec;
  dec.proximity = std::sqrt(ev.r_norm_sq);
  if (dec.proximity > opts.alpha * qn)
    throw Error(ErrorCode::NotInBasin, "proximity " + std::to_string(dec.proximity) + " exceeds " +
                                           std::to_string(opts.alpha) + "*||Q||");
  std::vector<double> f = residual_vector(ev.mr, d);
  int it = 0;
  while (max_abs(f) >= opts.tol_orth * qn) {
    if (++it > opts.max_iter) throw Error(ErrorCode::NewtonStalled, "no convergence in max_iter steps");
    Eigen::MatrixXd jac = jacobian_from(evaluate(u, basis, p, true).mu, d, p);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jac);
    if (!lu.isInvertible()) lu.compute(reference_jacobian(basis));
    const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(f.data(), static_cast<Eigen::Index>(f.size()));
    const Eigen::VectorXd delta = lu.solve(rhs);
    const double f_now = norm2(f);
    double step = 1.0;
    bool accepted = false;
    for (int h = 0; h <= opts.max_halvings; ++h, step *= 0.5) {
      const SolitonParams trial = shifted(p, delta, step, d);
      if (!(trial.lambda > 0)) continue;
      Evaluation ev_try = evaluate(u, basis, trial, false);
      auto f_try = residual_vector(ev_try.mr, d);
      if (norm2(f_try) < f_now) {
        p = trial;
        ev = std::move(ev_try);
        f = std::move(f_try);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      throw Error(ErrorCode::NewtonStalled, "residual " + std::to_string(f_now) + " not reduced after damping");
    }
  }
  dec.iterations = it;
  dec.residuals = f;
  dec.distance = std::sqrt(ev.r_norm_sq);
  dec.eps_x2q = ev.mr.x2q.real();
  dec.eps2_lambda_q = -ev.mr.lam_q.imag();
  p.gamma = wrap_2pi(p.gamma);
  dec.params = p;

  if (opts.build_epsilon) {
    if (p.lambda > 1.0) {
      const double hb = high_band_fraction(u, 0.9 / p.lambda);
      if (hb > 1e-10)
        throw Error(ErrorCode::GridResample, "field content above Nyquist/lambda: " + csv::format(hb));
    }
    const auto ax = u.grid.axis();
    std::vector<double> p0(ax.size()), p1(ax.size());
    for (std::size_t i = 0; i < ax.size(); ++i) {
      p0[i] = p.lambda * ax[i] + p.x0[0];
      p1[i] = p.lambda * ax[i] + p.x0[1];
    }
    FieldState eps(u.grid, u.t);
    const auto tu = fourier_resample(u, p0, p1);
    const double amp = std::pow(p.lambda, d / 2.0);
    for (std::size_t idx = 0; idx < eps.values.size(); ++idx) {
      const auto x = eps.coords(idx);
      const double xxi = x[0] * p.xi[0] + (d == 2 ? x[1] * p.xi[1] : 0.0);
      const double r = d == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
      eps.values[idx] = amp * std::polar(1.0, p.gamma + xxi) * tu[idx] - basis.q().value(r);
    }
    dec.epsilon = std::move(eps);
  }
  return dec;
}

std::vector<double> orthogonality_residuals(const FieldState& eps, const ModulationBasis& b) {
  const int d = eps.d();
  std::vector<double> out(static_cast<std::size_t>(2 * d + 2), 0.0);
  const double cell = eps.grid.cell();
  const double q2_0 = b.q().second_derivative(0.0);
  for (std::size_t idx = 0; idx < eps.values.size(); ++idx) {
    const auto x = eps.coords(idx);
    const double r = d == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
    const cplx w = std::conj(eps.values[idx]) * cell;
    const double chi = b.chi(r);
    out[0] += (w * chi).real();
    out[1] += (w * cplx(0, chi)).real();
    const double over = r > 1e-10 ? b.q().derivative(r) / r : q2_0;
    for (int j = 0; j < d; ++j) {
      const double g = over * x[static_cast<std::size_t>(j)];
      out[static_cast<std::size_t>(2 + j)] += (w * g).real();
      out[static_cast<std::size_t>(2 + d + j)] += (w * cplx(0, g)).real();
    }
  }
  return out;
}

std::vector<double> orthogonality_residuals(const Decomposition& dec, const ModulationBasis& basis) {
  return orthogonality_residuals(dec.epsilon, basis);
}

ModulationTrack track(const std::vector<FieldState>& traj, const ModulationBasis& basis, const SolitonParams& guess,
                      const DecomposeOptions& opts) {
  ModulationTrack tr;
  tr.d = basis.d();
  DecomposeOptions o = opts;
  o.build_epsilon = false;
  SolitonParams p = guess;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    Decomposition dec;
    try {
      dec = decompose(traj[k], basis, p, o);
    } catch (const Error& e) {
      throw BasinLost(k, traj[k].t, e.what());
    }
    TrackSample s{};
    s.t = traj[k].t;
    s.lambda = dec.params.lambda;
    s.gamma = k == 0 ? dec.params.gamma : p.gamma + wrap_pi(dec.params.gamma - p.gamma);
    s.x = dec.params.x0;
    s.xi = dec.params.xi;
    s.eps_l2 = dec.distance;
    s.residual_max = max_abs(dec.residuals);
    s.eps_x2q = dec.eps_x2q;
    s.eps2_lambda_q = dec.eps2_lambda_q;
    s.iterations = dec.iterations;
    if (k == 0) {
      s.s = 0.0;
    } else {
      const auto& prev = tr.samples.back();
      s.s = prev.s + (s.t - prev.t) * 0.5 * (1.0 / (prev.lambda * prev.lambda) + 1.0 / (s.lambda * s.lambda));
    }
    tr.samples.push_back(s);
    p = dec.params;
    p.gamma = s.gamma;
  }
  return tr;
}

namespace {

// Second-order derivative of samples f on the nonuniform grid s.
std::vector<double> nonuniform_derivative(const std::vector<double>& s, const std::vector<double>& f) {
  const std::size_t n = s.size();
  std::vector<double> df(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t a = i == 0 ? 0 : (i == n - 1 ? n - 3 : i - 1);
    const double s0 = s[a], s1 = s[a + 1], s2 = s[a + 2], x = s[i];
    // Derivative of the quadratic through the three points, evaluated at x.
    const double l0 = (2 * x - s1 - s2) / ((s0 - s1) * (s0 - s2));
    const double l1 = (2 * x - s0 - s2) / ((s1 - s0) * (s1 - s2));
    const double l2 = (2 * x - s0 - s1) / ((s2 - s0) * (s2 - s1));
    df[i] = l0 * f[a] + l1 * f[a + 1] + l2 * f[a + 2];
  }
  return df;
}

double average(const std::vector<double>& s, const std::vector<double>& v) {
  double acc = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) acc += 0.5 * (std::abs(v[i]) + std::abs(v[i - 1])) * std::abs(s[i] - s[i - 1]);
  return acc / std::abs(s.back() - s.front());
}

}  // namespace

RateSeries modulation_rates(const ModulationTrack& tr, double max_ds) {
  const auto n = tr.samples.size();
  if (n < 3) throw Error(ErrorCode::TooSparse, "need at least 3 samples");
  RateSeries out;
  std::vector<double> lam(n), gam(n), x[2], xi[2];
  for (int k = 0; k < 2; ++k) {
    x[k].resize(n);
    xi[k].resize(n);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = tr.samples[i];
    if (i > 0 && std::abs(s.s - tr.samples[i - 1].s) > max_ds)
      throw Error(ErrorCode::TooSparse, "sample spacing in s exceeds " + std::to_string(max_ds));
    if (i > 0 && s.s == tr.samples[i - 1].s) throw Error(ErrorCode::TooSparse, "repeated s value");
    out.s.push_back(s.s);
    lam[i] = s.lambda;
    gam[i] = s.gamma;
    out.eps.push_back(s.eps_l2);
    for (int k = 0; k < 2; ++k) {
      x[k][i] = s.x[static_cast<std::size_t>(k)];
      xi[k][i] = s.xi[static_cast<std::size_t>(k)];
    }
  }
  const int d = tr.d;
  const auto dlam = nonuniform_derivative(out.s, lam);
  const auto dgam = nonuniform_derivative(out.s, gam);
  std::vector<double> dx[2], dxi[2];
  for (int k = 0; k < d; ++k) {
    dx[k] = nonuniform_derivative(out.s, x[k]);
    dxi[k] = nonuniform_derivative(out.s, xi[k]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double lr = dlam[i] / lam[i];
    double xi_r = 0.0, x_r = 0.0, dot = 0.0, xi2 = 0.0;
    for (int k = 0; k < d; ++k) {
      const double xs = dx[k][i] / lam[i];
      xi_r += std::pow(dxi[k][i] - lr * xi[k][i], 2);
      x_r += std::pow(xs + 2 * xi[k][i], 2);
      dot += xs * xi[k][i];
      xi2 += xi[k][i] * xi[k][i];
    }
    out.lambda_rate.push_back(lr);
    out.xi_rate.push_back(std::sqrt(xi_r));
    out.x_rate.push_back(std::sqrt(x_r));
    out.gamma_rate.push_back(dgam[i] + 1.0 - dot - xi2);
  }
  std::vector<double> eps_sq(n);
  for (std::size_t i = 0; i < n; ++i) eps_sq[i] = out.eps[i] * out.eps[i];
  out.avg_lambda = average(out.s, out.lambda_rate);
  out.avg_xi = average(out.s, out.xi_rate);
  out.avg_gamma = average(out.s, out.gamma_rate);
  out.avg_x = average(out.s, out.x_rate);
  out.avg_eps = average(out.s, out.eps);
  out.avg_eps_sq = average(out.s, eps_sq);
  return out;
}

void write_track_csv(const ModulationTrack& tr, const std::string& path) {
  csv::Table t;
  t.meta["d"] = std::to_string(tr.d);
  t.columns = {"t", "s", "lambda", "gamma"};
  for (int k = 1; k <= tr.d; ++k) t.columns.push_back("x_" + std::to_string(k));
  for (int k = 1; k <= tr.d; ++k) t.columns.push_back("xi_" + std::to_string(k));
  for (const char* c : {"eps_l2", "residual_max", "eps_x2q", "eps2_lambda_q"}) t.columns.emplace_back(c);
  for (const auto& s : tr.samples) {
    std::vector<double> row{s.t, s.s, s.lambda, s.gamma};
    for (int k = 0; k < tr.d; ++k) row.push_back(s.x[static_cast<std::size_t>(k)]);
    for (int k = 0; k < tr.d; ++k) row.push_back(s.xi[static_cast<std::size_t>(k)]);
    row.insert(row.end(), {s.eps_l2, s.residual_max, s.eps_x2q, s.eps2_lambda_q});
    t.rows.push_back(std::move(row));
  }
  csv::write_file(path, t);
}

}  // namespace nlslab
