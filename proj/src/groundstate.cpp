#include "nlslab/groundstate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nlslab/csv.hpp"
#include "nlslab/error.hpp"
#include "nlslab/ode.hpp"

namespace nlslab {

namespace {

constexpr double kSeriesStart = 1e-3;

ode::Rhs ground_state_rhs(int d) {
  const double p = 1.0 + 4.0 / d;
  return [d, p](double r, const ode::State& y) -> ode::State {
    const double q = y[0];
    return {y[1], -(d - 1) / r * y[1] + q - std::pow(std::abs(q), p - 1.0) * q};
  };
}

ode::State series_start(int d, double q0) {
  const double p = 1.0 + 4.0 / d;
  const double a = (q0 - std::pow(q0, p)) / (2.0 * d);
  const double b = a * (1.0 - p * std::pow(q0, p - 1.0)) / (4.0 * (d + 2));
  const double r = kSeriesStart;
  return {q0 + a * r * r + b * r * r * r * r, 2 * a * r + 4 * b * r * r * r};
}

// +1: crosses zero (q0 too large); -1: turns back up (q0 too small);
// 0: neither happened before r_max.
struct Shot {
  int verdict;
  double r_stop;
};

Shot shoot(int d, double q0, double r_max, const ode::StepControl& ctl) {
  int verdict = 0;
  auto obs = [&](double, const ode::State& y) {
    if (y[0] < 0) verdict = 1;
    else if (y[1] > 0) verdict = -1;
    return verdict != 0;
  };
  auto out = ode::integrate(ground_state_rhs(d), kSeriesStart, series_start(d, q0), r_max, ctl, obs);
  return {verdict, out.t};
}

double tail_log_slope(int d, double r) {
  const double nu = std::abs(d / 2.0 - 1.0);
  const double nu1 = d / 2.0;  // index of K_{nu+1} with the signed nu
  return -std::cyl_bessel_k(nu1, r) / std::cyl_bessel_k(nu, r);
}

ode::State forward_to(int d, double q0, double r, const ode::StepControl& ctl) {
  return ode::integrate(ground_state_rhs(d), kSeriesStart, series_start(d, q0), r, ctl).y;
}

ode::State inward_to(int d, double log_a, double r_max, double r, const ode::StepControl& ctl) {
  const double a = std::exp(log_a);
  const ode::State y0{a, a * tail_log_slope(d, r_max)};
  return ode::integrate(ground_state_rhs(d), r_max, y0, r, ctl).y;
}

// Simpson weights on an even number of intervals.
double simpson(const std::vector<double>& f, double h) {
  const std::size_t n = f.size() - 1;
  double acc = f.front() + f.back();
  for (std::size_t i = 1; i < n; ++i) acc += (i % 2 ? 4.0 : 2.0) * f[i];
  return acc * h / 3.0;
}

double trapezoid(const std::vector<double>& f, double h) {
  double acc = 0.5 * (f.front() + f.back());
  for (std::size_t i = 1; i + 1 < f.size(); ++i) acc += f[i];
  return acc * h;
}

}  // namespace

double default_r_max(int d) { return d <= 4 ? 30.0 : 24.0; }

double sphere_area(int d) {
  return 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
}

RadialProfile solve_ground_state(int d, double tol, double r_max) {
  GroundStateOptions o;
  o.tol = tol;
  o.r_max = r_max;
  return solve_ground_state(d, o);
}

RadialProfile solve_ground_state(int d, const GroundStateOptions& opts) {
  if (d < 1 || d > 15) throw std::invalid_argument("solve_ground_state: need 1 <= d <= 15");
  if (!(opts.tol > 0)) throw std::invalid_argument("solve_ground_state: tol must be positive");
  const double r_max = opts.r_max > 0 ? opts.r_max : default_r_max(d);
  if (!(std::exp(-r_max) < opts.tol))
    throw std::invalid_argument("solve_ground_state: r_max too small for tol");

  ode::StepControl ctl;
  ctl.rtol = std::clamp(opts.tol * 1e-3, 1e-14, 1e-8);
  ctl.atol = 1e-300;
  ctl.h_max = 0.05;

  // Bracket and bisect on the qualitative fate of the shot.
  double lo = 1.05, hi = 2.0;
  if (shoot(d, lo, r_max, ctl).verdict != -1)
    throw Error(ErrorCode::NoBracket, "lower shooting value does not undershoot");
  while (shoot(d, hi, r_max, ctl).verdict != 1) {
    lo = hi;
    hi *= 2.0;
    if (hi > 0x1p30) throw Error(ErrorCode::NoBracket, "no overshooting value below 2^30");
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const int v = shoot(d, mid, r_max, ctl).verdict;
    if (v == 0) {
      lo = hi = mid;
      break;
    }
    (v == 1 ? hi : lo) = mid;
  }
  double q0 = 0.5 * (lo + hi);

  // Output grid with an even number of intervals.
  auto n_int = static_cast<std::size_t>(std::ceil(r_max / opts.h));
  if (n_int % 2) ++n_int;
  const double h = r_max / static_cast<double>(n_int);

  // Matching node: first node where the bisected shot drops below 1e-3 q0.
  std::size_t m = 0;
  {
    double h_hint = 0.0;
    ode::State y = series_start(d, q0);
    double r = kSeriesStart;
    for (std::size_t i = 1; i <= n_int / 2; ++i) {
      const double ri = h * static_cast<double>(i);
      y = ode::integrate(ground_state_rhs(d), r, y, ri, ctl, {}, &h_hint).y;
      r = ri;
      m = i;
      if (y[0] < 1e-3 * q0) break;
    }
  }
  const double r_m = h * static_cast<double>(m);

  // Newton on (q0, log A) so the forward and inward solutions meet at r_m.
  double log_a = 0.0;
  {
    // Linear tail A r^{-nu} K_nu(r) carried from r_m out to r_max.
    const double nu = d / 2.0 - 1.0;
    auto tail = [&](double r) { return std::pow(r, -nu) * std::cyl_bessel_k(std::abs(nu), r); };
    const ode::State yf = forward_to(d, q0, r_m, ctl);
    log_a = std::log(yf[0] * tail(r_max) / tail(r_m));
  }
  auto mismatch = [&](double q, double la) {
    const ode::State yf = forward_to(d, q, r_m, ctl);
    const ode::State yb = inward_to(d, la, r_max, r_m, ctl);
    return ode::State{yf[0] - yb[0], yf[1] - yb[1]};
  };
  for (int it = 0; it < 12; ++it) {
    const ode::State f = mismatch(q0, log_a);
    const double dq = 1e-7 * q0, da = 1e-6;
    const ode::State fp = mismatch(q0 + dq, log_a), fm = mismatch(q0 - dq, log_a);
    const ode::State gp = mismatch(q0, log_a + da), gm = mismatch(q0, log_a - da);
    const double j00 = (fp[0] - fm[0]) / (2 * dq), j10 = (fp[1] - fm[1]) / (2 * dq);
    const double j01 = (gp[0] - gm[0]) / (2 * da), j11 = (gp[1] - gm[1]) / (2 * da);
    const double det = j00 * j11 - j01 * j10;
    if (det == 0 || !std::isfinite(det)) break;
    const double s_q = (f[0] * j11 - f[1] * j01) / det;
    const double s_a = (j00 * f[1] - j10 * f[0]) / det;
    q0 -= s_q;
    log_a -= s_a;
    if (std::abs(s_q) < 1e-15 * q0 && std::abs(s_a) < 1e-13) break;
  }

  RadialProfile p;
  p.d = d;
  p.q0 = q0;
  p.r_max = r_max;
  p.r_grid.resize(n_int + 1);
  p.q.resize(n_int + 1);
  p.dq.resize(n_int + 1);
  for (std::size_t i = 0; i <= n_int; ++i) p.r_grid[i] = h * static_cast<double>(i);
  p.q[0] = q0;
  p.dq[0] = 0.0;
  {
    double h_hint = 0.0;
    ode::State y = series_start(d, q0);
    double r = kSeriesStart;
    for (std::size_t i = 1; i <= m; ++i) {
      y = ode::integrate(ground_state_rhs(d), r, y, p.r_grid[i], ctl, {}, &h_hint).y;
      r = p.r_grid[i];
      p.q[i] = y[0];
      p.dq[i] = y[1];
    }
  }
  {
    const double a = std::exp(log_a);
    ode::State y{a, a * tail_log_slope(d, r_max)};
    p.q[n_int] = y[0];
    p.dq[n_int] = y[1];
    double h_hint = 0.0;
    double r = r_max;
    for (std::size_t i = n_int - 1; i > m; --i) {
      y = ode::integrate(ground_state_rhs(d), r, y, p.r_grid[i], ctl, {}, &h_hint).y;
      r = p.r_grid[i];
      p.q[i] = y[0];
      p.dq[i] = y[1];
    }
  }

  for (std::size_t i = 0; i <= n_int; ++i) {
    if (!(p.q[i] > 0) || (i > 0 && !(p.dq[i] < 0)))
      throw Error(ErrorCode::ToleranceNotMet, "profile lost positivity or monotonicity at r=" +
                                                  std::to_string(p.r_grid[i]));
  }

  // Decay rate: least squares slope of log q over the last quarter.
  {
    const std::size_t i0 = 3 * n_int / 4;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double cnt = static_cast<double>(n_int + 1 - i0);
    for (std::size_t i = i0; i <= n_int; ++i) {
      const double x = p.r_grid[i], y = std::log(p.q[i]);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    p.delta = -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
  }

  std::vector<double> q2(p.q.size());
  for (std::size_t i = 0; i < q2.size(); ++i) q2[i] = p.q[i] * p.q[i];
  p.mass_sq = radial_integral(p, q2);

  const auto res = ode_residual(p);
  const double worst = *std::max_element(res.begin(), res.end());
  // Residuals are measured against the size of the nonlinear term at the
  // origin; q0 grows to ~4e5 at d = 15.
  const double scale = std::max(1.0, std::pow(q0, 1.0 + 4.0 / d));
  if (!(worst < opts.tol_ode * scale))
    throw Error(ErrorCode::ToleranceNotMet,
                "ODE residual " + csv::format(worst) + " exceeds tol_ode");
  if (!(p.q.back() < std::exp(-p.delta * r_max / 2) * q0))
    throw Error(ErrorCode::ToleranceNotMet, "profile has not decayed by r_max");
  return p;
}

std::vector<double> ode_residual(const RadialProfile& p) {
  const auto d2q = fd_derivative(p.dq, p.h(), LeftEdge::OddVertex);
  const double pw = 1.0 + p.power();
  std::vector<double> res(p.q.size() - 2);
  for (std::size_t i = 1; i + 1 < p.q.size(); ++i) {
    const double r = p.r_grid[i];
    res[i - 1] = std::abs(d2q[i] + (p.d - 1) / r * p.dq[i] - p.q[i] + std::pow(p.q[i], pw));
  }
  return res;
}

RadialEvaluator::RadialEvaluator(const RadialProfile& p)
    : d_(p.d), q0_(p.q0), r_max_(p.r_max), q_last_(p.q.back()), delta_(p.delta),
      interp_(0.0, p.h(), p.q, p.dq) {
  interp_.limit_monotone();
}

double RadialEvaluator::value(double r) const {
  r = std::abs(r);
  if (r > r_max_) return q_last_ * std::exp(-delta_ * (r - r_max_));
  return interp_.value(r);
}

double RadialEvaluator::derivative(double r) const {
  const double s = r < 0 ? -1.0 : 1.0;
  r = std::abs(r);
  if (r > r_max_) return -s * delta_ * q_last_ * std::exp(-delta_ * (r - r_max_));
  return s * interp_.derivative(r);
}

double RadialEvaluator::second_derivative(double r) const {
  r = std::abs(r);
  const double p = 1.0 + 4.0 / d_;
  if (r == 0.0) return (q0_ - std::pow(q0_, p)) / d_;
  const double q = value(r);
  return -(d_ - 1) / r * derivative(r) + q - std::pow(q, p);
}

std::vector<double> evaluate_radial(const RadialProfile& profile, const std::vector<double>& points) {
  RadialEvaluator ev(profile);
  std::vector<double> out(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) out[i] = ev.value(points[i]);
  return out;
}

double radial_integral(const RadialProfile& p, const std::vector<double>& samples, RadialRule rule,
                       const std::vector<double>* sample_derivative) {
  if (samples.size() != p.r_grid.size())
    throw std::invalid_argument("radial_integral: sample count mismatch");
  const double h = p.h();
  const int d = p.d;
  std::vector<double> f(samples.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = samples[i] * std::pow(p.r_grid[i], d - 1);
  double val = 0.0;
  switch (rule) {
    case RadialRule::Simpson:
      val = simpson(f, h);
      break;
    case RadialRule::Trapezoid:
      val = trapezoid(f, h);
      break;
    case RadialRule::TrapezoidEndCorrected: {
      // Euler-Maclaurin: T - h^2/12 (f'(b) - f'(a)).
      std::vector<double> ds;
      if (sample_derivative) {
        ds = *sample_derivative;
      } else {
        ds = fd_derivative(samples, h, LeftEdge::OneSided);
        ds[0] = 0.0;  // radial samples are even in r
      }
      auto fprime = [&](std::size_t i) {
        const double r = p.r_grid[i];
        double v = ds[i] * std::pow(r, d - 1);
        if (d == 2) v += samples[i];
        else if (d > 2) v += (d - 1) * samples[i] * std::pow(r, d - 2);
        return v;
      };
      val = trapezoid(f, h) - h * h / 12.0 * (fprime(f.size() - 1) - fprime(0));
      break;
    }
  }
  return sphere_area(d) * val;
}

ProfileNorms profile_norms(const RadialProfile& p) {
  const std::size_t n = p.q.size();
  std::vector<double> q2(n), g2(n), pot(n), x2(n);
  const double pw = 2.0 + p.power();
  for (std::size_t i = 0; i < n; ++i) {
    q2[i] = p.q[i] * p.q[i];
    g2[i] = p.dq[i] * p.dq[i];
    pot[i] = std::pow(p.q[i], pw);
    x2[i] = q2[i] * p.r_grid[i] * p.r_grid[i];
  }
  return {radial_integral(p, q2), radial_integral(p, g2), radial_integral(p, pot),
          radial_integral(p, x2)};
}

double pohozaev_energy(const RadialProfile& p) {
  for (std::size_t i = 0; i < p.q.size(); ++i) {
    if (!(p.q[i] > 0) || !std::isfinite(p.dq[i]))
      throw Error(ErrorCode::QuadratureUnstable, "profile not positive/finite");
  }
  // The kinetic integrand must be single-humped; count slope reversals of |Q'|.
  int reversals = 0;
  for (std::size_t i = 2; i < p.dq.size(); ++i) {
    const double a = std::abs(p.dq[i - 1]) - std::abs(p.dq[i - 2]);
    const double b = std::abs(p.dq[i]) - std::abs(p.dq[i - 1]);
    if (a > 0 && b < 0) ++reversals;
  }
  if (reversals > 1)
    throw Error(ErrorCode::QuadratureUnstable,
                "oscillating gradient (" + std::to_string(reversals) + " maxima)");
  const auto nrm = profile_norms(p);
  return 0.5 * nrm.grad_sq - p.d / (2.0 * (p.d + 2)) * nrm.potential;
}

double gn_sharp_constant(const RadialProfile& p) {
  const auto nrm = profile_norms(p);
  return nrm.potential / (std::pow(nrm.mass_sq, 2.0 / p.d) * nrm.grad_sq);
}

double gradient_ratio_sup(const RadialProfile& p, double alpha) {
  if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("gradient_ratio_sup: need 0 < alpha <= 1");
  double best = 0.0;
  for (std::size_t i = 0; i < p.q.size(); ++i)
    best = std::max(best, std::abs(p.dq[i]) / std::pow(p.q[i], 1.0 - alpha));
  return best;
}

void write_profile_csv(const RadialProfile& p, const std::string& path) {
  csv::Table t;
  t.meta["d"] = std::to_string(p.d);
  t.meta["q0"] = csv::format(p.q0);
  t.meta["delta"] = csv::format(p.delta);
  t.meta["mass_sq"] = csv::format(p.mass_sq);
  t.meta["r_max"] = csv::format(p.r_max);
  t.columns = {"r", "q", "dq"};
  for (std::size_t i = 0; i < p.q.size(); ++i) t.rows.push_back({p.r_grid[i], p.q[i], p.dq[i]});
  csv::write_file(path, t);
}

RadialProfile read_profile_csv(const std::string& path) {
  const auto t = csv::read_file(path);
  RadialProfile p;
  p.d = static_cast<int>(t.meta_double("d"));
  p.q0 = t.meta_double("q0");
  p.delta = t.meta_double("delta");
  p.mass_sq = t.meta_double("mass_sq");
  p.r_max = t.meta_double("r_max");
  const auto cr = t.column("r"), cq = t.column("q"), cd = t.column("dq");
  for (const auto& row : t.rows) {
    p.r_grid.push_back(row[cr]);
    p.q.push_back(row[cq]);
    p.dq.push_back(row[cd]);
  }
  return p;
}

}  // namespace nlslab
