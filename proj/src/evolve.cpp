#include "nlslab/evolve.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "nlslab/csv.hpp"
#include "nlslab/error.hpp"
#include "nlslab/fft.hpp"

namespace nlslab {

void validate(const EvolveConfig& cfg) {
  if (!(cfg.dt > 0)) throw std::invalid_argument("EvolveConfig: dt must be positive");
  if (!(cfg.blowup_linf > 0)) throw std::invalid_argument("EvolveConfig: blowup_linf must be positive");
  if (cfg.record_every < 1) throw std::invalid_argument("EvolveConfig: record_every must be >= 1");
  if (cfg.sign < -1 || cfg.sign > 1) throw std::invalid_argument("EvolveConfig: sign must be -1, 0 or 1");
}

SplitStepper::SplitStepper(const GridSpec& grid, int sign, bool dealias)
    : grid_(grid), sign_(sign), dealias_(dealias), k2_(grid.size()), keep_(grid.size(), 1) {
  grid.validate();
  const auto k = fft::wavenumbers(grid.n, grid.box);
  const auto n = static_cast<std::size_t>(grid.n);
  const long cut = grid.n / 3;
  auto mode = [&](std::size_t m) { return std::labs(m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n)); };
  for (std::size_t idx = 0; idx < k2_.size(); ++idx) {
    if (grid.d == 1) {
      k2_[idx] = k[idx] * k[idx];
      keep_[idx] = mode(idx) <= cut;
    } else {
      k2_[idx] = k[idx / n] * k[idx / n] + k[idx % n] * k[idx % n];
      keep_[idx] = mode(idx / n) <= cut && mode(idx % n) <= cut;
    }
  }
}

void SplitStepper::linear(std::vector<cplx>& f, double dt) {
  if (dt != cached_dt_ || half_.empty()) {
    half_.resize(k2_.size());
    for (std::size_t i = 0; i < k2_.size(); ++i) half_[i] = std::polar(1.0, -0.5 * dt * k2_[i]);
    cached_dt_ = dt;
  }
  fft::forward(grid_.d, grid_.n, f);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= half_[i];
  fft::inverse(grid_.d, grid_.n, f);
}

void SplitStepper::advance(FieldState& u, double dt) {
  linear(u.values, dt);
  if (sign_ != 0) {
    const double half_p = 2.0 / grid_.d;  // |u|^{4/d} = (|u|^2)^{2/d}
    for (auto& v : u.values) v *= std::polar(1.0, sign_ * dt * std::pow(std::norm(v), half_p));
    if (dealias_) {
      fft::forward(grid_.d, grid_.n, u.values);
      for (std::size_t i = 0; i < u.values.size(); ++i)
        if (!keep_[i]) u.values[i] = 0.0;
      fft::inverse(grid_.d, grid_.n, u.values);
    }
  }
  linear(u.values, dt);
  u.t += dt;
}

FieldState step(const FieldState& u, double dt, int sign, bool dealias) {
  SplitStepper s(u.grid, sign, dealias);
  FieldState v = u;
  s.advance(v, dt);
  return v;
}

const char* to_string(Termination t) {
  switch (t) {
    case Termination::Completed: return "Completed";
    case Termination::BlowupDetected: return "BlowupDetected";
    case Termination::ResolutionFloor: return "ResolutionFloor";
  }
  return "?";
}

namespace {

ObservationRow observe(const FieldState& u, int sign, const Observers& obs) {
  ObservationRow row{};
  row.t = u.t;
  row.mass = mass(u);
  row.grad_sq = kinetic(u);
  const int d = u.d();
  row.energy = 0.5 * row.grad_sq - (sign == 0 ? 0.0 : sign * d / (2.0 * (d + 2)) * potential_norm(u));
  row.virial = virial(u, std::numeric_limits<double>::infinity());
  row.morawetz = obs.morawetz_radius > 0 ? morawetz_potential(u, obs.morawetz_radius)
                                         : std::numeric_limits<double>::quiet_NaN();
  row.sup_abs = sup_abs(u);
  if (obs.hook) row.extra = obs.hook(u);
  return row;
}

}  // namespace

RunResult run(const FieldState& u0, const EvolveConfig& cfg, const Observers& obs, bool keep_snapshots) {
  validate(cfg);
  RunResult res;
  res.columns = {"t", "mass", "energy", "virial", "morawetz", "sup_abs", "grad_sq"};
  for (const auto& c : obs.hook_columns) res.columns.push_back(c);

  const double span = cfg.t_end - u0.t;
  const long nsteps = span == 0.0 ? 0 : static_cast<long>(std::ceil(std::abs(span) / cfg.dt - 1e-9));
  const double dt = nsteps ? span / static_cast<double>(nsteps) : 0.0;

  FieldState u = u0;
  SplitStepper stepper(u.grid, cfg.sign, cfg.dealias);
  auto record = [&] {
    res.log.push_back(observe(u, cfg.sign, obs));
    if (keep_snapshots) res.snapshots.push_back(u);
  };
  record();
  res.t_stop = u.t;
  for (long s = 1; s <= nsteps; ++s) {
    stepper.advance(u, dt);
    if (s == nsteps) u.t = cfg.t_end;
    const double sup = sup_abs(u);
    if (!std::isfinite(sup)) throw Error(ErrorCode::NonFinite, "non-finite field at t=" + csv::format(u.t));
    if (sup > cfg.blowup_linf) {
      record();
      res.cause = Termination::BlowupDetected;
      res.t_stop = u.t;
      res.detail = "sup|u| = " + csv::format(sup) + " exceeds blowup_linf";
      return res;
    }
    if (s % cfg.record_every == 0 || s == nsteps) {
      record();
      res.t_stop = u.t;
      if (obs.core_width) {
        const double w = obs.core_width(u);
        if (w < 4 * u.grid.dx()) {
          res.cause = Termination::ResolutionFloor;
          res.detail = "core width " + csv::format(w) + " below 4 grid cells";
          return res;
        }
      }
    }
  }
  res.t_stop = u.t;
  return res;
}

DriftSummary conservation_report(const std::vector<ObservationRow>& log) {
  if (log.empty()) throw std::invalid_argument("conservation_report: empty log");
  const auto& r0 = log.front();
  DriftSummary s{0.0, 0.0, std::max(std::abs(r0.energy), 0.5 * r0.grad_sq)};
  for (const auto& r : log) {
    s.mass_drift = std::max(s.mass_drift, std::abs(r.mass - r0.mass) / r0.mass);
    s.energy_drift = std::max(s.energy_drift, std::abs(r.energy - r0.energy) / s.energy_scale);
  }
  return s;
}

std::vector<double> virial_identity_errors(const std::vector<ObservationRow>& log) {
  std::vector<double> out;
  for (std::size_t i = 1; i < log.size(); ++i) {
    const auto& a = log[i - 1];
    const auto& b = log[i];
    const double e = 0.5 * (a.energy + b.energy);
    const double rate = (b.virial - a.virial) / (b.t - a.t);
    out.push_back(std::abs(rate - 4 * e) / std::abs(e));
  }
  return out;
}

void write_log_csv(const RunResult& r, const std::string& path) {
  csv::Table t;
  t.meta["termination"] = to_string(r.cause);
  t.meta["t_stop"] = csv::format(r.t_stop);
  t.columns = r.columns;
  for (const auto& row : r.log) {
    std::vector<double> v{row.t, row.mass, row.energy, row.virial, row.morawetz, row.sup_abs, row.grad_sq};
    v.insert(v.end(), row.extra.begin(), row.extra.end());
    v.resize(t.columns.size(), std::numeric_limits<double>::quiet_NaN());
    t.rows.push_back(std::move(v));
  }
  csv::write_file(path, t);
}

ConvergenceCheck self_convergence(const FieldState& u0, const EvolveConfig& cfg) {
  validate(cfg);
  const double span = cfg.t_end - u0.t;
  const long base = static_cast<long>(std::ceil(std::abs(span) / cfg.dt - 1e-9));
  if (base < 1) throw std::invalid_argument("self_convergence: empty time interval");
  std::vector<FieldState> ends;
  for (long m : {1L, 2L, 4L}) {
    FieldState u = u0;
    SplitStepper stepper(u.grid, cfg.sign, cfg.dealias);
    const long steps = base * m;
    const double dt = span / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) stepper.advance(u, dt);
    ends.push_back(std::move(u));
  }
  auto diff = [](const FieldState& a, const FieldState& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) acc += std::norm(a.values[i] - b.values[i]);
    return std::sqrt(acc * a.grid.cell());
  };
  ConvergenceCheck c{diff(ends[0], ends[1]), diff(ends[1], ends[2]), 0.0};
  c.ratio = c.err_coarse / c.err_fine;
  return c;
}

}  // namespace nlslab
