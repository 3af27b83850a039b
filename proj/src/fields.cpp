#include "nlslab/fields.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "nlslab/csv.hpp"
#include "nlslab/error.hpp"
#include "nlslab/fft.hpp"
#include "nlslab/interp.hpp"

namespace nlslab {

namespace {

constexpr double kAliasTol = 1e-10;

std::vector<cplx> spectrum(const FieldState& u) {
  auto f = u.values;
  fft::forward(u.d(), u.n(), f);
  return f;
}

}  // namespace

std::vector<double> GridSpec::axis() const {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) x[static_cast<std::size_t>(j)] = -0.5 * box + j * dx();
  return x;
}

void GridSpec::validate() const {
  if (d != 1 && d != 2) throw std::invalid_argument("GridSpec: d must be 1 or 2");
  if (n < 8 || (n & (n - 1)) != 0) throw std::invalid_argument("GridSpec: n must be a power of two >= 8");
  if (!(box > 0)) throw std::invalid_argument("GridSpec: box must be positive");
}

FieldState::FieldState(GridSpec g, double time) : grid(g), values(g.size()), t(time) { grid.validate(); }

std::array<double, 2> FieldState::coords(std::size_t idx) const {
  const double h = grid.dx(), a = -0.5 * grid.box;
  if (grid.d == 1) return {a + h * static_cast<double>(idx), 0.0};
  const auto n = static_cast<std::size_t>(grid.n);
  return {a + h * static_cast<double>(idx / n), a + h * static_cast<double>(idx % n)};
}

double profile_tail_fraction(const RadialProfile& p, double radius) {
  const int d = p.d;
  double acc = 0.0;
  const double h = p.h();
  if (radius < p.r_max) {
    for (std::size_t i = 0; i + 1 < p.q.size(); ++i) {
      const double a = p.r_grid[i], b = p.r_grid[i + 1];
      if (b <= radius) continue;
      const double fa = p.q[i] * p.q[i] * std::pow(a, d - 1);
      const double fb = p.q[i + 1] * p.q[i + 1] * std::pow(b, d - 1);
      const double w = a < radius ? (b - radius) / h : 1.0;
      acc += 0.5 * (fa + fb) * h * w;
    }
  }
  // Exponential tail beyond max(radius, r_max).
  const double r0 = std::max(radius, p.r_max);
  const double q_r0 = p.q.back() * std::exp(-p.delta * (r0 - p.r_max));
  acc += q_r0 * q_r0 * std::pow(r0, d - 1) / (2 * p.delta);
  return sphere_area(d) * acc / p.mass_sq;
}

FieldState synthesize_soliton(const RadialProfile& profile, const SolitonParams& sp, const GridSpec& grid,
                              double t) {
  grid.validate();
  if (profile.d != grid.d) throw std::invalid_argument("synthesize_soliton: dimension mismatch");
  if (!(sp.lambda > 0)) throw std::invalid_argument("synthesize_soliton: lambda must be positive");
  const double tail = profile_tail_fraction(profile, sp.lambda * grid.box / 2);
  if (tail > 1e-10)
    throw Error(ErrorCode::BoxTooSmall, "soliton tail fraction " + csv::format(tail) + " outside the box (limit 1e-10)");
  FieldState u(grid, t);
  const RadialEvaluator q(profile);
  const int d = grid.d;
  const double lam = sp.lambda;
  std::array<double, 2> centre{};
  double xi2 = 0.0;
  for (int k = 0; k < d; ++k) {
    centre[static_cast<std::size_t>(k)] = 2 * t * sp.xi[static_cast<std::size_t>(k)] -
                                          sp.x0[static_cast<std::size_t>(k)] / lam;
    xi2 += sp.xi[static_cast<std::size_t>(k)] * sp.xi[static_cast<std::size_t>(k)];
  }
  const double amp = std::pow(lam, d / 2.0);
  const double phase0 = -sp.gamma - t * xi2 + lam * lam * t;
  for (std::size_t idx = 0; idx < u.values.size(); ++idx) {
    const auto x = u.coords(idx);
    double r2 = 0.0, phase = phase0;
    for (int k = 0; k < d; ++k) {
      const auto kk = static_cast<std::size_t>(k);
      double y = x[kk] - centre[kk];
      y -= grid.box * std::round(y / grid.box);
      r2 += y * y;
      phase += x[kk] * sp.xi[kk];
    }
    u.values[idx] = amp * q.value(lam * std::sqrt(r2)) * std::polar(1.0, phase);
  }
  return u;
}

double mass(const FieldState& u) {
  double acc = 0.0;
  for (const auto& v : u.values) acc += std::norm(v);
  return acc * u.grid.cell();
}

double kinetic(const FieldState& u) {
  const auto f = spectrum(u);
  const auto k = fft::wavenumbers(u.n(), u.box());
  const auto n = static_cast<std::size_t>(u.n());
  double acc = 0.0;
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    double k2;
    if (u.d() == 1) k2 = k[idx] * k[idx];
    else k2 = k[idx / n] * k[idx / n] + k[idx % n] * k[idx % n];
    acc += k2 * std::norm(f[idx]);
  }
  return acc * u.grid.cell() / static_cast<double>(f.size());
}

double potential_norm(const FieldState& u) {
  const double half_p = 1.0 + 2.0 / u.d();
  double acc = 0.0;
  for (const auto& v : u.values) acc += std::pow(std::norm(v), half_p);
  return acc * u.grid.cell();
}

double energy(const FieldState& u, int sign) {
  const int d = u.d();
  return 0.5 * kinetic(u) - sign * d / (2.0 * (d + 2)) * potential_norm(u);
}

std::vector<cplx> gradient(const FieldState& u, int axis) {
  if (axis < 0 || axis >= u.d()) throw std::invalid_argument("gradient: bad axis");
  auto f = spectrum(u);
  auto k = fft::wavenumbers(u.n(), u.box());
  k[static_cast<std::size_t>(u.n() / 2)] = 0.0;  // odd derivative drops the Nyquist mode
  const auto n = static_cast<std::size_t>(u.n());
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const std::size_t m = u.d() == 1 ? idx : (axis == 0 ? idx / n : idx % n);
    f[idx] *= cplx(0.0, k[m]);
  }
  fft::inverse(u.d(), u.n(), f);
  return f;
}

std::array<double, 2> momentum(const FieldState& u) {
  std::array<double, 2> p{0.0, 0.0};
  for (int a = 0; a < u.d(); ++a) {
    const auto g = gradient(u, a);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) acc += std::imag(std::conj(u.values[i]) * g[i]);
    p[static_cast<std::size_t>(a)] = acc * u.grid.cell();
  }
  return p;
}

double sup_abs(const FieldState& u) {
  double m = 0.0;
  for (const auto& v : u.values) {
    const double a = std::abs(v);
    if (std::isnan(a)) return a;  // std::max would swallow it
    m = std::max(m, a);
  }
  return m;
}

double boundary_mass_fraction(const FieldState& u) {
  const double lim = 0.4 * u.box();
  double out = 0.0, tot = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const auto x = u.coords(i);
    const double w = std::norm(u.values[i]);
    tot += w;
    if (std::abs(x[0]) > lim || (u.d() == 2 && std::abs(x[1]) > lim)) out += w;
  }
  return tot > 0 ? out / tot : 0.0;
}

double virial(const FieldState& u, double tail_tol) {
  const double frac = boundary_mass_fraction(u);
  if (frac > tail_tol)
    throw Error(ErrorCode::TailTooLarge, "boundary mass fraction " + csv::format(frac));
  double acc = 0.0;
  for (int a = 0; a < u.d(); ++a) {
    const auto g = gradient(u, a);
    for (std::size_t i = 0; i < g.size(); ++i)
      acc += u.coords(i)[static_cast<std::size_t>(a)] * std::imag(std::conj(u.values[i]) * g[i]);
  }
  return acc * u.grid.cell();
}

namespace {

double bump(double rho) {
  if (rho <= 1.0) return 1.0;
  if (rho >= 2.0) return 0.0;
  const double s = rho - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}

// I(a) = int_1^a chi(rho)^2 d rho on [1, 2].
const UniformHermite& bump_integral() {
  static const UniformHermite table = [] {
    const int m = 4000;
    const double h = 1.0 / m;
    std::vector<double> val(m + 1), slope(m + 1);
    double acc = 0.0;
    for (int i = 0; i <= m; ++i) {
      const double a = 1.0 + i * h;
      if (i > 0) {
        // Simpson on the sub-interval [a - h, a].
        const double f0 = std::pow(bump(a - h), 2), f1 = std::pow(bump(a - 0.5 * h), 2), f2 = std::pow(bump(a), 2);
        acc += h / 6 * (f0 + 4 * f1 + f2);
      }
      val[static_cast<std::size_t>(i)] = acc;
      slope[static_cast<std::size_t>(i)] = std::pow(bump(a), 2);
    }
    return UniformHermite(1.0, h, val, slope);
  }();
  return table;
}

}  // namespace

double morawetz_phi(double r, double radius) {
  const double s = r / (2 * radius);
  if (s <= 1.0) return r;
  const double a = std::min(s, 2.0);
  return 2 * radius * (1.0 + bump_integral().value(a));
}

double morawetz_potential(const FieldState& u, double radius) {
  if (!(radius > 0)) throw std::invalid_argument("morawetz_potential: radius must be positive");
  std::vector<std::vector<cplx>> g;
  for (int a = 0; a < u.d(); ++a) g.push_back(gradient(u, a));
  double acc = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) {
    const auto x = u.coords(i);
    const double r = u.d() == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
    const double w = r > 0 ? morawetz_phi(r, radius) / r : 1.0;
    double flux = 0.0;
    for (int a = 0; a < u.d(); ++a)
      flux += x[static_cast<std::size_t>(a)] * std::imag(std::conj(u.values[i]) * g[static_cast<std::size_t>(a)][i]);
    acc += w * flux;
  }
  return acc * u.grid.cell();
}

double high_band_fraction(const FieldState& u, double frac) {
  const auto f = spectrum(u);
  const auto n = static_cast<std::size_t>(u.n());
  const auto cut = static_cast<long>(frac * static_cast<double>(n / 2));
  auto mode = [&](std::size_t m) { return std::labs(m < n / 2 ? static_cast<long>(m) : static_cast<long>(m) - static_cast<long>(n)); };
  double hi = 0.0, tot = 0.0;
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const double w = std::norm(f[idx]);
    tot += w;
    const bool high = u.d() == 1 ? mode(idx) > cut : (mode(idx / n) > cut || mode(idx % n) > cut);
    if (high) hi += w;
  }
  return tot > 0 ? hi / tot : 0.0;
}

namespace {

// Row of trigonometric basis values at y for the grid's FFT ordering.
Eigen::RowVectorXcd basis_row(double y, int n, double box) {
  Eigen::RowVectorXcd row = Eigen::RowVectorXcd::Zero(n);
  if (y < -0.5 * box || y > 0.5 * box) return row;
  const double s = y + 0.5 * box;
  const double w = 2 * std::numbers::pi * s / box;
  const cplx step = std::polar(1.0, w);
  cplx e = 1.0;
  for (int m = 0; m < n / 2; ++m) {
    if (m % 64 == 0) e = std::polar(1.0, w * m);  // limit drift of the recurrence
    row[m] = e;
    if (m > 0) row[n - m] = std::conj(e);
    e *= step;
  }
  row[n / 2] = std::cos(w * (n / 2));
  return row / static_cast<double>(n);
}

}  // namespace

std::vector<cplx> fourier_resample(const FieldState& u, const std::vector<double>& pts0,
                                   const std::vector<double>& pts1) {
  const auto f = spectrum(u);
  const int n = u.n();
  const auto p0 = static_cast<Eigen::Index>(pts0.size());
  Eigen::MatrixXcd e0(p0, n);
  for (Eigen::Index i = 0; i < p0; ++i) e0.row(i) = basis_row(pts0[static_cast<std::size_t>(i)], n, u.box());
  if (u.d() == 1) {
    const Eigen::Map<const Eigen::VectorXcd> c(f.data(), n);
    const Eigen::VectorXcd out = e0 * c;
    return {out.data(), out.data() + out.size()};
  }
  const auto p1 = static_cast<Eigen::Index>(pts1.size());
  Eigen::MatrixXcd e1(p1, n);
  for (Eigen::Index i = 0; i < p1; ++i) e1.row(i) = basis_row(pts1[static_cast<std::size_t>(i)], n, u.box());
  using RowMat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const RowMat> c(f.data(), n, n);
  const RowMat out = e0 * c * e1.transpose();
  return {out.data(), out.data() + out.size()};
}

namespace {

void audit_output(const FieldState& v, const char* what) {
  const double hb = high_band_fraction(v, 0.9);
  if (hb > kAliasTol)
    throw Error(ErrorCode::ResampleAliasing,
                std::string(what) + ": spectral fraction " + csv::format(hb) + " near Nyquist");
}

FieldState resample_scaled(const FieldState& u, double factor) {
  FieldState v(u.grid, u.t);
  auto pts = u.grid.axis();
  for (auto& p : pts) p *= factor;
  v.values = fourier_resample(u, pts, pts);
  return v;
}

}  // namespace

FieldState scaling_transform(const FieldState& u, double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("scaling_transform: lambda must be positive");
  if (lambda > 1.0) {
    const double hb = high_band_fraction(u, 0.9 / lambda);
    if (hb > kAliasTol)
      throw Error(ErrorCode::ResampleAliasing, "scaling: content above Nyquist/lambda " + csv::format(hb));
  }
  FieldState v = resample_scaled(u, lambda);
  const double amp = std::pow(lambda, u.d() / 2.0);
  for (auto& x : v.values) x *= amp;
  v.t = u.t / (lambda * lambda);
  audit_output(v, "scaling");
  return v;
}

FieldState galilean_transform(const FieldState& u, const std::array<double, 2>& xi0) {
  auto f = spectrum(u);
  const auto k = fft::wavenumbers(u.n(), u.box());
  const auto n = static_cast<std::size_t>(u.n());
  const double s0 = 2 * u.t * xi0[0], s1 = 2 * u.t * xi0[1];
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const double arg = u.d() == 1 ? k[idx] * s0 : k[idx / n] * s0 + k[idx % n] * s1;
    f[idx] *= std::polar(1.0, -arg);
  }
  fft::inverse(u.d(), u.n(), f);
  const double xi2 = xi0[0] * xi0[0] + (u.d() == 2 ? xi0[1] * xi0[1] : 0.0);
  FieldState v(u.grid, u.t);
  for (std::size_t idx = 0; idx < f.size(); ++idx) {
    const auto x = u.coords(idx);
    const double ph = x[0] * xi0[0] + (u.d() == 2 ? x[1] * xi0[1] : 0.0) - u.t * xi2;
    v.values[idx] = f[idx] * std::polar(1.0, ph);
  }
  return v;
}

FieldState pseudoconformal_transform(const FieldState& u) {
  const double tau = u.t;
  if (tau == 0.0) throw std::invalid_argument("pseudoconformal_transform: t must be nonzero");
  if (std::abs(tau) > 1.0) {
    const double hb = high_band_fraction(u, 0.9 / std::abs(tau));
    if (hb > kAliasTol)
      throw Error(ErrorCode::ResampleAliasing, "pseudoconformal: content above Nyquist/|t| " + csv::format(hb));
  }
  FieldState v = resample_scaled(u, tau);
  const double amp = std::pow(std::abs(tau), u.d() / 2.0);
  for (std::size_t idx = 0; idx < v.values.size(); ++idx) {
    const auto x = v.coords(idx);
    const double r2 = x[0] * x[0] + (u.d() == 2 ? x[1] * x[1] : 0.0);
    v.values[idx] = amp * std::conj(v.values[idx]) * std::polar(1.0, tau * r2 / 4);
  }
  v.t = 1.0 / tau;
  audit_output(v, "pseudoconformal");
  return v;
}

std::vector<FieldState> pseudoconformal_trajectory(const std::vector<FieldState>& traj) {
  std::vector<FieldState> out;
  out.reserve(traj.size());
  for (auto it = traj.rbegin(); it != traj.rend(); ++it) out.push_back(pseudoconformal_transform(*it));
  return out;
}

GnTerms gn_terms(const FieldState& u, double c_d) {
  return {potential_norm(u), c_d * std::pow(mass(u), 2.0 / u.d()) * kinetic(u)};
}

bool gn_check(const FieldState& u, double c_d, double slack) {
  const auto t = gn_terms(u, c_d);
  return t.lhs <= t.rhs * (1.0 + slack);
}

void write_snapshot_csv(const FieldState& u, const std::string& path) {
  csv::Table t;
  t.meta["d"] = std::to_string(u.d());
  t.meta["n"] = std::to_string(u.n());
  t.meta["box"] = csv::format(u.box());
  t.meta["t"] = csv::format(u.t);
  t.columns = {"re", "im"};
  for (const auto& v : u.values) t.rows.push_back({v.real(), v.imag()});
  csv::write_file(path, t);
}

FieldState read_snapshot_csv(const std::string& path) {
  const auto t = csv::read_file(path);
  GridSpec g{static_cast<int>(t.meta_double("d")), static_cast<int>(t.meta_double("n")), t.meta_double("box")};
  FieldState u(g, t.meta_double("t"));
  if (t.rows.size() != u.values.size()) throw std::runtime_error("snapshot: row count does not match header");
  for (std::size_t i = 0; i < t.rows.size(); ++i) u.values[i] = {t.rows[i][0], t.rows[i][1]};
  return u;
}

FieldState random_smooth_field(const GridSpec& grid, std::mt19937_64& rng, const RandomFieldOptions& opts) {
  grid.validate();
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  FieldState g(grid, 0.0);
  for (auto& v : g.values) v = cplx(gauss(rng), gauss(rng));
  const auto kx = fft::wavenumbers(grid.n, grid.box);
  const auto n = static_cast<std::size_t>(grid.n);
  const double k_nyq = std::abs(kx[n / 2]);
  const double kc = k_nyq * (opts.cutoff_min + (opts.cutoff_max - opts.cutoff_min) * unif(rng));
  fft::forward(grid.d, grid.n, g.values);
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const double k2 = grid.d == 1 ? kx[i] * kx[i] : kx[i / n] * kx[i / n] + kx[i % n] * kx[i % n];
    g.values[i] *= std::exp(-k2 / (2 * kc * kc));
  }
  fft::inverse(grid.d, grid.n, g.values);
  const double w = opts.width_min + (opts.width_max - opts.width_min) * unif(rng);
  const double c0 = opts.center_spread * (2 * unif(rng) - 1);
  const double c1 = grid.d == 2 ? opts.center_spread * (2 * unif(rng) - 1) : 0.0;
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    const auto x = g.coords(i);
    const double r2 = (x[0] - c0) * (x[0] - c0) + (grid.d == 2 ? (x[1] - c1) * (x[1] - c1) : 0.0);
    g.values[i] *= std::exp(-r2 / (2 * w * w));
  }
  return g;
}

}  // namespace nlslab
