#include <cmath>
#include <random>
#include <stdexcept>

#include "nlslab/csv.hpp"
#include "nlslab/error.hpp"
#include "nlslab/fields.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

namespace {

double inner(const std::vector<cplx>& a, const std::vector<cplx>& b, double cell) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::real(std::conj(a[i]) * b[i]);
  return acc * cell;
}

}  // namespace

struct CoercivityForm::Impl {
  GridSpec grid;
  std::vector<double> qp;  // Q^{4/d} on the grid
  std::vector<std::vector<cplx>> cons;
};

CoercivityForm::CoercivityForm(const SpectralData& spectral, const RadialProfile& profile,
                               const CoercivityOptions& opts) {
  const int d = profile.d;
  if (d != 1 && d != 2) throw std::invalid_argument("coercivity: only d = 1, 2");
  auto impl = std::make_shared<Impl>();
  impl->grid = GridSpec{d, opts.n > 0 ? opts.n : (d == 1 ? 256 : 128), opts.box > 0 ? opts.box : (d == 1 ? 40.0 : 24.0)};
  impl->grid.validate();
  const auto& grid = impl->grid;
  const double cell = grid.cell();
  const RadialEvaluator q(profile);
  const std::size_t total = grid.size();
  impl->qp.resize(total);
  auto& cons = impl->cons;
  cons.assign(static_cast<std::size_t>(2 * d + 2), std::vector<cplx>(total));
  const FieldState probe(grid, 0.0);
  for (std::size_t i = 0; i < total; ++i) {
    const auto x = probe.coords(i);
    const double r = d == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
    impl->qp[i] = std::pow(q.value(r), 4.0 / d);
    const double chi = spectral.chi0.value(r);
    cons[0][i] = chi;
    cons[1][i] = cplx(0.0, chi);
    const double over = r > 1e-12 ? q.derivative(r) / r : q.second_derivative(0.0);
    for (int j = 0; j < d; ++j) {
      const double g = over * x[static_cast<std::size_t>(j)];
      cons[static_cast<std::size_t>(2 + j)][i] = g;
      cons[static_cast<std::size_t>(2 + d + j)][i] = cplx(0.0, g);
    }
  }
  // Modified Gram-Schmidt, twice.
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t a = 0; a < cons.size(); ++a) {
      for (std::size_t b = 0; b < a; ++b) {
        const double c = inner(cons[b], cons[a], cell);
        for (std::size_t i = 0; i < total; ++i) cons[a][i] -= c * cons[b][i];
      }
      const double nrm = std::sqrt(inner(cons[a], cons[a], cell));
      for (auto& v : cons[a]) v /= nrm;
    }
  }
  impl_ = std::move(impl);
}

const GridSpec& CoercivityForm::grid() const { return impl_->grid; }

double CoercivityForm::h1_norm_sq(const FieldState& g) const { return mass(g) + kinetic(g); }

// Equals ((L g1, g1) + (L- g2, g2)) / 2 for g = g1 + i g2.
double CoercivityForm::value(const FieldState& g) const {
  const int d = g.d();
  double a = 0.0, b = 0.0;
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    a += impl_->qp[i] * std::norm(g.values[i]);
    b += impl_->qp[i] * std::real(g.values[i] * g.values[i]);
  }
  const double cell = g.grid.cell();
  return 0.5 * kinetic(g) + 0.5 * mass(g) - (d + 2.0) / (2.0 * d) * a * cell - b * cell / d;
}

FieldState CoercivityForm::project(const FieldState& g) const {
  FieldState out = g;
  const double cell = out.grid.cell();
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& c : impl_->cons) {
      const double k = inner(c, out.values, cell);
      for (std::size_t i = 0; i < out.values.size(); ++i) out.values[i] -= k * c[i];
    }
  return out;
}

std::vector<double> CoercivityForm::constraints(const FieldState& g) const {
  std::vector<double> out;
  for (const auto& c : impl_->cons) out.push_back(std::abs(inner(c, g.values, g.grid.cell())));
  return out;
}

CoercivityResult coercivity_trials(const SpectralData& spectral, const RadialProfile& profile, int n_trials,
                                   const CoercivityOptions& opts) {
  if (n_trials < 1) throw std::invalid_argument("coercivity_trials: need at least one trial");
  const CoercivityForm form(spectral, profile, opts);
  const auto& grid = form.grid();
  const int d = profile.d;
  const RadialEvaluator q(profile);

  // Structured directions first: Q, Lambda Q, x_1 Q, |x|^2 Q and i times each.
  std::vector<std::vector<cplx>> structured;
  if (opts.include_structured) {
    const FieldState probe(grid, 0.0);
    std::vector<std::vector<cplx>> real(4, std::vector<cplx>(grid.size()));
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto x = probe.coords(i);
      const double r = d == 1 ? std::abs(x[0]) : std::hypot(x[0], x[1]);
      const double qv = q.value(r);
      real[0][i] = qv;
      real[1][i] = 0.5 * d * qv + r * q.derivative(r);
      real[2][i] = x[0] * qv;
      real[3][i] = r * r * qv;
    }
    for (auto& f : real) {
      structured.push_back(f);
      for (auto& v : f) v *= cplx(0.0, 1.0);
      structured.push_back(f);
    }
  }

  std::mt19937_64 rng(opts.seed);
  CoercivityResult res;
  res.values.reserve(static_cast<std::size_t>(n_trials));
  double sum = 0.0;
  for (int t = 0; t < n_trials; ++t) {
    FieldState g(grid, 0.0);
    if (static_cast<std::size_t>(t) < structured.size()) g.values = structured[static_cast<std::size_t>(t)];
    else g = random_smooth_field(grid, rng);
    g = form.project(g);
    const double nrm = std::sqrt(form.h1_norm_sq(g));
    if (!(nrm > 0)) throw std::runtime_error("coercivity_trials: trial vanished after projection");
    for (auto& v : g.values) v /= nrm;
    for (double c : form.constraints(g)) res.max_constraint = std::max(res.max_constraint, c);
    const double val = form.value(g);
    res.values.push_back(val);
    sum += val;
    if (val > 0) ++res.positive;
    res.minimum = t == 0 ? val : std::min(res.minimum, val);
  }
  res.trials = n_trials;
  res.mean = sum / n_trials;
  return res;
}

double coercivity_estimate(const SpectralData& spectral, const RadialProfile& profile, int n_trials,
                           const CoercivityOptions& opts) {
  const auto res = coercivity_trials(spectral, profile, n_trials, opts);
  if (!(res.minimum > 0))
    throw Error(ErrorCode::NonPositiveForm, "form minimum " + csv::format(res.minimum) + " over " +
                                                std::to_string(n_trials) + " trials");
  return res.minimum;
}

}  // namespace nlslab
