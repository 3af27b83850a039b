#pragma once

#include <array>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include "nlslab/groundstate.hpp"

namespace nlslab {

using cplx = std::complex<double>;

// Periodic grid on [-box/2, box/2)^d, x_j = -box/2 + j*dx. 2-D data are row
// major with the first coordinate as the slow index.
struct GridSpec {
  int d = 1;
  int n = 512;
  double box = 30.0;

  double dx() const { return box / n; }
  std::size_t size() const { return d == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * n; }
  double cell() const { return d == 1 ? dx() : dx() * dx(); }
  std::vector<double> axis() const;
  void validate() const;
};

struct FieldState {
  GridSpec grid;
  std::vector<cplx> values;
  double t = 0.0;

  FieldState() = default;
  FieldState(GridSpec g, double time);
  int d() const { return grid.d; }
  int n() const { return grid.n; }
  double box() const { return grid.box; }
  // Coordinates of flat index idx.
  std::array<double, 2> coords(std::size_t idx) const;
};

struct SolitonParams {
  double lambda = 1.0;
  double gamma = 0.0;
  std::array<double, 2> x0{0.0, 0.0};
  std::array<double, 2> xi{0.0, 0.0};
};

// e^{-i gamma - it|xi|^2} e^{i lambda^2 t} e^{i x.xi} lambda^{d/2} Q(lambda(x - 2t xi) + x0),
// with the envelope centred on the nearest periodic image.
FieldState synthesize_soliton(const RadialProfile& profile, const SolitonParams& params,
                              const GridSpec& grid, double t = 0.0);

// Fraction of ||Q||^2 outside the ball of radius R.
double profile_tail_fraction(const RadialProfile& profile, double radius);

double mass(const FieldState& u);
double kinetic(const FieldState& u);          // ||grad u||^2 (Parseval)
double potential_norm(const FieldState& u);   // int |u|^{2+4/d}
// sign = +1 focusing, -1 defocusing.
double energy(const FieldState& u, int sign = 1);
std::array<double, 2> momentum(const FieldState& u);  // int Im(conj(u) grad u)
double sup_abs(const FieldState& u);

// Spectral partial derivative along axis (0 or 1).
std::vector<cplx> gradient(const FieldState& u, int axis);

// Fraction of the mass where some |x_k| > 0.4 box.
double boundary_mass_fraction(const FieldState& u);

double virial(const FieldState& u, double tail_tol = 1e-8);
double morawetz_phi(double r, double radius);
double morawetz_potential(const FieldState& u, double radius);

FieldState scaling_transform(const FieldState& u, double lambda);
FieldState galilean_transform(const FieldState& u, const std::array<double, 2>& xi0);
FieldState pseudoconformal_transform(const FieldState& u);
std::vector<FieldState> pseudoconformal_trajectory(const std::vector<FieldState>& traj);

// Band-limited (trigonometric) interpolant of u at arbitrary points given per
// axis; the result lives on the tensor grid pts0 x pts1 (pts1 ignored in 1-D).
// Points outside the box evaluate to zero.
std::vector<cplx> fourier_resample(const FieldState& u, const std::vector<double>& pts0,
                                   const std::vector<double>& pts1);

// Spectral energy fraction with some |k_j| above frac * k_Nyquist.
double high_band_fraction(const FieldState& u, double frac);

struct GnTerms {
  double lhs;  // int |u|^{2+4/d}
  double rhs;  // C_d ||u||^{4/d} ||grad u||^2
};
GnTerms gn_terms(const FieldState& u, double c_d);
bool gn_check(const FieldState& u, double c_d, double slack = 1e-10);

// Complex white noise smoothed by a Gaussian Fourier cutoff (a random fraction
// of the Nyquist wavenumber) and multiplied by a Gaussian envelope of random
// width and centre.
struct RandomFieldOptions {
  double cutoff_min = 0.05, cutoff_max = 0.5;  // fractions of k_Nyquist
  double width_min = 0.5, width_max = 4.0;
  double center_spread = 3.0;                  // centres uniform in [-c, c]^d
};
FieldState random_smooth_field(const GridSpec& grid, std::mt19937_64& rng, const RandomFieldOptions& opts = {});

void write_snapshot_csv(const FieldState& u, const std::string& path);
FieldState read_snapshot_csv(const std::string& path);

}  // namespace nlslab
