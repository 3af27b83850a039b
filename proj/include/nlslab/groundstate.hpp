#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nlslab/interp.hpp"

namespace nlslab {

// Positive radial solution of Q'' + (d-1)/r Q' - Q + Q^{1+4/d} = 0 sampled on
// a uniform grid r_i = i*h, i = 0..N (N even).
struct RadialProfile {
  int d = 0;
  std::vector<double> r_grid;
  std::vector<double> q;
  std::vector<double> dq;
  double q0 = 0.0;
  double delta = 0.0;
  double mass_sq = 0.0;
  double r_max = 0.0;

  double h() const { return r_grid.size() > 1 ? r_grid[1] - r_grid[0] : 0.0; }
  double power() const { return 4.0 / d; }  // exponent 4/d of the nonlinearity
};

struct GroundStateOptions {
  double tol = 1e-10;
  double r_max = 0.0;     // 0 selects 30 (d <= 4) or 24 (d >= 5)
  double h = 0.005;       // output grid spacing (rounded to an even interval count)
  double tol_ode = 1e-8;  // pointwise ODE residual bound, relative to max(1, q0^{1+4/d})
};

double default_r_max(int d);

RadialProfile solve_ground_state(int d, const GroundStateOptions& opts = {});
RadialProfile solve_ground_state(int d, double tol, double r_max);

// Q, Q', Q'' at arbitrary radii. Q'' comes from the ODE itself.
class RadialEvaluator {
 public:
  explicit RadialEvaluator(const RadialProfile& profile);
  double value(double r) const;
  double derivative(double r) const;
  double second_derivative(double r) const;
  int d() const { return d_; }

 private:
  int d_;
  double q0_, r_max_, q_last_, delta_;
  UniformHermite interp_;
};

std::vector<double> evaluate_radial(const RadialProfile& profile, const std::vector<double>& points);

// Integral over R^d of a radial function sampled on the profile grid.
enum class RadialRule { Simpson, Trapezoid, TrapezoidEndCorrected };
double radial_integral(const RadialProfile& profile, const std::vector<double>& samples,
                       RadialRule rule = RadialRule::Simpson,
                       const std::vector<double>* sample_derivative = nullptr);
double sphere_area(int d);  // |S^{d-1}|

struct ProfileNorms {
  double mass_sq;    // ||Q||^2
  double grad_sq;    // ||grad Q||^2
  double potential;  // int Q^{2+4/d}
  double xq_sq;      // || |x| Q ||^2
};
ProfileNorms profile_norms(const RadialProfile& profile);

double pohozaev_energy(const RadialProfile& profile);
double gn_sharp_constant(const RadialProfile& profile);
double gradient_ratio_sup(const RadialProfile& profile, double alpha);

// Pointwise |Q'' + (d-1)/r Q' - Q + Q^{1+4/d}| on interior nodes, with Q''
// from a sixth-order difference of dq.
std::vector<double> ode_residual(const RadialProfile& profile);

void write_profile_csv(const RadialProfile& profile, const std::string& path);
RadialProfile read_profile_csv(const std::string& path);

}  // namespace nlslab
