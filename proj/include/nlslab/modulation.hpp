#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nlslab/fields.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/spectral.hpp"

namespace nlslab {

// Decomposition convention:
//   eps(x) = e^{i gamma} e^{i x.xi} lambda^{d/2} u(lambda x + x~) - Q(x),
// with (eps, chi0) = (eps, i chi0) = (eps, Q_{x_j}) = (eps, i Q_{x_j}) = 0 and
// (f, g) = Re int conj(f) g. SolitonParams::x0 holds x~ here.
class ModulationBasis {
 public:
  ModulationBasis(const RadialProfile& profile, const SpectralData& spectral);

  int d() const { return d_; }
  const RadialEvaluator& q() const { return q_; }
  const CellRadial& chi0() const { return chi0_; }
  // chi0 resampled onto a fine vertex grid for fast evaluation.
  double chi(double r) const { return r < chi_.x_last() ? chi_.value(r) : 0.0; }
  double dchi(double r) const { return r < chi_.x_last() ? chi_.derivative(r) : 0.0; }
  double lambda_d() const { return lambda_d_; }
  double q_norm() const { return q_norm_; }
  double q_chi0() const { return q_chi0_; }      // (Q, chi0)
  double grad_q_sq() const { return grad_q_sq_; }
  std::size_t size() const { return static_cast<std::size_t>(2 * d_ + 2); }

 private:
  int d_;
  RadialEvaluator q_;
  CellRadial chi0_;
  UniformHermite chi_;
  double lambda_d_, q_norm_, q_chi0_, grad_q_sq_;
};

struct DecomposeOptions {
  double alpha = 0.3;      // basin radius, in units of ||Q||
  double tol_orth = 1e-9;  // residual bound, in units of ||Q||
  int max_iter = 40;
  int max_halvings = 20;
  bool build_epsilon = true;
};

struct Decomposition {
  SolitonParams params;
  FieldState epsilon;              // on the input grid, reference frame
  std::vector<double> residuals;   // order: chi0, i chi0, Q_{x_j}, i Q_{x_j}
  double distance = 0.0;           // ||eps||
  double proximity = 0.0;          // ||u - T_guess^{-1} Q|| at the initial guess
  int iterations = 0;
  double eps_x2q = 0.0;            // (eps, |x|^2 Q)
  double eps2_lambda_q = 0.0;      // (Im eps, Lambda Q)
};

// Parameters the decomposition assigns to a member of the soliton family
//   e^{-i theta - it|xi|^2} e^{i lambda^2 t} e^{i x.xi} lambda^{d/2} Q(lambda(x - 2t xi) + x0).
SolitonParams decomposition_of_soliton(const SolitonParams& family, double t, int d);

double proximity(const FieldState& u, const ModulationBasis& basis, const SolitonParams& guess);

Decomposition decompose(const FieldState& u, const ModulationBasis& basis, const SolitonParams& guess = {},
                        const DecomposeOptions& opts = {});

// Residuals of the orthogonality conditions evaluated directly on dec.epsilon.
std::vector<double> orthogonality_residuals(const Decomposition& dec, const ModulationBasis& basis);
std::vector<double> orthogonality_residuals(const FieldState& eps, const ModulationBasis& basis);

// Jacobian of the conditions w.r.t. (lambda, gamma, x~, xi) at the given
// parameters; rows follow the residual order.
Eigen::MatrixXd modulation_jacobian(const FieldState& u, const ModulationBasis& basis, const SolitonParams& p);
// Leading-order Jacobian at u = Q, identity parameters.
Eigen::MatrixXd reference_jacobian(const ModulationBasis& basis);

struct TrackSample {
  double t, s;
  double lambda, gamma;
  std::array<double, 2> x, xi;
  double eps_l2, residual_max;
  double eps_x2q, eps2_lambda_q;
  int iterations;
};

struct ModulationTrack {
  int d = 1;
  std::vector<TrackSample> samples;
};

// Warm-started decompositions along a trajectory; s(t) = int lambda^{-2} dt by
// the trapezoid rule, signed with the direction of time.
ModulationTrack track(const std::vector<FieldState>& trajectory, const ModulationBasis& basis,
                      const SolitonParams& guess = {}, const DecomposeOptions& opts = {});

struct RateSeries {
  std::vector<double> s;
  std::vector<double> lambda_rate;   // lambda_s / lambda
  std::vector<double> xi_rate;       // |xi_s - (lambda_s/lambda) xi|
  std::vector<double> gamma_rate;    // gamma_s + 1 - (x_s/lambda).xi - |xi|^2
  std::vector<double> x_rate;        // |x_s/lambda + 2 xi|
  std::vector<double> eps;
  // Per-unit-s averages of |rate|, ||eps||, ||eps||^2.
  double avg_lambda = 0, avg_xi = 0, avg_gamma = 0, avg_x = 0, avg_eps = 0, avg_eps_sq = 0;
};

RateSeries modulation_rates(const ModulationTrack& track, double max_ds = 0.1);

void write_track_csv(const ModulationTrack& track, const std::string& path);

}  // namespace nlslab
