#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <cstdint>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "nlslab/fields.hpp"
#include "nlslab/groundstate.hpp"
#include "nlslab/interp.hpp"

namespace nlslab {

// L  = -Delta + 1 - (d+4)/d Q^{4/d}
// L- = -Delta + 1 - Q^{4/d}
// Free = -Delta + 1
enum class OperatorKind { L, Lminus, Free };

// Sector ell of the operator, written for u(x) = r^ell w(r) Y_ell. The
// matrix acts on w at cell centres r_i = (i + 1/2) h, i < n, as
//   -w'' - (d + 2 ell - 1)/r w' + V w,
// with sixth-order stencils, even reflection at r = 0 and w = 0 beyond R.
struct SectorOperator {
  int d = 0;
  int ell = 0;
  OperatorKind kind = OperatorKind::L;
  double h = 0.0;
  double radius = 0.0;
  std::vector<double> grid;
  std::vector<double> potential;
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;

  std::size_t n() const { return grid.size(); }
  // Apply to samples of the radial factor u(r) (not w).
  std::vector<double> apply(const std::vector<double>& u) const;
};

struct SectorOptions {
  int n = 800;
  double radius = 20.0;
  bool check_grid = false;  // compare the lowest eigenvalue against n/2
  double grid_tol = 1e-5;
};

SectorOperator build_sector_operator(const RadialProfile& profile, int ell, OperatorKind kind,
                                     const SectorOptions& opts = {});

struct Eigenpairs {
  std::vector<double> values;       // ascending real parts
  Eigen::MatrixXd vectors;          // columns, radial factor u at the cell centres
  double max_imag = 0.0;            // largest |Im| among the returned values
  int iterations = 0;
};

// The k lowest eigenpairs by shift-invert subspace iteration.
Eigenpairs lowest_eigenpairs(const SectorOperator& op, int k, double tol = 1e-13);

struct NegativeEigenpair {
  double eigenvalue;  // -lambda_d
  CellRadial chi0;    // unit L^2(R^d) norm, positive
};

NegativeEigenpair negative_eigenpair(const SectorOperator& op);

// |S^{d-1}| int f(r)^2 r^{d-1} dr for a cell-centred radial function.
double radial_norm_sq(const CellRadial& f, int d);

struct SpectralData {
  int d = 0;
  double lambda_d = 0.0;
  CellRadial chi0;
  double gap = 0.0;             // lowest ell = 0 eigenvalue of L above -lambda_d
  double kernel_ell1 = 0.0;     // lowest ell = 1 eigenvalue of L
  double lminus_ground = 0.0;   // lowest ell = 0 eigenvalue of L-
  double coercivity = std::numeric_limits<double>::quiet_NaN();
  double chi0_norm = 0.0;
};

SpectralData compute_spectral_data(const RadialProfile& profile, const SectorOptions& opts = {});

struct IdentityResidual {
  std::string name;
  double residual;  // relative L^2 norm
  bool expected_zero;
};

struct IdentityReport {
  int d = 0;
  std::vector<IdentityResidual> entries;
  double tolerance = 1e-5;
  bool all_pass() const;
};

IdentityReport operator_identity_suite(const RadialProfile& profile, const SectorOptions& opts = {},
                                       double tolerance = 1e-5);

struct CoercivityOptions {
  int n = 0;         // points per dimension; 0 picks 256 (d = 1) or 128 (d = 2)
  double box = 0.0;  // 0 picks 40 (d = 1) or 24 (d = 2)
  std::uint64_t seed = 1;
  bool include_structured = true;
};

// The linearized energy form
//   B(g) = 1/2 ||grad g||^2 + 1/2 ||g||^2 - (d+2)/(2d) int Q^{4/d}|g|^2 - (1/d) Re int Q^{4/d} g^2
// on a periodic Cartesian grid (d = 1, 2), with the L^2 projection onto the
// orthogonal complement of {chi0, i chi0, Q_{x_j}, i Q_{x_j}}.
class CoercivityForm {
 public:
  CoercivityForm(const SpectralData& spectral, const RadialProfile& profile, const CoercivityOptions& opts = {});
  const GridSpec& grid() const;
  double value(const FieldState& g) const;
  double h1_norm_sq(const FieldState& g) const;
  FieldState project(const FieldState& g) const;
  // |(g, c)| for each orthonormalized constraint direction c.
  std::vector<double> constraints(const FieldState& g) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

struct CoercivityResult {
  double minimum = 0.0;
  double mean = 0.0;
  int trials = 0;
  int positive = 0;
  double max_constraint = 0.0;  // worst |(g, constraint)| after projection
  std::vector<double> values;
};

// Minimum over randomized trials of the linearized energy form on the
// orthogonal complement of {chi0, i chi0, Q_{x_j}, i Q_{x_j}}, ||g||_{H^1} = 1.
// Only d = 1, 2 (periodic Cartesian grids).
CoercivityResult coercivity_trials(const SpectralData& spectral, const RadialProfile& profile,
                                   int n_trials, const CoercivityOptions& opts = {});
double coercivity_estimate(const SpectralData& spectral, const RadialProfile& profile, int n_trials,
                           const CoercivityOptions& opts = {});

std::string spectral_report_json(const SpectralData& data, const IdentityReport& identities);

}  // namespace nlslab
