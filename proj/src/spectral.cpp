#include "nlslab/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <json.hpp>
#include <random>

#include "nlslab/error.hpp"

namespace nlslab {

namespace {

constexpr double kD2[4] = {-49.0 / 18, 3.0 / 2, -3.0 / 20, 1.0 / 90};
constexpr double kD1[4] = {0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};

double coupling(int d, OperatorKind kind) {
  switch (kind) {
    case OperatorKind::L: return (d + 4.0) / d;
    case OperatorKind::Lminus: return 1.0;
    case OperatorKind::Free: return 0.0;
  }
  return 0.0;
}

SectorOperator assemble(const RadialProfile& profile, int ell, OperatorKind kind, int n, double radius) {
  SectorOperator op;
  op.d = profile.d;
  op.ell = ell;
  op.kind = kind;
  op.radius = radius;
  op.h = radius / n;
  op.grid.resize(static_cast<std::size_t>(n));
  op.potential.resize(static_cast<std::size_t>(n));
  const RadialEvaluator q(profile);
  const double c = coupling(profile.d, kind);
  const double pw = 4.0 / profile.d;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * op.h;
    op.grid[static_cast<std::size_t>(i)] = r;
    op.potential[static_cast<std::size_t>(i)] = 1.0 - c * std::pow(q.value(r), pw);
  }
  const int dd = profile.d + 2 * ell;
  const double h2 = op.h * op.h;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 7);
  for (int i = 0; i < n; ++i) {
    const double r = op.grid[static_cast<std::size_t>(i)];
    for (int k = -3; k <= 3; ++k) {
      int j = i + k;
      const int ak = std::abs(k);
      const double sgn = k > 0 ? 1.0 : (k < 0 ? -1.0 : 0.0);
      double v = -kD2[ak] / h2 - (dd - 1) / r * sgn * kD1[ak] / op.h;
      if (k == 0) v += op.potential[static_cast<std::size_t>(i)];
      if (j < 0) j = -j - 1;
      if (j >= n) continue;
      trip.emplace_back(i, j, v);
    }
  }
  op.matrix.resize(n, n);
  op.matrix.setFromTriplets(trip.begin(), trip.end());
  op.matrix.makeCompressed();
  return op;
}

// L^2(R^d) norm of a cell-centred radial factor, skipping the outermost rows
// whose stencils reach past R.
double cell_norm(const std::vector<double>& f, const std::vector<double>& r, double h, int d,
                 std::size_t skip_tail) {
  double acc = 0.0;
  const std::size_t stop = f.size() > skip_tail ? f.size() - skip_tail : 0;
  for (std::size_t i = 0; i < stop; ++i) acc += f[i] * f[i] * std::pow(r[i], d - 1);
  return std::sqrt(sphere_area(d) * h * acc);
}

}  // namespace

std::vector<double> SectorOperator::apply(const std::vector<double>& u) const {
  if (u.size() != n()) throw std::invalid_argument("SectorOperator::apply: size mismatch");
  Eigen::VectorXd w(static_cast<Eigen::Index>(n()));
  for (std::size_t i = 0; i < n(); ++i) w[static_cast<Eigen::Index>(i)] = u[i] / std::pow(grid[i], ell);
  const Eigen::VectorXd aw = matrix * w;
  std::vector<double> out(n());
  for (std::size_t i = 0; i < n(); ++i) out[i] = aw[static_cast<Eigen::Index>(i)] * std::pow(grid[i], ell);
  return out;
}

SectorOperator build_sector_operator(const RadialProfile& profile, int ell, OperatorKind kind,
                                     const SectorOptions& opts) {
  if (ell != 0 && ell != 1) throw std::invalid_argument("build_sector_operator: ell must be 0 or 1");
  if (opts.n < 200) throw std::invalid_argument("build_sector_operator: need n >= 200");
  auto op = assemble(profile, ell, kind, opts.n, opts.radius);
  if (opts.check_grid) {
    const auto coarse = assemble(profile, ell, kind, opts.n / 2, opts.radius);
    const double fine_mu = lowest_eigenpairs(op, 1).values[0];
    const double coarse_mu = lowest_eigenpairs(coarse, 1).values[0];
    if (std::abs(fine_mu - coarse_mu) > opts.grid_tol * std::max(1.0, std::abs(fine_mu)))
      throw Error(ErrorCode::GridTooCoarse, "lowest eigenvalue moved from " + std::to_string(coarse_mu) +
                                                " to " + std::to_string(fine_mu) + " between n/2 and n");
  }
  return op;
}

Eigenpairs lowest_eigenpairs(const SectorOperator& op, int k, double tol) {
  const auto n = static_cast<Eigen::Index>(op.n());
  const Eigen::Index b = std::min<Eigen::Index>(std::max(2 * k + 6, 16), n);
  const double sigma = *std::min_element(op.potential.begin(), op.potential.end()) - 1.0;

  Eigen::SparseMatrix<double> shifted = op.matrix;
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
  shifted.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(shifted);
  if (lu.info() != Eigen::Success) throw std::runtime_error("lowest_eigenpairs: factorization failed");

  std::mt19937_64 rng(20240531);
  std::normal_distribution<double> g;
  Eigen::MatrixXd x(n, b);
  for (Eigen::Index j = 0; j < b; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = g(rng);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
  x = qr.householderQ() * Eigen::MatrixXd::Identity(n, b);

  Eigenpairs out;
  std::vector<double> prev(static_cast<std::size_t>(k), std::numeric_limits<double>::infinity());
  for (int it = 1; it <= 5000; ++it) {
    Eigen::MatrixXd y = lu.solve(x);
    qr.compute(y);
    x = qr.householderQ() * Eigen::MatrixXd::Identity(n, b);
    const Eigen::MatrixXd hmat = x.transpose() * (op.matrix * x);
    Eigen::EigenSolver<Eigen::MatrixXd> es(hmat);
    const auto& ev = es.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(b));
    for (Eigen::Index i = 0; i < b; ++i) order[static_cast<std::size_t>(i)] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto c) { return ev[a].real() < ev[c].real(); });

    bool done = true;
    for (int i = 0; i < k; ++i) {
      const double v = ev[order[static_cast<std::size_t>(i)]].real();
      if (std::abs(v - prev[static_cast<std::size_t>(i)]) > tol * std::max(1.0, std::abs(v))) done = false;
      prev[static_cast<std::size_t>(i)] = v;
    }
    if (done || it == 5000) {
      out.iterations = it;
      out.vectors.resize(n, k);
      for (int i = 0; i < k; ++i) {
        const auto idx = order[static_cast<std::size_t>(i)];
        out.values.push_back(ev[idx].real());
        out.max_imag = std::max(out.max_imag, std::abs(ev[idx].imag()));
        Eigen::VectorXd v = x * es.eigenvectors().col(idx).real();
        v.normalize();
        for (Eigen::Index r = 0; r < n; ++r) v[r] *= std::pow(op.grid[static_cast<std::size_t>(r)], op.ell);
        out.vectors.col(i) = v;
      }
      break;
    }
  }
  return out;
}

double radial_norm_sq(const CellRadial& f, int d) {
  // Simpson on a vertex grid four times finer than the cells.
  const double h = f.h() / 4;
  auto m = static_cast<std::size_t>(std::ceil(f.extent() / h));
  if (m % 2) ++m;
  double acc = 0.0;
  for (std::size_t i = 0; i <= m; ++i) {
    const double r = h * static_cast<double>(i);
    const double v = f.value(r);
    const double w = (i == 0 || i == m) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * v * v * std::pow(r, d - 1);
  }
  return sphere_area(d) * acc * h / 3.0;
}

NegativeEigenpair negative_eigenpair(const SectorOperator& op) {
  if (op.kind != OperatorKind::L || op.ell != 0)
    throw std::invalid_argument("negative_eigenpair: needs the ell = 0 sector of L");
  const auto ep = lowest_eigenpairs(op, 1);
  if (!(ep.values[0] < 0)) throw Error(ErrorCode::NoNegativeEigenvalue, "lowest eigenvalue " + std::to_string(ep.values[0]));
  // Subspace iteration converges the eigenvalue much faster than the vector;
  // polish with inverse iteration shifted just below the eigenvalue.
  const auto n = static_cast<Eigen::Index>(op.n());
  Eigen::SparseMatrix<double> shifted = op.matrix;
  const double sigma = ep.values[0] - 1e-6 * std::max(1.0, std::abs(ep.values[0]));
  for (Eigen::Index i = 0; i < n; ++i) shifted.coeffRef(i, i) -= sigma;
  shifted.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(shifted);
  Eigen::VectorXd w = ep.vectors.col(0);
  if (lu.info() == Eigen::Success)
    for (int it = 0; it < 4; ++it) w = lu.solve(w).normalized();
  std::vector<double> v(op.n());
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    v[i] = w[static_cast<Eigen::Index>(i)];
    sum += v[i];
  }
  if (sum < 0)
    for (auto& x : v) x = -x;
  CellRadial raw(op.h, v);
  const double nrm = std::sqrt(radial_norm_sq(raw, op.d));
  for (auto& x : v) x /= nrm;
  return {ep.values[0], CellRadial(op.h, std::move(v))};
}

SpectralData compute_spectral_data(const RadialProfile& profile, const SectorOptions& opts) {
  SpectralData s;
  s.d = profile.d;
  const auto l0 = build_sector_operator(profile, 0, OperatorKind::L, opts);
  const auto neg = negative_eigenpair(l0);
  s.lambda_d = -neg.eigenvalue;
  s.chi0 = neg.chi0;
  s.chi0_norm = std::sqrt(radial_norm_sq(s.chi0, profile.d));
  s.gap = lowest_eigenpairs(l0, 2).values[1];
  SectorOptions plain = opts;
  plain.check_grid = false;
  s.kernel_ell1 = lowest_eigenpairs(build_sector_operator(profile, 1, OperatorKind::L, plain), 1).values[0];
  s.lminus_ground =
      lowest_eigenpairs(build_sector_operator(profile, 0, OperatorKind::Lminus, plain), 1).values[0];
  return s;
}

bool IdentityReport::all_pass() const {
  for (const auto& e : entries) {
    const bool small = e.residual < tolerance;
    if (small != e.expected_zero) return false;
  }
  return true;
}

IdentityReport operator_identity_suite(const RadialProfile& profile, const SectorOptions& opts,
                                       double tolerance) {
  SectorOptions o = opts;
  o.check_grid = false;
  const auto l0 = build_sector_operator(profile, 0, OperatorKind::L, o);
  const auto l1 = build_sector_operator(profile, 1, OperatorKind::L, o);
  const auto lm = build_sector_operator(profile, 0, OperatorKind::Lminus, o);
  const RadialEvaluator ev(profile);
  const int d = profile.d;
  const std::size_t n = l0.n();
  std::vector<double> q(n), dq(n), lam(n), r2q(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = l0.grid[i];
    q[i] = ev.value(r);
    dq[i] = ev.derivative(r);
    lam[i] = 0.5 * d * q[i] + r * dq[i];
    r2q[i] = r * r * q[i];
  }
  const std::size_t skip = 3;
  const double nq = cell_norm(q, l0.grid, l0.h, d, skip);
  const double ndq = cell_norm(dq, l0.grid, l0.h, d, skip);

  IdentityReport rep;
  rep.d = d;
  rep.tolerance = tolerance;
  auto add = [&](std::string name, std::vector<double> res, double scale, bool expect) {
    rep.entries.push_back({std::move(name), cell_norm(res, l0.grid, l0.h, d, skip) / scale, expect});
  };

  auto a = l0.apply(lam);
  for (std::size_t i = 0; i < n; ++i) a[i] += 2 * q[i];
  add("L(LambdaQ)+2Q", a, nq, true);

  add("L(dQ) ell=1", l1.apply(dq), ndq, true);
  add("Lminus(Q)", lm.apply(q), nq, true);

  const auto lr2q = lm.apply(r2q);
  std::vector<double> plus(n), minus(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double rest = 2 * d * q[i] + 4 * l0.grid[i] * dq[i];
    plus[i] = lr2q[i] + rest;
    minus[i] = lr2q[i] - rest;
  }
  add("Lminus(r^2Q)+2dQ+4rQ'", plus, nq, true);
  // The rearrangement with the opposite sign is not an identity; kept in the
  // report so the discrepancy stays visible.
  add("Lminus(r^2Q)-2dQ-4rQ' (opposite sign)", minus, nq, false);
  return rep;
}

std::string spectral_report_json(const SpectralData& s, const IdentityReport& rep) {
  nlohmann::ordered_json j;
  j["d"] = s.d;
  j["lambda_d"] = s.lambda_d;
  j["gap"] = s.gap;
  j["kernel_ell1"] = s.kernel_ell1;
  j["lminus_ground"] = s.lminus_ground;
  j["chi0_norm"] = s.chi0_norm;
  if (std::isnan(s.coercivity)) j["coercivity"] = nullptr;
  else j["coercivity"] = s.coercivity;
  auto& table = j["residuals"];
  table = nlohmann::ordered_json::array();
  for (const auto& e : rep.entries)
    table.push_back({{"identity", e.name}, {"residual", e.residual}, {"expected_zero", e.expected_zero},
                     {"pass", (e.residual < rep.tolerance) == e.expected_zero}});
  j["tolerance"] = rep.tolerance;
  j["all_pass"] = rep.all_pass();
  return j.dump(2);
}

}  // namespace nlslab
