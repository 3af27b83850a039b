#include "nlslab/interp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nlslab {

UniformHermite::UniformHermite(double x0, double h, std::vector<double> values,
                               std::vector<double> slopes)
    : x0_(x0), h_(h), values_(std::move(values)), slopes_(std::move(slopes)) {
  if (values_.size() < 2 || values_.size() != slopes_.size() || !(h_ > 0))
    throw std::invalid_argument("UniformHermite: need >= 2 nodes, matching slopes, h > 0");
}

void UniformHermite::limit_monotone() {
  const std::size_t n = values_.size();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double secant = (values_[i + 1] - values_[i]) / h_;
    if (secant == 0.0) {
      slopes_[i] = 0.0;
      slopes_[i + 1] = 0.0;
      continue;
    }
    double a = slopes_[i] / secant;
    double b = slopes_[i + 1] / secant;
    if (a < 0) slopes_[i] = a = 0.0;
    if (b < 0) slopes_[i + 1] = b = 0.0;
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      slopes_[i] = tau * a * secant;
      slopes_[i + 1] = tau * b * secant;
    }
  }
}

namespace {
struct Cell {
  std::size_t i;
  double s;
};

Cell locate(double x, double x0, double h, std::size_t n) {
  double u = (x - x0) / h;
  if (u <= 0) return {0, u};
  auto i = static_cast<std::size_t>(u);
  if (i >= n - 1) i = n - 2;
  return {i, u - static_cast<double>(i)};
}
}  // namespace

double UniformHermite::value(double x) const {
  const auto [i, s] = locate(x, x0_, h_, values_.size());
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1, h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2, h11 = s3 - s2;
  return h00 * values_[i] + h10 * h_ * slopes_[i] + h01 * values_[i + 1] +
         h11 * h_ * slopes_[i + 1];
}

double UniformHermite::derivative(double x) const {
  const auto [i, s] = locate(x, x0_, h_, values_.size());
  const double s2 = s * s;
  const double d00 = 6 * s2 - 6 * s, d10 = 3 * s2 - 4 * s + 1;
  const double d01 = -6 * s2 + 6 * s, d11 = 3 * s2 - 2 * s;
  return (d00 * values_[i] + d01 * values_[i + 1]) / h_ + d10 * slopes_[i] +
         d11 * slopes_[i + 1];
}

std::vector<double> fd_derivative(std::span<const double> f, double h, LeftEdge left) {
  const auto n = static_cast<long>(f.size());
  if (n < 8) throw std::invalid_argument("fd_derivative: need at least 8 samples");
  static constexpr double c[4] = {0.0, 3.0 / 4, -3.0 / 20, 1.0 / 60};
  static constexpr double w[7] = {-49.0 / 20, 6.0, -15.0 / 2, 20.0 / 3, -15.0 / 4, 6.0 / 5,
                                  -1.0 / 6};
  auto at = [&](long j) -> double {
    if (j >= 0) return f[static_cast<std::size_t>(j)];
    if (left == LeftEdge::EvenCell) return f[static_cast<std::size_t>(-j - 1)];
    return -f[static_cast<std::size_t>(-j)];
  };
  std::vector<double> df(f.size());
  for (long i = 0; i < n; ++i) {
    const bool left_ok = left != LeftEdge::OneSided || i >= 3;
    if (i + 3 < n && left_ok) {
      double acc = 0.0;
      for (long k = 1; k <= 3; ++k) acc += c[k] * (at(i + k) - at(i - k));
      df[static_cast<std::size_t>(i)] = acc / h;
    } else {
      const long dir = (i + 3 < n) ? 1 : -1;
      double acc = 0.0;
      for (long k = 0; k < 7; ++k) acc += w[k] * f[static_cast<std::size_t>(i + dir * k)];
      df[static_cast<std::size_t>(i)] = static_cast<double>(dir) * acc / h;
    }
  }
  return df;
}

}  // namespace nlslab

namespace nlslab {

CellRadial::CellRadial(double h, std::vector<double> samples) : h_(h), f_(std::move(samples)) {
  if (f_.size() < 8 || !(h_ > 0)) throw std::invalid_argument("CellRadial: need >= 8 samples, h > 0");
}

double CellRadial::at(long j) const {
  if (j < 0) j = -j - 1;
  if (j >= static_cast<long>(f_.size())) return 0.0;
  return f_[static_cast<std::size_t>(j)];
}

double CellRadial::value(double r) const {
  r = std::abs(r);
  if (r >= extent() + 4 * h_) return 0.0;
  const double u = r / h_ - 0.5;  // fractional index
  const long j0 = static_cast<long>(std::floor(u)) - 3;
  double acc = 0.0;
  for (long a = 0; a < 8; ++a) {
    double w = 1.0;
    for (long b = 0; b < 8; ++b)
      if (b != a) w *= (u - static_cast<double>(j0 + b)) / static_cast<double>(a - b);
    acc += w * at(j0 + a);
  }
  return acc;
}

double CellRadial::derivative(double r) const {
  const double s = r < 0 ? -1.0 : 1.0;
  r = std::abs(r);
  if (r >= extent() + 4 * h_) return 0.0;
  const double u = r / h_ - 0.5;
  const long j0 = static_cast<long>(std::floor(u)) - 3;
  double acc = 0.0;
  for (long a = 0; a < 8; ++a) {
    double denom = 1.0;
    for (long b = 0; b < 8; ++b)
      if (b != a) denom *= static_cast<double>(a - b);
    double num = 0.0;
    for (long m = 0; m < 8; ++m) {
      if (m == a) continue;
      double prod = 1.0;
      for (long b = 0; b < 8; ++b)
        if (b != a && b != m) prod *= u - static_cast<double>(j0 + b);
      num += prod;
    }
    acc += num / denom * at(j0 + a);
  }
  return s * acc / h_;
}

}  // namespace nlslab
