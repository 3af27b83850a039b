#pragma once

#include <span>
#include <vector>

namespace nlslab {

// Piecewise cubic Hermite interpolant on a uniform grid x_i = x0 + i*h.
// Outside [x0, x_last] the caller decides what to do; eval clamps to the
// end intervals.
class UniformHermite {
 public:
  UniformHermite() = default;
  UniformHermite(double x0, double h, std::vector<double> values, std::vector<double> slopes);

  // Fritsch-Carlson limiting of the supplied slopes so that the interpolant
  // is monotone on every interval where the data are.
  void limit_monotone();

  double x0() const { return x0_; }
  double h() const { return h_; }
  double x_last() const { return x0_ + h_ * static_cast<double>(values_.size() - 1); }
  std::size_t size() const { return values_.size(); }
  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& slopes() const { return slopes_; }

  double value(double x) const;
  double derivative(double x) const;

 private:
  double x0_ = 0.0;
  double h_ = 1.0;
  std::vector<double> values_;
  std::vector<double> slopes_;
};

enum class LeftEdge {
  OneSided,
  EvenCell,   // f(-x) = f(x), first node at h/2
  OddVertex,  // f(-x) = -f(x), first node at 0
};

// Sixth-order central first derivative of uniformly sampled data, one-sided
// at the right end and at the left end unless a reflection is given.
std::vector<double> fd_derivative(std::span<const double> f, double h, LeftEdge left);

}  // namespace nlslab

namespace nlslab {

// Radial function sampled at cell centres r_i = (i + 1/2) h, extended evenly
// through r = 0 and by zero beyond the last cell. Evaluated with local
// 8-point Lagrange interpolation.
class CellRadial {
 public:
  CellRadial() = default;
  CellRadial(double h, std::vector<double> samples);
  double value(double r) const;
  double derivative(double r) const;
  double h() const { return h_; }
  double extent() const { return h_ * static_cast<double>(f_.size()); }
  const std::vector<double>& samples() const { return f_; }

 private:
  double at(long j) const;
  double h_ = 1.0;
  std::vector<double> f_;
};

}  // namespace nlslab
