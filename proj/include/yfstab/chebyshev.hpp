#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace yfstab {

/// Polynomial interpolant through Chebyshev points of the second kind on
/// [lo, hi], evaluated with the barycentric formula.
class ChebyshevInterpolant {
 public:
  ChebyshevInterpolant() = default;
  ChebyshevInterpolant(double lo, double hi, const std::function<std::complex<double>(double)>& f, int nodes);

  static std::vector<double> nodes(double lo, double hi, int count);

  std::complex<double> operator()(double x) const;

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  int size() const { return static_cast<int>(x_.size()); }
  const std::vector<std::complex<double>>& values() const { return f_; }

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> x_;
  std::vector<std::complex<double>> f_;
};

}  // namespace yfstab
