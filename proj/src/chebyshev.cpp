#include "yfstab/chebyshev.hpp"

#include <cmath>

#include "yfstab/error.hpp"

namespace yfstab {

std::vector<double> ChebyshevInterpolant::nodes(double lo, double hi, int count) {
  std::vector<double> x(count);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  for (int j = 0; j < count; ++j) {
    // Descending order from hi to lo; the middle node is exactly the midpoint.
    const int k = count - 1;
    x[j] = (2 * j == k) ? mid : mid + half * std::cos(M_PI * j / k);
  }
  return x;
}

ChebyshevInterpolant::ChebyshevInterpolant(double lo, double hi,
                                           const std::function<std::complex<double>(double)>& f, int count)
    : lo_(lo), hi_(hi) {
  if (count < 2 || !(hi > lo)) throw Error(ErrorCode::InvalidArgument, "Chebyshev interpolant needs >=2 nodes");
  x_ = nodes(lo, hi, count);
  f_.reserve(count);
  for (double x : x_) f_.push_back(f(x));
}

std::complex<double> ChebyshevInterpolant::operator()(double x) const {
  const int n = size();
  std::complex<double> num = 0.0;
  double den = 0.0;
  for (int j = 0; j < n; ++j) {
    const double diff = x - x_[j];
    if (diff == 0.0) return f_[j];
    double w = (j % 2 == 0) ? 1.0 : -1.0;
    if (j == 0 || j == n - 1) w *= 0.5;
    w /= diff;
    num += w * f_[j];
    den += w;
  }
  return num / den;
}

}  // namespace yfstab
