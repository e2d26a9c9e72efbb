#include "yfstab/kinematics.hpp"

#include <string>

#include "yfstab/error.hpp"

namespace yfstab {

Mass::Mass(double value) : value_(value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw Error(ErrorCode::InvalidArgument, "mass must be finite and >= 0, got " + std::to_string(value));
  }
}

double omega(const Vec3& p, Mass mass) { return omega_from_norm2(p.norm2(), mass); }

double omega_from_norm2(double p2, Mass mass) { return std::sqrt(p2 + mass.squared()); }

double minkowski_square(const FourVector& v) { return v.e * v.e - v.p.norm2(); }

double off_shellness(const FourVector& v, Mass mass) { return v.e - omega(v.p, mass); }

FourVector on_shell(const Vec3& p, Mass mass, int sign) {
  const double w = omega(p, mass);
  return {sign >= 0 ? w : -w, p};
}

}  // namespace yfstab
