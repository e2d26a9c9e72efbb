#pragma once

// Minkowski momenta with signature (+,-,-,-), natural units.

#include <cmath>

namespace yfstab {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  constexpr Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  constexpr Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  constexpr Vec3 operator-() const { return {-x, -y, -z}; }
  constexpr Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  constexpr double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  constexpr double norm2() const { return dot(*this); }
  double norm() const { return std::sqrt(norm2()); }
  constexpr bool operator==(const Vec3&) const = default;
};

constexpr Vec3 operator*(double s, const Vec3& v) { return v * s; }

struct FourVector {
  double e = 0.0;  // k^0
  Vec3 p;          // spatial part

  constexpr FourVector operator+(const FourVector& o) const { return {e + o.e, p + o.p}; }
  constexpr FourVector operator-(const FourVector& o) const { return {e - o.e, p - o.p}; }
  constexpr FourVector operator-() const { return {-e, -p}; }
  constexpr bool operator==(const FourVector&) const = default;
};

/// Nonnegative mass; construction validates.
class Mass {
 public:
  explicit Mass(double value);
  double value() const noexcept { return value_; }
  double squared() const noexcept { return value_ * value_; }

 private:
  double value_;
};

/// Energy on the mass shell: sqrt(|p|^2 + m^2).
double omega(const Vec3& p, Mass mass);
/// Same, from |p|^2 directly.
double omega_from_norm2(double p2, Mass mass);

double minkowski_square(const FourVector& v);

/// kappa = k^0 - omega(k, m); zero exactly on the forward shell.
double off_shellness(const FourVector& v, Mass mass);

/// Forward (sign=+1) or backward (sign=-1) on-shell point above p.
FourVector on_shell(const Vec3& p, Mass mass, int sign = +1);

}  // namespace yfstab
