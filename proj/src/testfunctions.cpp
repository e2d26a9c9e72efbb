#include "yfstab/testfunctions.hpp"

#include <algorithm>

#include "yfstab/error.hpp"

namespace yfstab {

double BumpProfile::taper(double a) {
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  return 0.5 * (1.0 + std::cos(M_PI * (a - 1.0)));
}

double BumpProfile::operator()(double u) const { return u * taper(std::abs(u)); }

double BumpProfile::derivative(double u) const {
  const double a = std::abs(u);
  if (a <= 1.0) return 1.0;
  if (a >= 2.0) return 0.0;
  return taper(a) - a * 0.5 * M_PI * std::sin(M_PI * (a - 1.0));
}

BumpProfile make_bump() { return {}; }

SpatialEnvelope::SpatialEnvelope(Vec3 c, double w, double a) : center(c), width(w), amplitude(a) {
  if (!(w > 0.0) || !std::isfinite(w)) throw Error(ErrorCode::InvalidArgument, "envelope width must be > 0");
  if (!std::isfinite(a)) throw Error(ErrorCode::InvalidArgument, "envelope amplitude must be finite");
}

nlohmann::json SpatialEnvelope::to_json() const {
  return {{"center", {center.x, center.y, center.z}}, {"width", width}, {"amplitude", amplitude}};
}

SpatialEnvelope SpatialEnvelope::from_json(const nlohmann::json& j) {
  const auto c = j.value("center", std::vector<double>{0.0, 0.0, 0.0});
  if (c.size() != 3) throw Error(ErrorCode::ConfigInvalid, "spatial.center: expected 3 components");
  return SpatialEnvelope({c[0], c[1], c[2]}, j.value("width", 1.0), j.value("amplitude", 1.0));
}

LineFunction regulator(const BumpProfile& bump, int n, const LineFunction& w_tilde, double r0) {
  if (n < 1) throw Error(ErrorCode::InsufficientN, "n must be a positive integer");
  const double radius = BumpProfile::support / n;
  if (radius > r0) {
    throw Error(ErrorCode::InsufficientN, "support 2/n = " + std::to_string(radius) +
                                              " exceeds the certified radius r0 = " + std::to_string(r0));
  }
  auto fn = [bump, n, w_tilde](double kappa) -> cplx {
    const double u = n * kappa;
    if (std::abs(u) >= BumpProfile::support) return 0.0;
    return bump(u) / w_tilde(kappa);
  };
  const double inv = 1.0 / n;
  return LineFunction(fn, radius, Smoothness::C1, {-inv, inv});
}

double RegulatorFamily::inverse_sup() const {
  const double window = std::min(1.0, r0);
  constexpr int samples = 4000;
  double sup = 0.0;
  for (int i = 0; i <= samples; ++i) {
    const double kappa = -window + 2.0 * window * i / samples;
    const double mag = std::abs(w_tilde(kappa));
    if (mag == 0.0) throw Error(ErrorCode::InvalidArgument, "w_tilde vanishes inside the regulator window");
    sup = std::max(sup, 1.0 / mag);
  }
  return sup;
}

cplx WavePacket::operator()(const FourVector& k) const {
  if (!reflected_) {
    const double env = spatial_(k.p);
    if (env == 0.0) return 0.0;
    return temporal_(k.e - omega(k.p, reference_mass_)) * env;
  }
  const double env = spatial_(-k.p);
  if (env == 0.0) return 0.0;
  return std::conj(temporal_(-k.e - omega(k.p, reference_mass_)) * env);
}

WavePacket WavePacket::conjugate() const { return WavePacket(temporal_, spatial_, reference_mass_, !reflected_); }

bool WavePacket::vanishes_on_shell(Mass m, ShellSign sign) const {
  if (!temporal_.compact()) return false;
  const double rt = temporal_.support_radius();
  const int sigma = sign_value(sign) * (reflected_ ? -1 : 1);
  const double c = spatial_.center.norm();
  const double rmin = std::max(0.0, c - spatial_.truncation_radius());
  const double rmax = c + spatial_.truncation_radius();
  if (sigma < 0) {
    const double closest = omega_from_norm2(rmin * rmin, m) + omega_from_norm2(rmin * rmin, reference_mass_);
    return closest > rt;
  }
  const double dm2 = std::abs(m.squared() - reference_mass_.squared());
  const double closest =
      dm2 / (omega_from_norm2(rmax * rmax, m) + omega_from_norm2(rmax * rmax, reference_mass_));
  return closest > rt;
}

cplx packet_eval(const WavePacket& pkt, const FourVector& k) { return pkt(k); }

double DominatingFunction::operator()(const FourVector& k) const {
  const double kappa = off_shellness(k, reference_mass);
  if (std::abs(kappa) > 1.0) return 0.0;
  const double v = M * std::abs(g(k.p));
  return v * v;
}

DominatingFunction uniform_bound(const RegulatorFamily& family, const SpatialEnvelope& g, Mass reference_mass) {
  // Members exist only for 2/n <= r0, so checking the family's smallest
  // admissible support is the same as validating n >= 2/r0.
  if (!(family.r0 > 0.0)) throw Error(ErrorCode::InsufficientN, "regulator family has no admissible n");
  return DominatingFunction{2.0 * family.inverse_sup(), g, reference_mass};
}

}  // namespace yfstab
