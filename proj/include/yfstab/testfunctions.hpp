#pragma once

// Momentum-space test functions: the odd regulator bump, its rescaled family
// divided by the on-shell current profile, Gaussian spatial envelopes, and the
// factorized wave packets h(k) = temporal(k0 - omega(k)) * g(k).

#include <cmath>
#include <string>

#include <nlohmann/json.hpp>

#include "yfstab/distributions.hpp"
#include "yfstab/kinematics.hpp"

namespace yfstab {

/// Odd C1 profile: identity on [-1, 1], cosine taper to zero on 1 <= |u| <= 2.
class BumpProfile {
 public:
  double operator()(double u) const;
  double derivative(double u) const;
  /// Taper B(|u|), so that profile(u) = u * taper(|u|).
  static double taper(double a);
  static constexpr double support = 2.0;
};

BumpProfile make_bump();

/// Gaussian spatial envelope amplitude * exp(-|k - center|^2 / (2 width^2)),
/// truncated to zero where it falls below `cutoff_ratio` of its peak.
struct SpatialEnvelope {
  Vec3 center;
  double width = 1.0;
  double amplitude = 1.0;

  static constexpr double cutoff_ratio = 1e-12;

  SpatialEnvelope() = default;
  SpatialEnvelope(Vec3 c, double w, double a);

  double operator()(const Vec3& k) const {
    const double d2 = (k - center).norm2();
    if (d2 > truncation_radius2()) return 0.0;
    return amplitude * std::exp(-d2 / (2.0 * width * width));
  }
  /// Distance from the center beyond which the envelope is zero.
  double truncation_radius() const { return width * std::sqrt(-2.0 * std::log(cutoff_ratio)); }
  double truncation_radius2() const { return truncation_radius() * truncation_radius(); }
  /// Radius of the origin-centred ball containing the whole support.
  double cutoff() const { return center.norm() + truncation_radius(); }

  nlohmann::json to_json() const;
  static SpatialEnvelope from_json(const nlohmann::json& j);
};

/// kappa -> bump(n kappa) / w_tilde(kappa) with support radius 2/n.
LineFunction regulator(const BumpProfile& bump, int n, const LineFunction& w_tilde, double r0);

/// The family n -> regulator(bump, n, w_tilde, r0).
struct RegulatorFamily {
  BumpProfile bump;
  LineFunction w_tilde;
  double r0 = 1.0;

  LineFunction member(int n) const { return regulator(bump, n, w_tilde, r0); }
  /// sup_{|kappa| <= min(1, r0)} 1/|w_tilde|, from a dense scan.
  double inverse_sup() const;
};

/// h(k) = temporal(k0 - omega(k, reference_mass)) * spatial(k). With
/// `reflected` set the packet is the Hermitian conjugate h*(k) = conj(h(-k)).
class WavePacket {
 public:
  WavePacket(LineFunction temporal, SpatialEnvelope spatial, Mass reference_mass, bool reflected = false)
      : temporal_(std::move(temporal)), spatial_(spatial), reference_mass_(reference_mass), reflected_(reflected) {}

  cplx operator()(const FourVector& k) const;

  /// Hermitian transform; applying it twice gives back the original packet.
  WavePacket conjugate() const;

  const LineFunction& temporal() const { return temporal_; }
  const SpatialEnvelope& spatial() const { return spatial_; }
  Mass reference_mass() const { return reference_mass_; }
  bool reflected() const { return reflected_; }

  /// Envelope centre as a function of the momentum argument (flipped if reflected).
  Vec3 effective_center() const { return reflected_ ? -spatial_.center : spatial_.center; }
  double cutoff() const { return spatial_.cutoff(); }

  /// True when the packet provably vanishes on the whole shell theta(+-k0) delta(k^2 - m^2)
  /// inside its spatial support, from the temporal support radius alone.
  bool vanishes_on_shell(Mass m, ShellSign sign) const;

 private:
  LineFunction temporal_;
  SpatialEnvelope spatial_;
  Mass reference_mass_;
  bool reflected_;
};

cplx packet_eval(const WavePacket& pkt, const FourVector& k);

/// n-independent dominating function (M chi(|kappa| <= 1) |g(k)|)^2 with
/// M = 2 sup 1/|w_tilde| over the support window.
struct DominatingFunction {
  double M = 2.0;
  SpatialEnvelope g;
  Mass reference_mass{0.0};

  double operator()(const FourVector& k) const;
};

DominatingFunction uniform_bound(const RegulatorFamily& family, const SpatialEnvelope& g, Mass reference_mass);

}  // namespace yfstab
