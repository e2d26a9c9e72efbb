#pragma once

// Singular distributions in momentum space: mass-shell measures, principal
// values, boundary values 1/(kappa +- i0), and Kallen-Lehmann pairings.

#include <complex>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "yfstab/kinematics.hpp"
#include "yfstab/quadrature.hpp"

namespace yfstab {

enum class Smoothness { C0, C1, Smooth };

std::string to_string(Smoothness s);

/// A complex function of one real variable (the off-shellness kappa), with
/// its support radius, smoothness class, and known kink locations.
class LineFunction {
 public:
  using Fn = std::function<cplx(double)>;

  LineFunction() = default;
  LineFunction(Fn fn, double support_radius, Smoothness smoothness, std::vector<double> kinks = {})
      : fn_(std::move(fn)), support_radius_(support_radius), smoothness_(smoothness), kinks_(std::move(kinks)) {}

  static LineFunction constant(cplx value);

  cplx operator()(double kappa) const {
    if (kappa > support_radius_ || kappa < -support_radius_) return 0.0;
    return fn_(kappa);
  }

  double support_radius() const { return support_radius_; }
  bool compact() const { return support_radius_ < std::numeric_limits<double>::infinity(); }
  Smoothness smoothness() const { return smoothness_; }
  const std::vector<double>& kinks() const { return kinks_; }
  explicit operator bool() const { return static_cast<bool>(fn_); }

 private:
  Fn fn_;
  double support_radius_ = std::numeric_limits<double>::infinity();
  Smoothness smoothness_ = Smoothness::Smooth;
  std::vector<double> kinks_;
};

enum class ShellSign { Plus, Minus };

inline int sign_value(ShellSign s) { return s == ShellSign::Plus ? +1 : -1; }

enum class Side { PlusI0, MinusI0 };

using MomentumFunction = std::function<cplx(const FourVector&)>;

struct ShellOptions {
  double rel_tol = 1e-6;
  double abs_tol = 0.0;
  std::vector<double> radial_breakpoints;
  std::size_t max_intervals = 2000;
};

/// Integral of f against theta(+-k0) delta(k^2 - s^2) d^4k, reduced to
///   int_{|k| <= cutoff} f(+-omega_s(k), k) / (2 omega_s(k)) d^3k.
QuadResult smear_mass_shell(Mass s, ShellSign sign, const MomentumFunction& f, double spatial_cutoff,
                            const ShellOptions& opt = {});

/// PV int f(kappa)/kappa dkappa = int_0^inf (f(kappa) - f(-kappa))/kappa dkappa.
QuadResult principal_value(const LineFunction& f, const QuadOptions& opt = {});

/// int f(kappa)/(kappa +- i0) dkappa = PV -/+ i pi f(0).
QuadResult boundary_value_pairing(const LineFunction& f, Side side, const QuadOptions& opt = {});

/// Piecewise polynomial density on [lo, hi] in the variable s^2.
struct DensityPiece {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> coeffs;  // sum_i coeffs[i] * (s^2)^i

  double operator()(double s2) const;
};

/// Kallen-Lehmann measure rho(ds^2): atoms plus piecewise-polynomial density.
/// In positive mode all weights and densities must be nonnegative; the signed
/// mode is reserved for the indefinite-metric model.
class SpectralMeasure {
 public:
  SpectralMeasure() = default;
  SpectralMeasure(std::vector<std::pair<double, double>> atoms, std::vector<DensityPiece> density,
                  bool signed_mode = false);

  static SpectralMeasure atom(double s2, double weight);
  static SpectralMeasure uniform(double lo, double hi, double height = 1.0);

  const std::vector<std::pair<double, double>>& atoms() const { return atoms_; }
  const std::vector<DensityPiece>& density() const { return density_; }
  bool is_signed() const { return signed_; }
  /// True if every weight and density sample is nonnegative.
  bool is_positive() const;
  double total_mass() const;

  nlohmann::json to_json() const;
  static SpectralMeasure from_json(const nlohmann::json& j);

 private:
  void validate() const;

  std::vector<std::pair<double, double>> atoms_;
  std::vector<DensityPiece> density_;
  bool signed_ = false;
};

struct KlOptions {
  ShellOptions shell;
  double rel_tol = 1e-6;
  std::vector<double> s2_breakpoints;
  /// Optional per-mass radial breakpoints for the inner shell integral.
  std::function<std::vector<double>(double s)> radial_breakpoints;
};

/// sum_atoms w * smear(sqrt(s2), +, f) + int density(s2) smear(sqrt(s2), +, f) ds2.
QuadResult kl_pairing(const SpectralMeasure& rho, const MomentumFunction& f, double spatial_cutoff,
                      const KlOptions& opt = {});

}  // namespace yfstab
