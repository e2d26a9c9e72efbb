#pragma once

// Positive-metric stability engine. The state Psi and the field operators are
// represented only through the c-number current profile w_hat(k); <Psi,Psi> = 1.
//
// For a regulator packet h_n(k) = bump(n kappa)/w_tilde(kappa) g(k) the engine
// evaluates
//   pairing(n)  = int h_n(kappa) w_tilde(kappa) / (kappa + i0) dkappa   (>= 2)
//   kl_norm(n)  = int rho(ds^2) int |h_n|^2 delta^+_s(k) d^4k          (-> 0)
// and reports the contradiction between the persistent lower bound and the
// collapsing Kallen-Lehmann norm.

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "yfstab/chebyshev.hpp"
#include "yfstab/distributions.hpp"
#include "yfstab/testfunctions.hpp"

namespace yfstab {

struct ModelCurrent {
  std::string name;
  MomentumFunction w_hat;
  double c1_radius = 1.0;  // radius in kappa of certified C1 smoothness
  bool backward_shell_zero = true;
  double kappa_extent = 9.0;  // w_hat is negligible (< 1e-16 relative) beyond |kappa| > extent
};

/// Smooth step: 0 for x <= 0, 1 for x >= width, C-infinity in between.
double smooth_step(double x, double width);

struct CurrentProfile {
  double amplitude = 1.0;
  double kappa_width = 1.0;
  double momentum_width = 1.0;
  bool onshell_vanishing = false;  // multiply by kappa
};

/// amplitude exp(-kappa^2/(2 a^2)) exp(-|k|^2/(2 b^2)) theta~(k0), optionally times kappa.
ModelCurrent gaussian_current(Mass mass, const CurrentProfile& profile);
/// exp(-kappa^2/2) exp(-|k|^2/2) theta~(k0); nonzero on the forward shell.
ModelCurrent onshell_nonzero_current(Mass mass);
/// kappa * exp(-kappa^2/2) exp(-|k|^2/2) theta~(k0); vanishes on the forward shell.
ModelCurrent onshell_vanishing_current(Mass mass);
ModelCurrent zero_current();

struct StabilityOptions {
  double shell_rel_tol = 1e-7;     // 3D shell / ball integrals
  double kl_rel_tol = 1e-6;        // outer s^2 integral
  double line_rel_tol = 1e-12;     // 1D principal values
  double onshell_zero = 1e-10;     // |w_tilde(0)| < onshell_zero * scale => vanishing branch
  double w_tilde_rel_tol = 1e-10;  // direct quadrature behind each table node
  int chebyshev_nodes = 33;
  double interpolation_tol = 1e-8;  // relative to scale
};

struct WTilde {
  LineFunction fn;
  double r0 = 0.0;
  cplx at_zero;
  double scale = 0.0;  // max |w_tilde| over the interpolation nodes
  ChebyshevInterpolant table;
  double interpolation_error = 0.0;
};

/// w_tilde(kappa) = int w_hat(kappa + omega, k) g(k) / (kappa + 2 omega) d^3k,
/// tabulated on [-c1_radius, c1_radius]. Throws ONSHELL_VANISHING if w_tilde(0) = 0.
WTilde w_tilde(const ModelCurrent& current, const SpatialEnvelope& g, Mass mass, const StabilityOptions& opt = {});

/// Direct quadrature for a single kappa (no table).
cplx w_tilde_direct(const ModelCurrent& current, const SpatialEnvelope& g, Mass mass, double kappa,
                    double rel_tol = 1e-8);

class StabilityEngine {
 public:
  StabilityEngine(ModelCurrent current, SpatialEnvelope g, Mass mass, StabilityOptions opt = {});

  const WTilde& w_tilde() const { return wt_; }
  RegulatorFamily family() const { return {make_bump(), wt_.fn, wt_.r0}; }
  WavePacket packet(int n) const;

  QuadResult pairing(int n) const;
  QuadResult kl_norm(int n, const SpectralMeasure& rho) const;
  /// Same integral without the positivity precondition (indefinite spectral data).
  QuadResult kl_pairing_signed(int n, const SpectralMeasure& rho) const;
  DominatingFunction bound() const;
  QuadResult dominating_integral(const SpectralMeasure& rho) const;

  const ModelCurrent& current() const { return current_; }
  const SpatialEnvelope& envelope() const { return g_; }
  Mass mass() const { return mass_; }

 private:
  KlOptions kl_options(int n) const;

  ModelCurrent current_;
  SpatialEnvelope g_;
  Mass mass_;
  StabilityOptions opt_;
  WTilde wt_;
};

QuadResult pairing(int n, const ModelCurrent& current, const SpatialEnvelope& g, Mass mass);
QuadResult kl_norm(int n, const ModelCurrent& current, const SpatialEnvelope& g, Mass mass,
                   const SpectralMeasure& rho);

/// W^in(h) - W^out(h) = -2 pi i int w_hat h delta^+_m(k) d^4k.
cplx in_out_difference(const ModelCurrent& current, Mass mass, const WavePacket& h, double rel_tol = 1e-8);

/// Pairing-level Yang-Feldman split W(h) = S_ret(h) + W^in(h) = S_adv(h) + W^out(h),
/// with S_ret/adv the boundary values of w_hat / (k^2 - m^2 -/+ i k0 0).
class YangFeldmanDecomposition {
 public:
  /// `out_amplitude` is the on-shell profile of the outgoing field matrix element:
  /// W^out(h) = int out_amplitude(k) h(k) delta^+_m(k) d^4k.
  YangFeldmanDecomposition(ModelCurrent current, Mass mass, MomentumFunction out_amplitude);

  cplx retarded(const WavePacket& h) const;  // 1/(kappa - i0)
  cplx advanced(const WavePacket& h) const;  // 1/(kappa + i0)
  cplx out(const WavePacket& h) const;
  cplx full(const WavePacket& h) const { return advanced(h) + out(h); }
  cplx in(const WavePacket& h) const { return full(h) - retarded(h); }

  double rel_tol = 1e-7;

 private:
  cplx singular(const WavePacket& h, Side side) const;

  ModelCurrent current_;
  Mass mass_;
  MomentumFunction out_amplitude_;
};

enum class Verdict { ContradictionDemonstrated, Consistent };
std::string to_string(Verdict v);

struct StabilityRow {
  int n = 0;
  cplx pairing;
  double pairing_abs = 0.0;
  double kl_norm = 0.0;
  double bound_integral = 0.0;
  bool cs_violated = false;  // 4 > <Psi,Psi> kl_norm
};

struct StabilityReport {
  std::string branch;  // "onshell-nonzero", "onshell-vanishing", "indefinite"
  std::vector<StabilityRow> rows;
  Verdict verdict = Verdict::Consistent;
  std::string reason;
  cplx w_tilde_zero;
  double r0 = 0.0;
  double bound_constant = 0.0;

  std::string to_csv() const;
  nlohmann::json to_json() const;
};

struct StabilityConfig {
  ModelCurrent current;
  SpatialEnvelope g;
  Mass mass{2.0};
  SpectralMeasure rho;
  std::vector<int> n_ladder{4, 16, 64, 256};
  StabilityOptions options;
  double lower_bound_tol = 1e-3;
  double collapse_ratio = 0.05;
  int workers = 1;
};

StabilityReport run_stability(const StabilityConfig& config);

/// Shortest-round-trip decimal rendering used by every report writer.
std::string format_double(double x);

}  // namespace yfstab
