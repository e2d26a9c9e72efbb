#pragma once

// Indefinite-metric model with two scalar fields of masses mu (index 1) and
// m > 2 mu (index 2): truncated 2- and 3-point functions, full Wightman
// functions up to four points, Gram matrices of field words applied to the
// vacuum, and the Monte-Carlo decay amplitude for m -> mu + mu.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "yfstab/distributions.hpp"
#include "yfstab/testfunctions.hpp"

namespace yfstab {

struct ModelParams {
  Mass mu{0.5};
  Mass m{2.0};

  ModelParams() = default;
  ModelParams(Mass mu_, Mass m_);

  /// Mass of field index 1 (mu) or 2 (m).
  Mass mass_of(int alpha) const;
};

/// p_1 = (k^2 - m^2)/(m^2 - mu^2), p_2 = (k^2 - mu^2)/(m^2 - mu^2).
double p_factor(int alpha, double ksq, const ModelParams& params);

/// p_alpha(k^2) * sum_beta 1/(k^2 - m_beta^2), with the pole at the other
/// field's mass cancelled: 2c + c (m_alpha^2 - m_other^2)/(k^2 - m_alpha^2).
double constrained_factor(int alpha, double ksq, const ModelParams& params);

/// delta_{a1 a2} int delta^-_{m_a1}(k) h1(k) h2(-k) d^4k.
cplx truncated_2pt(int a1, int a2, const WavePacket& h1, const WavePacket& h2, const ModelParams& params,
                   double rel_tol = 1e-8);

struct ThreePointOptions {
  bool pv_mode = false;
  double delta_gap = 0.05;  // minimal distance (k^2 units) between pole and support
  int hermite_nodes = 10;   // per dimension, outer 3-momentum
  int polar_nodes = 24;     // Gauss-Legendre in cos(theta*)
  int azimuth_nodes = 32;   // trapezoid in phi*
  double rel_tol = 1e-8;    // 1D integral in the invariant mass variable
  int workers = 1;

  nlohmann::json to_json() const;
};

/// The j-th term (j = 1, 2, 3) of the truncated 3-point function, summed over
/// the shell assignments beta; only beta_l = alpha_l survives on the free legs.
cplx truncated_3pt_term(int j, const std::array<int, 3>& a, const std::array<WavePacket, 3>& h,
                        const ModelParams& params, const ThreePointOptions& opt = {});

cplx truncated_3pt(const std::array<int, 3>& a, const std::array<WavePacket, 3>& h, const ModelParams& params,
                   const ThreePointOptions& opt = {});

/// One smeared field phi_alpha(h).
struct FieldFactor {
  int alpha = 1;
  WavePacket packet;
};

/// phi(f_1) ... phi(f_n) applied to the vacuum; an empty word is the vacuum.
using FieldWord = std::vector<FieldFactor>;

/// Hermitian conjugate: reversed order, h(k) -> conj(h(-k)).
FieldWord adjoint(const FieldWord& w);

/// <Psi0, phi(f_1) ... phi(f_n) Psi0> for n <= 4, as sums over partitions
/// into truncated functions (the 1-point function and all truncated functions
/// beyond order 3 vanish). n = 0 gives 1. Throws UNSUPPORTED_ORDER for n > 4.
cplx full_wightman(const FieldWord& word, const ModelParams& params, const ThreePointOptions& opt = {});

struct StateFamily {
  std::string fixture_id;
  std::vector<FieldWord> entries;
};

struct GramResult {
  Eigen::MatrixXcd matrix;
  Eigen::VectorXd eigenvalues;  // ascending
  double min_eigenvalue = 0.0;
  double norm = 0.0;  // spectral norm
  double hermiticity_defect = 0.0;
  std::string family_fixture_id;

  nlohmann::json to_json() const;
};

/// G_ab = <v_a, v_b> = W(adjoint(v_a) v_b).
GramResult gram_matrix(const StateFamily& family, const ModelParams& params, const ThreePointOptions& opt = {});

/// Frozen witness: {Omega, phi_2(f) Omega, phi_1(g) phi_1(h) Omega}; f vanishes
/// on the m-shell so its own norm is zero while it overlaps the two-particle vector.
StateFamily witness_family(const ModelParams& params = {});
/// {phi_1(g) Omega, phi_1(h) Omega} with the witness packets g, h.
StateFamily positive_subfamily(const ModelParams& params = {});

struct DecayOptions {
  std::size_t samples = 1000000;
  std::uint64_t seed = 1;
  std::array<double, 3> sigma_ladder{0.08, 0.04, 0.02};
  double kernel_cutoff = 5.0;  // shell kernel truncated at this many widths
  int workers = 1;
};

struct DecayResult {
  cplx estimate;     // 2 pi i times the phase-space integral
  cplx phase_space;  // the integral without the 2 pi i prefactor
  double stderr_ = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::array<double, 3> sigma_ladder{};
  std::array<cplx, 3> per_sigma{};  // un-extrapolated estimates (phase space only)
  bool zero_overlap = false;        // |estimate| <= 2 stderr

  nlohmann::json to_json() const;
};

/// 2 pi i int delta^+_m(k1) delta^+_mu(k2) delta^+_mu(k3) delta(k1 - k2 - k3) h1 h2 h3.
DecayResult decay_amplitude(const WavePacket& h1, const WavePacket& h2, const WavePacket& h3,
                            const ModelParams& params, const DecayOptions& opt = {});

/// Packets for back-to-back decay at rest: h1 around the m-shell at k = 0,
/// h2 and h3 on the mu-shell at +-|k| zhat with |k| = sqrt(m^2/4 - mu^2).
std::array<WavePacket, 3> decay_packets(const ModelParams& params = {});
/// Same h2, h3 but h1 vanishing in a neighbourhood of the m-shell.
std::array<WavePacket, 3> disjoint_decay_packets(const ModelParams& params = {});

/// Packet whose temporal factor is the regulator bump(n kappa) (no division).
WavePacket bump_packet(int n, const SpatialEnvelope& g, Mass reference_mass);
WavePacket constant_packet(const SpatialEnvelope& g, Mass reference_mass);

}  // namespace yfstab
