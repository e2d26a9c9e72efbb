#include "yfstab/distributions.hpp"

#include <algorithm>
#include <cmath>

#include "yfstab/error.hpp"

namespace yfstab {

std::string to_string(Smoothness s) {
  switch (s) {
    case Smoothness::C0: return "C0";
    case Smoothness::C1: return "C1";
    case Smoothness::Smooth: return "SMOOTH";
  }
  return "?";
}

LineFunction LineFunction::constant(cplx value) {
  return LineFunction([value](double) { return value; }, std::numeric_limits<double>::infinity(),
                      Smoothness::Smooth);
}

QuadResult smear_mass_shell(Mass s, ShellSign sign, const MomentumFunction& f, double spatial_cutoff,
                            const ShellOptions& opt) {
  if (!(spatial_cutoff > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "spatial_cutoff must be > 0");
  }
  const int sg = sign_value(sign);
  auto integrand = [&](const Vec3& k) -> cplx {
    const double w = omega(k, s);
    if (w == 0.0) return 0.0;
    return f(FourVector{sg * w, k}) / (2.0 * w);
  };
  BallOptions ball{opt.rel_tol, opt.abs_tol, opt.radial_breakpoints, opt.max_intervals};
  return integrate_ball(integrand, spatial_cutoff, ball);
}

QuadResult principal_value(const LineFunction& f, const QuadOptions& opt) {
  if (f.smoothness() == Smoothness::C0) {
    throw Error(ErrorCode::SmoothnessViolation,
                "principal value by symmetric subtraction needs a C1 integrand near kappa = 0");
  }
  std::vector<double> cuts;
  for (double k : f.kinks()) {
    if (k != 0.0) cuts.push_back(std::abs(k));
  }
  std::sort(cuts.begin(), cuts.end());
  const double scale = std::max({1.0, cuts.empty() ? 0.0 : cuts.back(),
                                 f.compact() ? f.support_radius() : 0.0});
  // Below this the odd part is replaced by its symmetric difference quotient.
  const double tiny = 1e-7 * (f.compact() ? f.support_radius() : 1.0);
  auto odd_part = [&](double kappa) -> cplx {
    const double h = std::max(kappa, tiny);
    return (f(h) - f(-h)) / h;
  };
  // A nearly even f leaves an odd part made of rounding noise; measure the
  // tolerance against the size of f instead.
  double magnitude = 0.0;
  constexpr int kProbe = 64;
  for (int i = 0; i <= kProbe; ++i) {
    const double x = scale * (2.0 * i / kProbe - 1.0);
    magnitude += std::abs(f(x)) * (i == 0 || i == kProbe ? 0.5 : 1.0);
  }
  magnitude *= 2.0 * scale / kProbe;
  QuadOptions o = opt;
  o.abs_tol = std::max(opt.abs_tol, 1e-3 * opt.rel_tol * magnitude);
  if (f.compact()) {
    return integrate(odd_part, 0.0, f.support_radius(), o, cuts);
  }
  QuadResult near = integrate(odd_part, 0.0, scale, o, cuts);
  QuadResult far = integrate_to_infinity(odd_part, scale, o);
  near.value += far.value;
  near.error += far.error;
  near.evaluations += far.evaluations;
  return near;
}

QuadResult boundary_value_pairing(const LineFunction& f, Side side, const QuadOptions& opt) {
  QuadResult pv = principal_value(f, opt);
  const cplx delta_term = cplx(0.0, M_PI) * f(0.0);
  pv.value += (side == Side::PlusI0) ? -delta_term : delta_term;
  return pv;
}

double DensityPiece::operator()(double s2) const {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * s2 + *it;
  return acc;
}

SpectralMeasure::SpectralMeasure(std::vector<std::pair<double, double>> atoms, std::vector<DensityPiece> density,
                                 bool signed_mode)
    : atoms_(std::move(atoms)), density_(std::move(density)), signed_(signed_mode) {
  validate();
}

SpectralMeasure SpectralMeasure::atom(double s2, double weight) { return SpectralMeasure({{s2, weight}}, {}); }

SpectralMeasure SpectralMeasure::uniform(double lo, double hi, double height) {
  return SpectralMeasure({}, {DensityPiece{lo, hi, {height}}});
}

bool SpectralMeasure::is_positive() const {
  for (const auto& [s2, w] : atoms_) {
    if (w < 0.0) return false;
  }
  for (const auto& piece : density_) {
    constexpr int samples = 256;
    for (int i = 0; i <= samples; ++i) {
      const double s2 = piece.lo + (piece.hi - piece.lo) * i / samples;
      if (piece(s2) < 0.0) return false;
    }
  }
  return true;
}

double SpectralMeasure::total_mass() const {
  double total = 0.0;
  for (const auto& [s2, w] : atoms_) total += w;
  for (const auto& piece : density_) {
    // Exact antiderivative of the polynomial.
    for (std::size_t i = 0; i < piece.coeffs.size(); ++i) {
      const double p = static_cast<double>(i + 1);
      total += piece.coeffs[i] * (std::pow(piece.hi, p) - std::pow(piece.lo, p)) / p;
    }
  }
  return total;
}

void SpectralMeasure::validate() const {
  for (const auto& [s2, w] : atoms_) {
    if (!std::isfinite(s2) || !std::isfinite(w) || s2 < 0.0) {
      throw Error(ErrorCode::InvalidArgument, "spectral atom positions must be finite and >= 0");
    }
  }
  for (const auto& piece : density_) {
    if (!(piece.lo >= 0.0) || !(piece.hi > piece.lo) || !std::isfinite(piece.hi)) {
      throw Error(ErrorCode::InvalidArgument, "density interval must satisfy 0 <= lo < hi < inf");
    }
    if (piece.coeffs.empty()) throw Error(ErrorCode::InvalidArgument, "density piece needs coefficients");
  }
  if (!signed_ && !is_positive()) {
    throw Error(ErrorCode::InvalidArgument,
                "negative spectral weight in positive-metric mode (set signed: true for indefinite models)");
  }
}

nlohmann::json SpectralMeasure::to_json() const {
  nlohmann::json atoms = nlohmann::json::array();
  for (const auto& [s2, w] : atoms_) atoms.push_back({s2, w});
  nlohmann::json density = nlohmann::json::array();
  for (const auto& piece : density_) {
    density.push_back({{"interval", {piece.lo, piece.hi}}, {"coeffs", piece.coeffs}});
  }
  return {{"atoms", atoms}, {"density", density}, {"signed", signed_}};
}

SpectralMeasure SpectralMeasure::from_json(const nlohmann::json& j) {
  std::vector<std::pair<double, double>> atoms;
  std::vector<DensityPiece> density;
  try {
    if (j.contains("atoms")) {
      for (const auto& a : j.at("atoms")) {
        if (!a.is_array() || a.size() != 2) throw Error(ErrorCode::ConfigInvalid, "rho.atoms: expected [s2, weight]");
        atoms.emplace_back(a[0].get<double>(), a[1].get<double>());
      }
    }
    if (j.contains("density")) {
      for (const auto& d : j.at("density")) {
        const auto& iv = d.at("interval");
        if (!iv.is_array() || iv.size() != 2) throw Error(ErrorCode::ConfigInvalid, "rho.density: interval [a, b]");
        density.push_back({iv[0].get<double>(), iv[1].get<double>(), d.at("coeffs").get<std::vector<double>>()});
      }
    }
    return SpectralMeasure(std::move(atoms), std::move(density), j.value("signed", false));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::ConfigInvalid, std::string("rho: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ConfigInvalid) throw;
    throw Error(ErrorCode::ConfigInvalid, std::string("rho: ") + e.what());
  }
}

QuadResult kl_pairing(const SpectralMeasure& rho, const MomentumFunction& f, double spatial_cutoff,
                      const KlOptions& opt) {
  auto shell_at = [&](double s2, double abs_tol) -> QuadResult {
    const double s = std::sqrt(s2);
    ShellOptions shell = opt.shell;
    shell.abs_tol = std::max(shell.abs_tol, abs_tol);
    if (opt.radial_breakpoints) shell.radial_breakpoints = opt.radial_breakpoints(s);
    return smear_mass_shell(Mass(s), ShellSign::Plus, f, spatial_cutoff, shell);
  };
  QuadResult out;
  for (const auto& [s2, w] : rho.atoms()) {
    if (w == 0.0) continue;
    const QuadResult q = shell_at(s2, 0.0);
    out.value += w * q.value;
    out.error += std::abs(w) * q.error;
    out.evaluations += q.evaluations;
  }
  if (rho.density().empty()) return out;

  // Pilot pass: a fixed Gauss-Legendre rule per sub-interval gives the L1
  // scale of the s^2 integrand. Shells whose contribution is below the
  // resulting absolute budget are not refined further; near s = m the shell
  // integrand is pure rounding noise and could never meet a relative target.
  auto pieces_of = [&](const DensityPiece& piece) {
    std::vector<double> cuts{piece.lo};
    for (double b : opt.s2_breakpoints) {
      if (b > piece.lo && b < piece.hi) cuts.push_back(b);
    }
    cuts.push_back(piece.hi);
    std::sort(cuts.begin(), cuts.end());
    return cuts;
  };
  const Rule& pilot_rule = gauss_legendre(8);
  double pilot_l1 = 0.0;
  double density_l1 = 0.0;
  for (const auto& piece : rho.density()) {
    const auto cuts = pieces_of(piece);
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const double half = 0.5 * (cuts[i + 1] - cuts[i]);
      const double mid = 0.5 * (cuts[i + 1] + cuts[i]);
      if (half <= 0.0) continue;
      for (std::size_t j = 0; j < pilot_rule.nodes.size(); ++j) {
        const double s2 = mid + half * pilot_rule.nodes[j];
        const double weight = piece(s2);
        density_l1 += half * pilot_rule.weights[j] * std::abs(weight);
        if (weight == 0.0) continue;
        const QuadResult q = shell_at(s2, 0.0);
        out.evaluations += q.evaluations;
        pilot_l1 += half * pilot_rule.weights[j] * std::abs(weight * q.value);
      }
    }
  }
  const double shell_abs = density_l1 > 0.0 ? 0.1 * opt.rel_tol * pilot_l1 / density_l1 : 0.0;
  const QuadOptions outer{opt.rel_tol, 0.5 * opt.rel_tol * pilot_l1, opt.shell.max_intervals};
  for (const auto& piece : rho.density()) {
    std::size_t inner_evals = 0;
    auto integrand = [&](double s2) -> cplx {
      const double weight = piece(s2);
      if (weight == 0.0) return 0.0;
      const QuadResult q = shell_at(s2, shell_abs);
      inner_evals += q.evaluations;
      return weight * q.value;
    };
    const QuadResult q = integrate(integrand, piece.lo, piece.hi, outer, opt.s2_breakpoints);
    out.value += q.value;
    out.error += q.error + std::abs(q.value) * opt.shell.rel_tol + shell_abs * density_l1;
    out.evaluations += inner_evals;
  }
  return out;
}

}  // namespace yfstab
