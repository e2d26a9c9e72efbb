#include "yfstab/stability.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "yfstab/error.hpp"
#include "yfstab/parallel.hpp"

namespace yfstab {

double smooth_step(double x, double width) {
  if (x <= 0.0) return 0.0;
  if (x >= width) return 1.0;
  const double t = x / width;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

ModelCurrent gaussian_current(Mass mass, const CurrentProfile& p) {
  if (!(p.kappa_width > 0.0) || !(p.momentum_width > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "current profile widths must be > 0");
  }
  ModelCurrent c;
  c.name = p.onshell_vanishing ? "gaussian-vanishing" : "gaussian";
  c.kappa_extent = 9.0 * p.kappa_width;
  c.w_hat = [mass, p](const FourVector& k) -> cplx {
    const double kappa = off_shellness(k, mass);
    const double step = smooth_step(k.e, 0.5 * mass.value());
    if (step == 0.0) return 0.0;
    const double x = kappa / p.kappa_width;
    const double y2 = k.p.norm2() / (p.momentum_width * p.momentum_width);
    const double b = p.amplitude * std::exp(-0.5 * x * x) * std::exp(-0.5 * y2) * step;
    return p.onshell_vanishing ? kappa * b : b;
  };
  return c;
}

ModelCurrent onshell_nonzero_current(Mass mass) {
  ModelCurrent c = gaussian_current(mass, {});
  c.name = "onshell-nonzero";
  return c;
}

ModelCurrent onshell_vanishing_current(Mass mass) {
  CurrentProfile p;
  p.onshell_vanishing = true;
  ModelCurrent c = gaussian_current(mass, p);
  c.name = "onshell-vanishing";
  return c;
}

ModelCurrent zero_current() {
  ModelCurrent c;
  c.name = "zero";
  c.w_hat = [](const FourVector&) -> cplx { return 0.0; };
  c.kappa_extent = 1.0;
  return c;
}

cplx w_tilde_direct(const ModelCurrent& current, const SpatialEnvelope& g, Mass mass, double kappa, double rel_tol) {
  auto integrand = [&](const Vec3& k) -> cplx {
    const double gk = g(k);
    if (gk == 0.0) return 0.0;
    const double w = omega(k, mass);
    const cplx wh = current.w_hat(FourVector{kappa + w, k});
    if (wh == 0.0) return 0.0;
    return wh * gk / (kappa + 2.0 * w);
  };
  return integrate_ball(integrand, g.cutoff(), BallOptions{rel_tol, 0.0, {}, 2000}).value;
}

WTilde w_tilde(const ModelCurrent& current, const SpatialEnvelope& g, Mass mass, const StabilityOptions& opt) {
  const double c = current.c1_radius;
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "c1_radius must be > 0");
  auto direct = [&](double kappa) { return w_tilde_direct(current, g, mass, kappa, opt.w_tilde_rel_tol); };

  WTilde out;
  int nodes = opt.chebyshev_nodes | 1;  // odd, so kappa = 0 is a node
  for (;;) {
    out.table = ChebyshevInterpolant(-c, c, direct, nodes);
    out.scale = 0.0;
    for (const cplx& v : out.table.values()) out.scale = std::max(out.scale, std::abs(v));
    if (out.scale == 0.0) break;
    // Probe halfway (in angle) between neighbouring nodes, where the
    // interpolation error peaks.
    out.interpolation_error = 0.0;
    const int k = nodes - 1;
    for (int j : {0, k / 4, k / 2 - 1, k / 2, 3 * k / 4, k - 1}) {
      const double x = c * std::cos(M_PI * (j + 0.5) / k);
      out.interpolation_error = std::max(out.interpolation_error, std::abs(out.table(x) - direct(x)));
    }
    if (out.interpolation_error <= opt.interpolation_tol * out.scale) break;
    if (nodes >= 129) {
      throw Error(ErrorCode::NonConverged, "w_tilde interpolation error " + std::to_string(out.interpolation_error) +
                                               " above tolerance at 129 nodes");
    }
    nodes = 2 * nodes - 1;
  }
  out.at_zero = out.table(0.0);
  if (out.scale == 0.0 || std::abs(out.at_zero) < opt.onshell_zero * out.scale) {
    throw Error(ErrorCode::OnshellVanishing,
                "w_tilde(0) = 0 within tolerance: the current vanishes on the forward mass shell");
  }

  // Largest r with |w_tilde| >= |w_tilde(0)|/2 on all of [-r, r].
  constexpr int scan = 2000;
  const double half = 0.5 * std::abs(out.at_zero);
  out.r0 = c;
  for (int i = 1; i <= scan; ++i) {
    const double r = c * i / scan;
    if (std::abs(out.table(r)) < half || std::abs(out.table(-r)) < half) {
      out.r0 = c * (i - 1) / scan;
      break;
    }
  }
  if (!(out.r0 > 0.0)) throw Error(ErrorCode::InsufficientN, "w_tilde drops below half its value at once");

  auto table = out.table;
  out.fn = LineFunction(
      [table, current, g, mass, c, tol = opt.w_tilde_rel_tol](double kappa) -> cplx {
        if (std::abs(kappa) <= c) return table(kappa);
        return w_tilde_direct(current, g, mass, kappa, tol);
      },
      std::numeric_limits<double>::infinity(), Smoothness::C1);
  return out;
}

StabilityEngine::StabilityEngine(ModelCurrent current, SpatialEnvelope g, Mass mass, StabilityOptions opt)
    : current_(std::move(current)), g_(g), mass_(mass), opt_(opt) {
  if (!current_.backward_shell_zero) {
    throw Error(ErrorCode::InvalidArgument, "the proof engine needs a current that vanishes on the backward shell");
  }
  wt_ = yfstab::w_tilde(current_, g_, mass_, opt_);
}

WavePacket StabilityEngine::packet(int n) const { return WavePacket(family().member(n), g_, mass_); }

QuadResult StabilityEngine::pairing(int n) const {
  const LineFunction reg = family().member(n);
  const LineFunction wt = wt_.fn;
  LineFunction product([reg, wt](double kappa) { return reg(kappa) * wt(kappa); }, reg.support_radius(),
                       Smoothness::C1, reg.kinks());
  return boundary_value_pairing(product, Side::PlusI0, QuadOptions{opt_.line_rel_tol, 0.0, 2000});
}

KlOptions StabilityEngine::kl_options(int n) const {
  KlOptions kl;
  kl.shell.rel_tol = opt_.shell_rel_tol;
  kl.rel_tol = opt_.kl_rel_tol;
  const double m = mass_.value();
  const double cutoff = g_.cutoff();
  std::vector<double> levels{1.0 / n, 2.0 / n};
  // Masses where the kappa = +-d level sets touch the centre or the rim of the ball.
  kl.s2_breakpoints.push_back(m * m);
  const double W = std::hypot(cutoff, m);
  for (double level : levels) {
    for (double d : {level, -level}) {
      if (m + d >= 0.0) kl.s2_breakpoints.push_back((m + d) * (m + d));
      const double y = 0.5 * (d + std::sqrt(d * d + 4.0 * (W * W + d * W)));
      const double s2 = y * y - cutoff * cutoff;
      if (s2 >= 0.0) kl.s2_breakpoints.push_back(s2);
    }
  }
  std::sort(kl.s2_breakpoints.begin(), kl.s2_breakpoints.end());
  kl.radial_breakpoints = [m, cutoff, levels](double s) {
    // On the s-shell kappa(r) = (s^2 - m^2)/(omega_s + omega_m), monotone in r.
    std::vector<double> r_cuts;
    const double a = s * s - m * m;
    if (a == 0.0) return r_cuts;
    for (double level : levels) {
      const double d = std::copysign(level, a);
      const double S = a / d;
      const double ws = 0.5 * (S + d);
      const double r2 = ws * ws - s * s;
      if (r2 > 0.0 && r2 < cutoff * cutoff) r_cuts.push_back(std::sqrt(r2));
    }
    std::sort(r_cuts.begin(), r_cuts.end());
    return r_cuts;
  };
  return kl;
}

QuadResult StabilityEngine::kl_pairing_signed(int n, const SpectralMeasure& rho) const {
  const WavePacket pkt = packet(n);
  auto density = [pkt](const FourVector& k) -> cplx { return std::norm(pkt(k)); };
  return kl_pairing(rho, density, g_.cutoff(), kl_options(n));
}

QuadResult StabilityEngine::kl_norm(int n, const SpectralMeasure& rho) const {
  if (rho.is_signed()) {
    throw Error(ErrorCode::InvalidArgument, "kl_norm needs a positive-metric spectral measure");
  }
  QuadResult q = kl_pairing_signed(n, rho);
  q.value = q.value.real();
  return q;
}

DominatingFunction StabilityEngine::bound() const { return uniform_bound(family(), g_, mass_); }

QuadResult StabilityEngine::dominating_integral(const SpectralMeasure& rho) const {
  const DominatingFunction dom = bound();
  KlOptions kl = kl_options(1);
  auto f = [dom](const FourVector& k) -> cplx { return dom(k); };
  QuadResult q = kl_pairing(rho, f, g_.cutoff(), kl);
  q.value = q.value.real();
  return q;
}

QuadResult pairing(int n, const ModelCurrent& current, const SpatialEnvelope& g, Mass mass) {
  return StabilityEngine(current, g, mass).pairing(n);
}

QuadResult kl_norm(int n, const ModelCurrent& current, const SpatialEnvelope& g, Mass mass,
                   const SpectralMeasure& rho) {
  return StabilityEngine(current, g, mass).kl_norm(n, rho);
}

cplx in_out_difference(const ModelCurrent& current, Mass mass, const WavePacket& h, double rel_tol) {
  if (!current.backward_shell_zero) {
    throw Error(ErrorCode::InvalidArgument, "in_out_difference needs a current that vanishes on the backward shell");
  }
  auto f = [&](const FourVector& k) -> cplx {
    const cplx hk = h(k);
    if (hk == 0.0) return 0.0;
    return current.w_hat(k) * hk;
  };
  const QuadResult q = smear_mass_shell(mass, ShellSign::Plus, f, h.cutoff(), ShellOptions{rel_tol, 0.0, {}, 2000});
  return cplx(0.0, -2.0 * M_PI) * q.value;
}

YangFeldmanDecomposition::YangFeldmanDecomposition(ModelCurrent current, Mass mass, MomentumFunction out_amplitude)
    : current_(std::move(current)), mass_(mass), out_amplitude_(std::move(out_amplitude)) {
  if (!current_.backward_shell_zero) {
    throw Error(ErrorCode::InvalidArgument, "Yang-Feldman split needs a current that vanishes on the backward shell");
  }
}

cplx YangFeldmanDecomposition::singular(const WavePacket& h, Side side) const {
  std::vector<double> kinks;
  if (!h.reflected() && h.reference_mass().value() == mass_.value()) kinks = h.temporal().kinks();
  const double extent = current_.kappa_extent;
  auto per_momentum = [&](const Vec3& k) -> cplx {
    const double w = omega(k, mass_);
    auto F = [&, w](double kappa) -> cplx {
      const double denom = kappa + 2.0 * w;
      if (denom <= 0.0) return 0.0;  // k0 < 0, where the current vanishes
      const FourVector q{kappa + w, k};
      const cplx hk = h(q);
      if (hk == 0.0) return 0.0;
      return current_.w_hat(q) * hk / denom;
    };
    LineFunction line(F, extent, Smoothness::C1, kinks);
    return boundary_value_pairing(line, side, QuadOptions{rel_tol * 1e-2, 0.0, 2000}).value;
  };
  return integrate_ball(per_momentum, h.cutoff(), BallOptions{rel_tol, 0.0, {}, 2000}).value;
}

cplx YangFeldmanDecomposition::retarded(const WavePacket& h) const { return singular(h, Side::MinusI0); }
cplx YangFeldmanDecomposition::advanced(const WavePacket& h) const { return singular(h, Side::PlusI0); }

cplx YangFeldmanDecomposition::out(const WavePacket& h) const {
  if (!out_amplitude_) return 0.0;
  auto f = [&](const FourVector& k) -> cplx { return out_amplitude_(k) * h(k); };
  return smear_mass_shell(mass_, ShellSign::Plus, f, h.cutoff(), ShellOptions{rel_tol, 0.0, {}, 2000}).value;
}

std::string to_string(Verdict v) {
  return v == Verdict::ContradictionDemonstrated ? "CONTRADICTION_DEMONSTRATED" : "CONSISTENT";
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string StabilityReport::to_csv() const {
  std::ostringstream os;
  os << "n,pairing_re,pairing_im,kl_norm,bound_integral,cs_lhs,cs_rhs\n";
  for (const auto& r : rows) {
    os << r.n << ',' << format_double(r.pairing.real()) << ',' << format_double(r.pairing.imag()) << ','
       << format_double(r.kl_norm) << ',' << format_double(r.bound_integral) << ",4," << format_double(r.kl_norm)
       << '\n';
  }
  return os.str();
}

nlohmann::json StabilityReport::to_json() const {
  nlohmann::json jrows = nlohmann::json::array();
  for (const auto& r : rows) {
    jrows.push_back({{"n", r.n},
                     {"pairing_re", r.pairing.real()},
                     {"pairing_im", r.pairing.imag()},
                     {"pairing_abs", r.pairing_abs},
                     {"kl_norm", r.kl_norm},
                     {"bound_integral", r.bound_integral},
                     {"cs_lhs", 4.0},
                     {"cs_rhs", r.kl_norm},
                     {"cs_violated", r.cs_violated}});
  }
  return {{"branch", branch},
          {"verdict", to_string(verdict)},
          {"reason", reason},
          {"w_tilde_zero", {w_tilde_zero.real(), w_tilde_zero.imag()}},
          {"r0", r0},
          {"bound_constant", bound_constant},
          {"rows", jrows}};
}

StabilityReport run_stability(const StabilityConfig& config) {
  if (config.n_ladder.empty()) throw Error(ErrorCode::InvalidArgument, "n_ladder is empty");
  for (std::size_t i = 1; i < config.n_ladder.size(); ++i) {
    if (config.n_ladder[i] <= config.n_ladder[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "n_ladder must be strictly increasing");
    }
  }
  StabilityReport report;
  std::optional<StabilityEngine> engine;
  try {
    engine.emplace(config.current, config.g, config.mass, config.options);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::OnshellVanishing) throw;
    report.branch = "onshell-vanishing";
    report.verdict = Verdict::Consistent;
    report.reason = "w_tilde(0) = 0: the current vanishes on the forward shell, so the in and out one-particle "
                    "vectors coincide and no decay channel exists";
    return report;
  }
  const bool indefinite = config.rho.is_signed();
  report.branch = indefinite ? "indefinite" : "onshell-nonzero";
  report.w_tilde_zero = engine->w_tilde().at_zero;
  report.r0 = engine->w_tilde().r0;
  const DominatingFunction dom = engine->bound();
  report.bound_constant = dom.M;
  const double bound_integral = engine->dominating_integral(config.rho).value.real();

  report.rows = parallel_map(config.n_ladder.size(), config.workers, [&](std::size_t i) {
    StabilityRow row;
    row.n = config.n_ladder[i];
    row.pairing = engine->pairing(row.n).value;
    row.pairing_abs = std::abs(row.pairing);
    row.kl_norm = indefinite ? engine->kl_pairing_signed(row.n, config.rho).value.real()
                             : engine->kl_norm(row.n, config.rho).value.real();
    row.bound_integral = bound_integral;
    row.cs_violated = 4.0 > row.kl_norm;
    return row;
  });

  if (indefinite) {
    report.verdict = Verdict::Consistent;
    report.reason = "spectral measure is indefinite, so the Cauchy-Schwarz bound 4 <= <Psi,Psi> kl_norm "
                    "does not hold and no contradiction follows";
    return report;
  }

  bool lower_bound = true;
  for (const auto& r : report.rows) {
    lower_bound = lower_bound && r.pairing.real() >= 2.0 - config.lower_bound_tol &&
                  std::abs(r.pairing.imag()) <= 1e-6 * r.pairing.real();
  }
  const auto& rows = report.rows;
  bool all_zero = true;
  bool decreasing = rows.size() >= 2;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    all_zero = all_zero && rows[i].kl_norm == 0.0;
    if (i > 0) decreasing = decreasing && rows[i].kl_norm < rows[i - 1].kl_norm;
  }
  const bool collapsing =
      all_zero || (decreasing && rows.front().kl_norm > 0.0 &&
                   rows.back().kl_norm < config.collapse_ratio * rows.front().kl_norm);
  const bool violated = rows.back().cs_violated;
  if (lower_bound && collapsing && violated) {
    report.verdict = Verdict::ContradictionDemonstrated;
    report.reason = "pairing stays >= 2 while the Kallen-Lehmann norm collapses; 4 <= <Psi,Psi> kl_norm fails";
  } else {
    report.verdict = Verdict::Consistent;
    std::string why;
    if (!lower_bound) why += " pairing lower bound not met;";
    if (!collapsing) why += " kl_norm does not collapse along the ladder;";
    if (!violated) why += " Cauchy-Schwarz bound not violated at the last rung;";
    report.reason = "no contradiction:" + why;
  }
  return report;
}

}  // namespace yfstab
