#include "yfstab/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "yfstab/error.hpp"
#include "yfstab/parallel.hpp"
#include "yfstab/rng.hpp"

namespace yfstab {

ModelParams::ModelParams(Mass mu_, Mass m_) : mu(mu_), m(m_) {
  if (!(mu.value() > 0.0)) throw Error(ErrorCode::InvalidArgument, "masses: mu must be > 0");
  if (!(m.value() > 2.0 * mu.value())) throw Error(ErrorCode::InvalidArgument, "masses: m must exceed 2*mu");
}

Mass ModelParams::mass_of(int alpha) const {
  if (alpha == 1) return mu;
  if (alpha == 2) return m;
  throw Error(ErrorCode::InvalidArgument, "field index must be 1 or 2, got " + std::to_string(alpha));
}

namespace {

double mass_gap(const ModelParams& p) {
  const double d = p.m.squared() - p.mu.squared();
  if (d == 0.0) throw Error(ErrorCode::DegenerateMasses, "p-factors need m != mu");
  return d;
}

}  // namespace

double p_factor(int alpha, double ksq, const ModelParams& params) {
  const double d = mass_gap(params);
  if (alpha == 1) return (ksq - params.m.squared()) / d;
  if (alpha == 2) return (ksq - params.mu.squared()) / d;
  throw Error(ErrorCode::InvalidArgument, "field index must be 1 or 2");
}

double constrained_factor(int alpha, double ksq, const ModelParams& params) {
  const double c = 1.0 / mass_gap(params);
  const double own = params.mass_of(alpha).squared();
  const double other = params.mass_of(3 - alpha).squared();
  return 2.0 * c + c * (own - other) / (ksq - own);
}

cplx truncated_2pt(int a1, int a2, const WavePacket& h1, const WavePacket& h2, const ModelParams& params,
                   double rel_tol) {
  if (a1 != a2) return 0.0;
  const Mass mass = params.mass_of(a1);
  if (h1.vanishes_on_shell(mass, ShellSign::Minus) || h2.vanishes_on_shell(mass, ShellSign::Plus)) return 0.0;
  auto f = [&](const FourVector& k) -> cplx {
    const cplx a = h1(k);
    if (a == 0.0) return 0.0;
    return a * h2(FourVector{-k.e, -k.p});
  };
  const double cutoff = std::min(h1.cutoff(), h2.cutoff());
  return smear_mass_shell(mass, ShellSign::Minus, f, cutoff, ShellOptions{rel_tol, 0.0, {}, 2000}).value;
}

nlohmann::json ThreePointOptions::to_json() const {
  return {{"pv_mode", pv_mode},         {"delta_gap", delta_gap},         {"hermite_nodes", hermite_nodes},
          {"polar_nodes", polar_nodes}, {"azimuth_nodes", azimuth_nodes}, {"rel_tol", rel_tol}};
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lorentz boost of a rest-frame vector (e, p) into the frame where the
// reference particle has four-velocity (u0, u).
FourVector boost(double u0, const Vec3& u, double e, const Vec3& p) {
  const double up = u.dot(p);
  return FourVector{u0 * e + up, p + u * (up / (u0 + 1.0) + e)};
}

// Range of k^2 over the support of a packet with compact temporal factor.
std::pair<double, double> ksq_range(const WavePacket& h) {
  if (!h.temporal().compact()) return {-kInf, kInf};
  const double R = h.temporal().support_radius();
  const Mass ref = h.reference_mass();
  const double m2 = ref.squared();
  const double pmax = h.cutoff();
  const double wmax = omega_from_norm2(pmax * pmax, ref);
  const double hi = m2 + 2.0 * R * wmax + R * R;
  double lo = m2 - 2.0 * R * wmax + R * R;
  if (R >= ref.value()) {
    const double w = std::min(R, wmax);
    lo = std::min(lo, m2 - w * w);
  }
  return {lo, hi};
}

// True if the packet is zero at every argument whose energy has the given sign.
bool vanishes_at_energy_sign(const WavePacket& h, int sign) {
  if (!h.temporal().compact()) return false;
  const int effective = h.reflected() ? -sign : sign;
  return effective < 0 && h.temporal().support_radius() < h.reference_mass().value();
}

struct PoleSpec {
  bool present = false;  // pole inside the open integration interval
  double x = 0.0;
  double a = 0.0;  // regular part of the constrained factor
  double b = 0.0;  // residue-like coefficient: factor = a + b/((x - xp)(x + xp))
};

// int_lo^hi F(x) R(x) dx, where R = a + b/((x - xp)(x + xp)); principal value
// by symmetric subtraction around xp when the pole is inside (lo, hi).
cplx integrate_with_pole(const std::function<cplx(double)>& F, const std::function<double(double)>& R, double lo,
                         double hi, const PoleSpec& pole, std::vector<double> breaks, const QuadOptions& q) {
  if (!(hi > lo)) return 0.0;
  if (!pole.present || pole.x <= lo || pole.x >= hi) {
    auto plain = [&](double x) -> cplx {
      const cplx f = F(x);
      if (f == 0.0) return 0.0;
      return f * R(x);
    };
    return integrate(plain, lo, hi, q, breaks).value;
  }
  const double xp = pole.x;
  auto G = [&](double x) -> cplx {
    const cplx f = F(x);
    if (f == 0.0) return 0.0;
    return f * (pole.a * (x - xp) + pole.b / (x + xp));
  };
  const double delta = std::min(xp - lo, hi - xp);
  const double tiny = 1e-7 * delta;
  auto odd = [&](double u) -> cplx {
    const double v = std::max(u, tiny);
    return (G(xp + v) - G(xp - v)) / v;
  };
  std::vector<double> sym_breaks;
  for (double b : breaks) sym_breaks.push_back(std::abs(b - xp));
  cplx total = integrate(odd, 0.0, delta, q, sym_breaks).value;
  auto outside = [&](double x) -> cplx { return G(x) / (x - xp); };
  if (xp - delta > lo) total += integrate(outside, lo, xp - delta, q, breaks).value;
  if (xp + delta < hi) total += integrate(outside, xp + delta, hi, q, breaks).value;
  return total;
}

struct AngularRule {
  std::vector<Vec3> directions;
  std::vector<double> weights;  // sum = 4 pi
};

AngularRule angular_rule(int polar, int azimuth) {
  AngularRule rule;
  const Rule& gl = gauss_legendre(polar);
  for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
    const double ct = gl.nodes[i];
    const double st = std::sqrt(std::max(0.0, 1.0 - ct * ct));
    for (int k = 0; k < azimuth; ++k) {
      const double phi = 2.0 * M_PI * k / azimuth;
      rule.directions.push_back({st * std::cos(phi), st * std::sin(phi), ct});
      rule.weights.push_back(gl.weights[i] * 2.0 * M_PI / azimuth);
    }
  }
  return rule;
}

// Tensor Gauss-Hermite nodes for int F(P) d^3P around a Gaussian of centre
// c and standard deviation sd (per axis).
struct HermiteGrid {
  std::vector<Vec3> nodes;
  std::vector<double> weights;  // include exp(+x^2) and the Jacobian
};

HermiteGrid hermite_grid(const Vec3& c, double sd, int n) {
  HermiteGrid grid;
  const Rule& gh = gauss_hermite(n);
  const double scale = std::sqrt(2.0) * sd;
  const double jac = scale * scale * scale;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double xi = gh.nodes[i], xj = gh.nodes[j], xk = gh.nodes[k];
        grid.nodes.push_back(c + Vec3{scale * xi, scale * xj, scale * xk});
        grid.weights.push_back(jac * gh.weights[i] * gh.weights[j] * gh.weights[k] *
                               std::exp(xi * xi + xj * xj + xk * xk));
      }
    }
  }
  return grid;
}

FourVector scaled(int sign, const FourVector& k) {
  return sign > 0 ? k : FourVector{-k.e, -k.p};
}

void check_pole(double pole, std::pair<double, double> reach, std::pair<double, double> support,
                const ThreePointOptions& opt, int j) {
  const double lo = std::max(reach.first, support.first);
  const double hi = std::min(reach.second, support.second);
  if (lo > hi || opt.pv_mode) return;
  if (pole >= lo - opt.delta_gap && pole <= hi + opt.delta_gap) {
    throw Error(ErrorCode::PoleProximity,
                "term j=" + std::to_string(j) + ": pole at k^2 = " + std::to_string(pole) +
                    " lies within delta_gap of the constrained support [" + std::to_string(lo) + ", " +
                    std::to_string(hi) + "]; enable pv_mode or move the packets");
  }
}

// One outer node: factor * int_lo^hi F(x) R(x) dx.
struct NodeIntegral {
  cplx factor = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<double> breaks;
  std::function<cplx(double)> F;
};

// A coarse L1 pass over all outer nodes sets one absolute floor, so tail
// nodes with negligible values need not meet a relative tolerance alone.
cplx sum_nodes(std::size_t count, const std::function<NodeIntegral(std::size_t)>& setup,
               const std::function<double(double)>& R, const PoleSpec& pole, double r_scale,
               const ThreePointOptions& opt) {
  const auto nodes = parallel_map(count, opt.workers, setup);
  const Rule& gl = gauss_legendre(24);
  auto live = [&](const NodeIntegral& n) { return n.factor != 0.0 && n.hi > n.lo; };
  auto pilot = [&](std::size_t i) {
    const NodeIntegral& n = nodes[i];
    if (!live(n)) return 0.0;
    const double half = 0.5 * (n.hi - n.lo);
    double l1 = 0.0;
    for (std::size_t k = 0; k < gl.nodes.size(); ++k) l1 += gl.weights[k] * std::abs(n.F(n.lo + half * (gl.nodes[k] + 1.0)));
    return std::abs(n.factor) * half * l1;
  };
  const auto l1 = parallel_map(count, opt.workers, pilot);
  double total_l1 = 0.0;
  std::size_t active = 0;
  for (std::size_t i = 0; i < count; ++i) {
    total_l1 += l1[i];
    if (live(nodes[i])) ++active;
  }
  if (active == 0) return 0.0;
  const double floor = opt.rel_tol * total_l1 * r_scale / static_cast<double>(active);
  auto run = [&](std::size_t i) -> cplx {
    const NodeIntegral& n = nodes[i];
    if (!live(n)) return 0.0;
    const QuadOptions q{opt.rel_tol, floor / std::abs(n.factor), 2000};
    return n.factor * integrate_with_pole(n.F, R, n.lo, n.hi, pole, n.breaks, q);
  };
  const auto parts = parallel_map(count, opt.workers, run);
  cplx total = 0.0;
  for (const cplx& v : parts) total += v;
  return total;
}

// Legs a and b on shells of the same sign eps; the constrained packet c is
// evaluated at -(k_a + k_b). Integration variables: pair momentum P,
// t = sqrt(s - s_th), and the rest-frame direction of leg a.
cplx same_sign_term(int j, const WavePacket& a, Mass ma, const WavePacket& b, Mass mb, int eps,
                    const WavePacket& c, int alpha_c, const ModelParams& params, const ThreePointOptions& opt) {
  const ShellSign shell = eps > 0 ? ShellSign::Plus : ShellSign::Minus;
  if (a.vanishes_on_shell(ma, shell) || b.vanishes_on_shell(mb, shell)) return 0.0;
  if (vanishes_at_energy_sign(c, -eps)) return 0.0;

  const double s_th = (ma.value() + mb.value()) * (ma.value() + mb.value());
  const double q0max = omega_from_norm2(a.cutoff() * a.cutoff(), ma) + omega_from_norm2(b.cutoff() * b.cutoff(), mb);
  const double pole = params.mass_of(alpha_c).squared();
  const auto support = ksq_range(c);
  if (std::max(s_th, support.first) > std::min(q0max * q0max, support.second)) return 0.0;
  check_pole(pole, {s_th, q0max * q0max}, support, opt, j);

  const double cfac = 1.0 / mass_gap(params);
  const double sigma = cfac * (pole - params.mass_of(3 - alpha_c).squared());
  PoleSpec pole_t;
  if (pole > s_th) pole_t = {true, std::sqrt(pole - s_th), 2.0 * cfac, sigma};

  // Outer Gaussian: approximate pair envelope times the constrained envelope.
  const Vec3 pair_c = (a.effective_center() + b.effective_center()) * static_cast<double>(eps);
  const double pair_v = a.spatial().width * a.spatial().width + b.spatial().width * b.spatial().width;
  const Vec3 con_c = c.effective_center() * static_cast<double>(-eps);
  const double con_v = c.spatial().width * c.spatial().width;
  const double var = 1.0 / (1.0 / pair_v + 1.0 / con_v);
  const Vec3 centre = (pair_c * (1.0 / pair_v) + con_c * (1.0 / con_v)) * var;
  const HermiteGrid grid = hermite_grid(centre, std::sqrt(var), opt.hermite_nodes);
  const AngularRule ang = angular_rule(opt.polar_nodes, opt.azimuth_nodes);

  const bool c_compact = c.temporal().compact();
  const double c_radius = c.temporal().support_radius();
  const double ma2 = ma.squared(), mb2 = mb.squared();
  const double dm2 = (ma.value() - mb.value()) * (ma.value() - mb.value());

  auto setup = [&](std::size_t idx) {
    NodeIntegral node;
    const Vec3 P = grid.nodes[idx];
    const double P2 = P.norm2();
    double s_lo = s_th;
    double s_hi = q0max * q0max - P2;
    std::vector<double> s_breaks;
    if (c_compact) {
      const double wref = omega(P, c.reference_mass());
      const double e_lo = std::max(0.0, wref - c_radius);
      s_lo = std::max(s_lo, e_lo * e_lo - P2);
      s_hi = std::min(s_hi, (wref + c_radius) * (wref + c_radius) - P2);
      for (double kink : c.temporal().kinks()) {
        if (wref + kink > 0.0) s_breaks.push_back((wref + kink) * (wref + kink) - P2);
      }
    }
    if (!(s_hi > s_lo)) return node;
    node.factor = grid.weights[idx];
    node.lo = std::sqrt(s_lo - s_th);
    node.hi = std::sqrt(s_hi - s_th);
    for (double sb : s_breaks) {
      if (sb > s_lo && sb < s_hi) node.breaks.push_back(std::sqrt(sb - s_th));
    }
    node.F = [&, P, P2](double t) -> cplx {
      const double s = s_th + t * t;
      const double rs = std::sqrt(s);
      const double Q0 = std::sqrt(s + P2);
      const cplx hc = c(scaled(-eps, FourVector{Q0, P}));
      if (hc == 0.0) return 0.0;
      const double pstar = t * std::sqrt(s - dm2) / (2.0 * rs);
      const double ea = (s + ma2 - mb2) / (2.0 * rs);
      const double eb = (s + mb2 - ma2) / (2.0 * rs);
      const double u0 = Q0 / rs;
      const Vec3 u = P * (1.0 / rs);
      cplx sum = 0.0;
      for (std::size_t i = 0; i < ang.directions.size(); ++i) {
        const Vec3 p = ang.directions[i] * pstar;
        const FourVector qa = boost(u0, u, ea, p);
        const cplx ha = a(scaled(eps, qa));
        if (ha == 0.0) continue;
        const FourVector qb = boost(u0, u, eb, -p);
        const cplx hb = b(scaled(eps, qb));
        sum += ang.weights[i] * (ha * hb);
      }
      return hc * sum * (t * pstar / (4.0 * rs * Q0));
    };
    return node;
  };
  auto R = [&](double t) { return constrained_factor(alpha_c, s_th + t * t, params); };
  return sum_nodes(grid.nodes.size(), setup, R, pole_t, 2.0 * cfac + std::abs(sigma), opt);
}

// Leg 1 on the backward shell (q1 = -k1 forward), leg 3 on the forward shell,
// constrained k2 = q1 - k3. Variables: q1, u = sqrt(t_max - k2^2), and the
// direction of k3 in the rest frame of q1.
cplx mixed_term(const WavePacket& h1, Mass m1, const WavePacket& h3, Mass m3, const WavePacket& h2, int alpha2,
                const ModelParams& params, const ThreePointOptions& opt) {
  if (h1.vanishes_on_shell(m1, ShellSign::Minus) || h3.vanishes_on_shell(m3, ShellSign::Plus)) return 0.0;
  const double mm1 = m1.value(), mm3 = m3.value();
  const double t_max = (mm1 - mm3) * (mm1 - mm3);
  const double R1 = h1.cutoff(), R3 = h3.cutoff();
  const double w3max = omega_from_norm2(R3 * R3, m3);
  const double t_min = m1.squared() + m3.squared() - 2.0 * (omega_from_norm2(R1 * R1, m1) * w3max + R1 * R3);
  const double pole = params.mass_of(alpha2).squared();
  const auto support = ksq_range(h2);
  if (std::max(t_min, support.first) > std::min(t_max, support.second)) return 0.0;
  check_pole(pole, {t_min, t_max}, support, opt, 2);

  const double cfac = 1.0 / mass_gap(params);
  const double sigma = cfac * (pole - params.mass_of(3 - alpha2).squared());
  PoleSpec pole_u;
  if (pole < t_max) pole_u = {true, std::sqrt(t_max - pole), 2.0 * cfac, -sigma};

  const HermiteGrid grid = hermite_grid(-h1.effective_center(), h1.spatial().width, opt.hermite_nodes);
  const AngularRule ang = angular_rule(opt.polar_nodes, opt.azimuth_nodes);
  const double m3sq = m3.squared();

  auto setup = [&](std::size_t idx) {
    NodeIntegral node;
    const Vec3 q1 = grid.nodes[idx];
    const double w1 = omega(q1, m1);
    const cplx v1 = h1(FourVector{-w1, -q1});
    if (v1 == 0.0) return node;
    const double t_lo = m1.squared() + m3sq - 2.0 * (w1 * w3max + q1.norm() * R3);
    if (!(t_max > t_lo)) return node;
    node.factor = grid.weights[idx] * v1 / (2.0 * w1);
    node.hi = std::sqrt(t_max - t_lo);
    const double u0 = w1 / mm1;
    const Vec3 uv = q1 * (1.0 / mm1);
    const FourVector Q1{w1, q1};
    node.F = [&, u0, uv, Q1](double u) -> cplx {
      const double x = u * u / (2.0 * mm1);  // E3* - m3
      const double e3 = mm3 + x;
      const double p3 = u * std::sqrt((x + 2.0 * mm3) / (2.0 * mm1));
      cplx sum = 0.0;
      for (std::size_t i = 0; i < ang.directions.size(); ++i) {
        const FourVector k3 = boost(u0, uv, e3, ang.directions[i] * p3);
        const cplx v3 = h3(k3);
        if (v3 == 0.0) continue;
        const cplx v2 = h2(FourVector{Q1.e - k3.e, Q1.p - k3.p});
        sum += ang.weights[i] * (v3 * v2);
      }
      return sum * (p3 * u / (2.0 * mm1));
    };
    return node;
  };
  auto R = [&](double u) { return constrained_factor(alpha2, t_max - u * u, params); };
  return sum_nodes(grid.nodes.size(), setup, R, pole_u, 2.0 * cfac + std::abs(sigma), opt);
}

// p_alpha at its own shell: the only surviving on-shell p-factor.
double onshell_sign(int alpha, const ModelParams& params) {
  return p_factor(alpha, params.mass_of(alpha).squared(), params);
}

}  // namespace

cplx truncated_3pt_term(int j, const std::array<int, 3>& a, const std::array<WavePacket, 3>& h,
                        const ModelParams& params, const ThreePointOptions& opt) {
  for (int alpha : a) params.mass_of(alpha);
  switch (j) {
    case 1:
      return onshell_sign(a[1], params) * onshell_sign(a[2], params) *
             same_sign_term(1, h[1], params.mass_of(a[1]), h[2], params.mass_of(a[2]), +1, h[0], a[0], params, opt);
    case 2:
      return onshell_sign(a[0], params) * onshell_sign(a[2], params) *
             mixed_term(h[0], params.mass_of(a[0]), h[2], params.mass_of(a[2]), h[1], a[1], params, opt);
    case 3:
      return onshell_sign(a[0], params) * onshell_sign(a[1], params) *
             same_sign_term(3, h[1], params.mass_of(a[1]), h[0], params.mass_of(a[0]), -1, h[2], a[2], params, opt);
    default:
      throw Error(ErrorCode::InvalidArgument, "term index j must be 1, 2 or 3");
  }
}

cplx truncated_3pt(const std::array<int, 3>& a, const std::array<WavePacket, 3>& h, const ModelParams& params,
                   const ThreePointOptions& opt) {
  cplx total = 0.0;
  for (int j = 1; j <= 3; ++j) total += truncated_3pt_term(j, a, h, params, opt);
  return total;
}

FieldWord adjoint(const FieldWord& w) {
  FieldWord out;
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back({it->alpha, it->packet.conjugate()});
  return out;
}

cplx full_wightman(const FieldWord& word, const ModelParams& params, const ThreePointOptions& opt) {
  auto w2 = [&](std::size_t i, std::size_t k) {
    return truncated_2pt(word[i].alpha, word[k].alpha, word[i].packet, word[k].packet, params);
  };
  switch (word.size()) {
    case 0:
      return 1.0;
    case 1:
      return 0.0;
    case 2:
      return w2(0, 1);
    case 3:
      return truncated_3pt({word[0].alpha, word[1].alpha, word[2].alpha},
                           {word[0].packet, word[1].packet, word[2].packet}, params, opt);
    case 4:
      return w2(0, 1) * w2(2, 3) + w2(0, 2) * w2(1, 3) + w2(0, 3) * w2(1, 2);
    default:
      throw Error(ErrorCode::UnsupportedOrder,
                  "Wightman functions are implemented up to 4 points, got " + std::to_string(word.size()));
  }
}

nlohmann::json GramResult::to_json() const {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index k = 0; k < matrix.cols(); ++k) row.push_back({matrix(i, k).real(), matrix(i, k).imag()});
    rows.push_back(row);
  }
  std::vector<double> eig(eigenvalues.data(), eigenvalues.data() + eigenvalues.size());
  return {{"matrix", rows},
          {"eigenvalues", eig},
          {"min_eigenvalue", min_eigenvalue},
          {"spectral_norm", norm},
          {"hermiticity_defect", hermiticity_defect},
          {"family_fixture_id", family_fixture_id}};
}

GramResult gram_matrix(const StateFamily& family, const ModelParams& params, const ThreePointOptions& opt) {
  const auto n = static_cast<Eigen::Index>(family.entries.size());
  GramResult out;
  out.family_fixture_id = family.fixture_id;
  out.matrix = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const FieldWord left = adjoint(family.entries[i]);
    for (Eigen::Index k = 0; k < n; ++k) {
      FieldWord word = left;
      word.insert(word.end(), family.entries[k].begin(), family.entries[k].end());
      out.matrix(i, k) = full_wightman(word, params, opt);
    }
  }
  out.hermiticity_defect = (out.matrix - out.matrix.adjoint()).cwiseAbs().maxCoeff();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(out.matrix, Eigen::EigenvaluesOnly);
  out.eigenvalues = solver.eigenvalues();
  out.min_eigenvalue = out.eigenvalues.minCoeff();
  out.norm = out.eigenvalues.cwiseAbs().maxCoeff();
  return out;
}

WavePacket bump_packet(int n, const SpatialEnvelope& g, Mass reference_mass) {
  const LineFunction unit = LineFunction::constant(1.0);
  return WavePacket(regulator(make_bump(), n, unit, kInf), g, reference_mass);
}

WavePacket constant_packet(const SpatialEnvelope& g, Mass reference_mass) {
  return WavePacket(LineFunction::constant(1.0), g, reference_mass);
}

namespace {

// Witness geometry: two mu-particles back to back whose pair mass is
// 0.75 m, and a field-2 packet living on that pair-mass shell.
constexpr double kWitnessPairMass = 0.75;
constexpr double kWitnessWidth = 0.3;
constexpr int kWitnessN = 8;
constexpr double kWitnessAmplitude = 100.0;

std::pair<WavePacket, WavePacket> witness_legs(const ModelParams& params) {
  const double M = kWitnessPairMass * params.m.value();
  const double k = std::sqrt(M * M / 4.0 - params.mu.squared());
  WavePacket g = constant_packet(SpatialEnvelope({0.0, 0.0, k}, kWitnessWidth, 1.0), params.mu);
  WavePacket h = constant_packet(SpatialEnvelope({0.0, 0.0, -k}, kWitnessWidth, 1.0), params.mu);
  return {g, h};
}

}  // namespace

StateFamily witness_family(const ModelParams& params) {
  const Mass pair_mass(kWitnessPairMass * params.m.value());
  WavePacket f =
      bump_packet(kWitnessN, SpatialEnvelope({0.0, 0.0, 0.0}, kWitnessWidth, kWitnessAmplitude), pair_mass);
  if (!f.vanishes_on_shell(params.m, ShellSign::Plus) || !f.vanishes_on_shell(params.m, ShellSign::Minus)) {
    throw Error(ErrorCode::InvalidArgument, "witness packet does not clear the m-shell for these masses");
  }
  auto [g, h] = witness_legs(params);
  StateFamily fam;
  fam.fixture_id = "witness-v1";
  fam.entries = {FieldWord{}, FieldWord{{2, f}}, FieldWord{{1, g}, {1, h}}};
  return fam;
}

StateFamily positive_subfamily(const ModelParams& params) {
  auto [g, h] = witness_legs(params);
  StateFamily fam;
  fam.fixture_id = "witness-v1-single-field-1";
  fam.entries = {FieldWord{{1, g}}, FieldWord{{1, h}}};
  return fam;
}

nlohmann::json DecayResult::to_json() const {
  return {{"estimate_re", estimate.real()},
          {"estimate_im", estimate.imag()},
          {"stderr", stderr_},
          {"samples", samples},
          {"seed", seed},
          {"sigma_shell_ladder", sigma_ladder},
          {"phase_space_re", phase_space.real()},
          {"phase_space_im", phase_space.imag()},
          {"zero_overlap", zero_overlap}};
}

DecayResult decay_amplitude(const WavePacket& h1, const WavePacket& h2, const WavePacket& h3,
                            const ModelParams& params, const DecayOptions& opt) {
  if (opt.samples < 10000) throw Error(ErrorCode::InvalidArgument, "mc samples must be >= 10^4");
  for (double s : opt.sigma_ladder) {
    if (!(s > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma ladder entries must be > 0");
  }
  // Extrapolation weights: Lagrange interpolation in sigma^2 evaluated at 0.
  std::array<double, 3> coef{};
  for (int i = 0; i < 3; ++i) {
    double c = 1.0;
    const double xi = opt.sigma_ladder[i] * opt.sigma_ladder[i];
    for (int k = 0; k < 3; ++k) {
      if (k == i) continue;
      const double xk = opt.sigma_ladder[k] * opt.sigma_ladder[k];
      c *= -xk / (xi - xk);
    }
    coef[i] = c;
  }
  const double m2 = params.m.squared();
  const Mass mu = params.mu;
  const Vec3 c2 = h2.effective_center(), c3 = h3.effective_center();
  const double w2 = h2.spatial().width, w3 = h3.spatial().width;
  const double norm_trunc = std::erf(opt.kernel_cutoff / std::sqrt(2.0));
  const double pdf_norm = std::pow(2.0 * M_PI, -1.5) / (w2 * w2 * w2) * std::pow(2.0 * M_PI, -1.5) / (w3 * w3 * w3);
  const Philox4x32 rng(opt.seed);

  struct Partial {
    cplx sum;
    double sum_sq = 0.0;
    std::array<cplx, 3> per_sigma{};
  };
  constexpr std::size_t chunk = 4096;
  const std::size_t n_chunks = (opt.samples + chunk - 1) / chunk;
  auto run_chunk = [&](std::size_t ci) {
    Partial part;
    const std::size_t begin = ci * chunk;
    const std::size_t end = std::min(opt.samples, begin + chunk);
    for (std::size_t i = begin; i < end; ++i) {
      const auto z = rng.normals(i);
      const Vec3 d2{w2 * z[0], w2 * z[1], w2 * z[2]};
      const Vec3 d3{w3 * z[3], w3 * z[4], w3 * z[5]};
      const Vec3 k2 = c2 + d2, k3 = c3 + d3;
      const FourVector K2{omega(k2, mu), k2}, K3{omega(k3, mu), k3};
      const cplx v2 = h2(K2);
      if (v2 == 0.0) continue;
      const cplx v3 = h3(K3);
      if (v3 == 0.0) continue;
      const FourVector K1{K2.e + K3.e, K2.p + K3.p};
      const double x = minkowski_square(K1) - m2;
      const double q = pdf_norm * std::exp(-0.5 * (d2.norm2() / (w2 * w2) + d3.norm2() / (w3 * w3)));
      std::array<double, 3> kern{};
      bool any = false;
      for (int s = 0; s < 3; ++s) {
        const double sg = opt.sigma_ladder[s];
        if (std::abs(x) > opt.kernel_cutoff * sg) continue;
        kern[s] = std::exp(-0.5 * (x / sg) * (x / sg)) / (sg * std::sqrt(2.0 * M_PI) * norm_trunc);
        any = true;
      }
      if (!any) continue;
      const cplx v1 = h1(K1);
      if (v1 == 0.0) continue;
      const cplx base = v1 * v2 * v3 / (4.0 * K2.e * K3.e * q);
      cplx e0 = 0.0;
      for (int s = 0; s < 3; ++s) {
        const cplx es = base * kern[s];
        part.per_sigma[s] += es;
        e0 += coef[s] * es;
      }
      part.sum += e0;
      part.sum_sq += std::norm(e0);
    }
    return part;
  };
  const auto parts = parallel_map(n_chunks, opt.workers, run_chunk);
  Partial total;
  for (const auto& p : parts) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
    for (int s = 0; s < 3; ++s) total.per_sigma[s] += p.per_sigma[s];
  }
  const double n = static_cast<double>(opt.samples);
  DecayResult out;
  out.samples = opt.samples;
  out.seed = opt.seed;
  out.sigma_ladder = opt.sigma_ladder;
  out.phase_space = total.sum / n;
  for (int s = 0; s < 3; ++s) out.per_sigma[s] = total.per_sigma[s] / n;
  const double var = std::max(0.0, (total.sum_sq - n * std::norm(out.phase_space)) / (n - 1.0));
  const cplx prefactor(0.0, 2.0 * M_PI);
  out.estimate = prefactor * out.phase_space;
  out.stderr_ = 2.0 * M_PI * std::sqrt(var / n);
  out.zero_overlap = std::abs(out.estimate) <= 2.0 * out.stderr_;
  return out;
}

std::array<WavePacket, 3> decay_packets(const ModelParams& params) {
  const double k = std::sqrt(params.m.squared() / 4.0 - params.mu.squared());
  return {constant_packet(SpatialEnvelope({0.0, 0.0, 0.0}, 0.5, 1.0), params.m),
          constant_packet(SpatialEnvelope({0.0, 0.0, k}, 0.3, 1.0), params.mu),
          constant_packet(SpatialEnvelope({0.0, 0.0, -k}, 0.3, 1.0), params.mu)};
}

std::array<WavePacket, 3> disjoint_decay_packets(const ModelParams& params) {
  auto packets = decay_packets(params);
  // Temporal support of width 1/8 around the 0.6 m shell with a narrow
  // envelope: every k in the support has k0 < m.
  packets[0] = bump_packet(16, SpatialEnvelope({0.0, 0.0, 0.0}, 0.15, 1.0), Mass(0.6 * params.m.value()));
  return packets;
}

}  // namespace yfstab
