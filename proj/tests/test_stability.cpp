#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "yfstab/stability.hpp"

using namespace yfstab;

namespace {

// tests/oracles/reference_values.py: radial mpmath quadratures of the defining
// integrals for the demo current (m = 2, unit envelope), and a scipy nested
// quadrature of the Kallen-Lehmann norm over rho = 1 on [2.56, 5.76].
constexpr double kWTilde0 = 1.2057974968902473196;
constexpr double kWTildeHalf = 0.95937104032664872155;
constexpr double kWTildeMinus075 = 1.0889537612141129113;
constexpr double kKl4 = 1.5152918236229516;
constexpr double kKl16 = 0.4382496329403219;

const Mass kM(2.0);
const SpatialEnvelope kG({0.0, 0.0, 0.0}, 1.0, 1.0);

const StabilityEngine& engine() {
  static const StabilityEngine e(onshell_nonzero_current(kM), kG, kM);
  return e;
}

SpectralMeasure demo_rho() { return SpectralMeasure::uniform(0.64 * 4.0, 1.44 * 4.0); }

const StabilityReport& demo_report() {
  static const StabilityReport r = [] {
    StabilityConfig c;
    c.current = onshell_nonzero_current(kM);
    c.g = kG;
    c.mass = kM;
    c.rho = demo_rho();
    c.workers = 4;
    return run_stability(c);
  }();
  return r;
}

// int bump(u)/u du = 2 + 2 int_1^2 taper, by Gauss-Legendre on the taper.
double bump_integral_1d() {
  const oracle::Rule r = oracle::legendre(40);
  double acc = 0.0;
  for (int i = 0; i < 40; ++i) {
    const double u = 1.5 + 0.5 * r.x[i];
    acc += 0.5 * r.w[i] * 0.5 * (1.0 + std::cos(M_PI * (u - 1.0)));
  }
  return 2.0 + 2.0 * acc;
}

}  // namespace

TEST_SUITE("stability") {

TEST_CASE("w_tilde: vanishing currents are rejected") {
  CHECK_THROWS_WITH_AS(w_tilde(zero_current(), kG, kM), doctest::Contains("ONSHELL_VANISHING"), Error);
  CHECK_THROWS_WITH_AS(w_tilde(onshell_vanishing_current(kM), kG, kM), doctest::Contains("ONSHELL_VANISHING"),
                       Error);
}

TEST_CASE("w_tilde: demo current against radial oracle") {
  const WTilde& wt = engine().w_tilde();
  CHECK(std::abs(wt.at_zero - kWTilde0) <= 1e-8 * kWTilde0);
  CHECK(std::abs(wt.fn(0.0) - kWTilde0) <= 1e-8 * kWTilde0);
  CHECK(std::abs(wt.fn(0.5) - kWTildeHalf) <= 1e-8 * kWTildeHalf);
  CHECK(std::abs(wt.fn(-0.75) - kWTildeMinus075) <= 1e-8 * kWTildeMinus075);
  CHECK(std::abs(w_tilde_direct(onshell_nonzero_current(kM), kG, kM, 0.5) - kWTildeHalf) <= 1e-8);
  CHECK(wt.r0 > 0.0);
  CHECK(wt.r0 <= onshell_nonzero_current(kM).c1_radius);
  // certified radius: |w_tilde| >= |w_tilde(0)| / 2 inside
  for (int i = -100; i <= 100; ++i) {
    const double k = wt.r0 * i / 100.0;
    REQUIRE(std::abs(wt.fn(k)) >= 0.5 * std::abs(wt.at_zero));
  }
  CHECK(wt.fn.smoothness() == Smoothness::C1);
}

TEST_CASE("pairing: lower bound, reality and n-invariance") {
  const double exact = bump_integral_1d();
  CHECK(exact == doctest::Approx(3.0).epsilon(1e-15));
  std::vector<cplx> values;
  for (int n : {4, 16, 64, 256}) {
    const cplx p = engine().pairing(n).value;
    CHECK(p.real() >= 2.0 - 1e-3);
    CHECK(std::abs(p.imag()) <= 1e-6 * p.real());
    CHECK(std::abs(p - exact) <= 1e-10);
    values.push_back(p);
  }
  for (const cplx& v : values) CHECK(std::abs(v - values.front()) <= 1e-6 * std::abs(values.front()));
}

TEST_CASE("pairing: n below the certified radius is rejected") {
  CHECK_THROWS_WITH_AS(engine().pairing(1), doctest::Contains("INSUFFICIENT_N"), Error);
}

TEST_CASE("pairing: invariant under rescaling the current") {
  for (double scale : {0.05, 3.7, 250.0}) {
    CurrentProfile p;
    p.amplitude = scale;
    const StabilityEngine scaled(gaussian_current(kM, p), kG, kM);
    CHECK(std::abs(scaled.w_tilde().at_zero - scale * engine().w_tilde().at_zero) <= 1e-8 * scale);
    for (int n : {4, 64}) CHECK(std::abs(scaled.pairing(n).value - engine().pairing(n).value) <= 1e-8);
  }
}

TEST_CASE("kl_norm ladder: oracle values, collapse and domination") {
  const StabilityReport& r = demo_report();
  REQUIRE(r.rows.size() == 4);
  CHECK(std::abs(r.rows[0].kl_norm - kKl4) <= 1e-6 * kKl4);
  CHECK(std::abs(r.rows[1].kl_norm - kKl16) <= 1e-6 * kKl16);
  for (std::size_t i = 1; i < r.rows.size(); ++i) CHECK(r.rows[i].kl_norm < r.rows[i - 1].kl_norm);
  CHECK(r.rows.back().kl_norm / r.rows.front().kl_norm < 0.05);
  for (const auto& row : r.rows) {
    CHECK(row.kl_norm >= 0.0);
    CHECK(row.kl_norm <= row.bound_integral + 1e-8);
  }
  CHECK(r.verdict == Verdict::ContradictionDemonstrated);
  CHECK(r.branch == "onshell-nonzero");
}

TEST_CASE("kl_norm: degenerate measures and envelopes") {
  const SpectralMeasure atom = SpectralMeasure::atom(kM.squared(), 1.0);
  for (int n : {4, 16, 64, 256}) CHECK(std::abs(engine().kl_norm(n, atom).value) <= 1e-12);
  const WavePacket pkt = engine().packet(16);
  const WavePacket empty(pkt.temporal(), SpatialEnvelope({0.0, 0.0, 0.0}, 1.0, 0.0), kM);
  auto f = [&](const FourVector& k) -> cplx { return std::norm(empty(k)); };
  CHECK(kl_pairing(demo_rho(), f, empty.cutoff()).value == cplx(0.0));
  const SpectralMeasure negative({{4.0, -1.0}}, {}, true);
  CHECK_THROWS_AS(engine().kl_norm(4, negative), Error);
}

TEST_CASE("in/out difference: both branches") {
  const ModelCurrent nonzero = onshell_nonzero_current(kM);
  const ModelCurrent vanishing = onshell_vanishing_current(kM);
  // temporal 1, unit envelope: the shell integral coincides with w_tilde(0)
  const WavePacket flat(LineFunction::constant(1.0), kG, kM);
  const cplx d = in_out_difference(nonzero, kM, flat);
  CHECK(std::abs(d - cplx(0.0, -2.0 * M_PI * kWTilde0)) <= 1e-7);
  CHECK(std::abs(d) >= 1e-3);
  CHECK(std::abs(in_out_difference(nonzero, kM, engine().packet(16))) <= 1e-12);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 10; ++i) {
    const SpatialEnvelope g({u(rng), u(rng), u(rng)}, 0.5 + 0.4 * std::abs(u(rng)), 1.0 + u(rng));
    const WavePacket h(LineFunction::constant(cplx(1.0, u(rng))), g, kM);
    CHECK(std::abs(in_out_difference(vanishing, kM, h)) <= 1e-8);
    CHECK(std::abs(in_out_difference(nonzero, kM, h)) > 1e-3);
  }
}

TEST_CASE("in/out difference needs a backward-shell-free current") {
  ModelCurrent c = onshell_nonzero_current(kM);
  c.backward_shell_zero = false;
  CHECK_THROWS_AS(in_out_difference(c, kM, WavePacket(LineFunction::constant(1.0), kG, kM)), Error);
}

TEST_CASE("Yang-Feldman split re-sums") {
  const ModelCurrent current = onshell_nonzero_current(kM);
  auto out_amp = [](const FourVector& k) -> cplx { return cplx(0.3, 0.1) * std::exp(-k.p.norm2()); };
  YangFeldmanDecomposition yf(current, kM, out_amp);
  const LineFunction temporal([](double x) -> cplx { return std::exp(-2.0 * (x - 0.2) * (x - 0.2)); },
                              std::numeric_limits<double>::infinity(), Smoothness::Smooth);
  const WavePacket h(temporal, SpatialEnvelope({0.2, -0.1, 0.0}, 0.6, 1.0), kM);
  const cplx ret = yf.retarded(h), adv = yf.advanced(h), in = yf.in(h), out = yf.out(h);
  CHECK(std::abs((ret + in) - (adv + out)) <= 1e-9 * std::abs(yf.full(h)));
  const cplx diff = in_out_difference(current, kM, h);
  CHECK(std::abs((in - out) - diff) <= 1e-6 * std::abs(diff));
  CHECK(std::abs((adv - ret) - diff) <= 1e-6 * std::abs(diff));
}

TEST_CASE("run_stability branches") {
  StabilityConfig c;
  c.g = kG;
  c.mass = kM;
  c.rho = demo_rho();
  c.n_ladder = {4, 16};

  c.current = onshell_vanishing_current(kM);
  const StabilityReport vanish = run_stability(c);
  CHECK(vanish.verdict == Verdict::Consistent);
  CHECK(vanish.branch == "onshell-vanishing");

  c.current = onshell_nonzero_current(kM);
  c.rho = SpectralMeasure({{4.0, -0.5}}, {DensityPiece{2.56, 5.76, {1.0}}}, true);
  const StabilityReport indefinite = run_stability(c);
  CHECK(indefinite.verdict == Verdict::Consistent);
  CHECK(indefinite.branch == "indefinite");
  for (const auto& row : indefinite.rows) CHECK(row.pairing.real() >= 2.0 - 1e-3);

  c.n_ladder = {16, 4};
  CHECK_THROWS_AS(run_stability(c), Error);
}

TEST_CASE("report CSV layout") {
  const std::string csv = demo_report().to_csv();
  CHECK(csv.rfind("n,pairing_re,pairing_im,kl_norm,bound_integral,cs_lhs,cs_rhs\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK(csv.find("\n4,3,0,") != std::string::npos);
  const auto j = demo_report().to_json();
  CHECK(j["verdict"] == "CONTRADICTION_DEMONSTRATED");
  CHECK(j["rows"][3]["n"] == 256);
}

TEST_CASE("format_double round-trips") {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 3.0}) CHECK(std::stod(format_double(x)) == x);
  CHECK(format_double(3.0) == "3");
}

}  // TEST_SUITE
