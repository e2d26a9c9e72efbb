#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "yfstab/distributions.hpp"
#include "yfstab/testfunctions.hpp"

using namespace yfstab;

namespace {

// Frozen values from tests/oracles/reference_values.py (mpmath, 40 digits).
constexpr double kShellGaussian = 1.8957945932929922455;     // int exp(-k^2)/(2 sqrt(1+k^2)) d^3k
constexpr double kPvShiftedGaussian = 1.9074421882417552323;  // eps -> 0 of int exp(-(k-1)^2) k/(k^2+eps^2)

MomentumFunction gaussian4(Vec3 c, double w, double e0, double tau) {
  return [=](const FourVector& k) -> cplx {
    const double d = (k.p - c).norm2();
    return std::exp(-d / (2 * w * w)) * std::exp(-(k.e - e0) * (k.e - e0) / (2 * tau * tau));
  };
}

// C1 corpus for the Sokhotski identity.
std::vector<LineFunction> corpus() {
  std::vector<LineFunction> out;
  for (int i = 0; i < 14; ++i) {
    const double a = 0.5 + 0.25 * i, b = -1.0 + 0.15 * i, c = 0.3 + 0.1 * (i % 5), d = 0.2 * (i % 3) - 0.2;
    out.emplace_back([=](double x) { return cplx(a + d * x, b * x) * std::exp(-c * (x - d) * (x - d)); },
                     std::numeric_limits<double>::infinity(), Smoothness::Smooth);
  }
  for (int i = 0; i < 6; ++i) {
    const double R = 0.5 + 0.4 * i, shift = 0.1 * i - 0.2;
    // (1 - (x/R)^2)^2 is C1 at |x| = R
    out.emplace_back(
        [=](double x) {
          const double t = 1.0 - (x / R) * (x / R);
          return cplx(1.0 + shift * x, 0.5 * shift) * t * t;
        },
        R, Smoothness::C1);
  }
  return out;
}

}  // namespace

TEST_SUITE("distributions") {

TEST_CASE("smear_mass_shell: zero integrand") {
  auto zero = [](const FourVector&) -> cplx { return 0.0; };
  CHECK(smear_mass_shell(Mass(1.0), ShellSign::Plus, zero, 3.0).value == cplx(0.0));
}

TEST_CASE("smear_mass_shell: Gaussian against Simpson oracle") {
  auto f = [](const FourVector& k) -> cplx { return std::exp(-k.p.norm2()); };
  const cplx oracle = oracle::shell_simpson(f, 1.0, +1, Vec3{}, 6.0, 120);
  // the oracle itself against the 1D radial reduction
  CHECK(std::abs(oracle - kShellGaussian) < 1e-10);
  const QuadResult q = smear_mass_shell(Mass(1.0), ShellSign::Plus, f, 6.0);
  CHECK(std::abs(q.value - oracle) <= 1e-6 * std::abs(oracle));
  CHECK(q.error <= 1e-6 * std::abs(q.value));
}

TEST_CASE("smear_mass_shell: backward shell misses forward support") {
  auto f = [](const FourVector& k) -> cplx { return k.e > 0 ? std::exp(-k.p.norm2()) * (1.0 + k.e) : 0.0; };
  CHECK(smear_mass_shell(Mass(1.0), ShellSign::Minus, f, 6.0).value == cplx(0.0));
}

TEST_CASE("smear_mass_shell: cutoff must be positive") {
  auto f = [](const FourVector&) -> cplx { return 1.0; };
  CHECK_THROWS_AS(smear_mass_shell(Mass(1.0), ShellSign::Plus, f, 0.0), Error);
}

TEST_CASE("smear_mass_shell matches the narrow-Gaussian 4D regularization") {
  struct Case {
    double s;
    Vec3 c;
    double w, e0, tau;
  };
  for (const Case& cs : {Case{1.0, {0.2, 0.0, -0.1}, 0.6, 1.3, 0.8}, Case{2.0, {-0.5, 0.4, 0.3}, 0.4, 2.0, 1.5}}) {
    const MomentumFunction f = gaussian4(cs.c, cs.w, cs.e0, cs.tau);
    const cplx ref = oracle::narrow_shell_limit(f, cs.s, 0.04, cs.c, 7.0 * cs.w, 24, 24);
    const cplx got = smear_mass_shell(Mass(cs.s), ShellSign::Plus, f, cs.c.norm() + 8.0 * cs.w).value;
    CHECK(std::abs(got - ref) <= 1e-4 * std::abs(ref));
  }
}

TEST_CASE("principal_value examples") {
  const LineFunction even([](double x) -> cplx { return std::exp(-x * x); },
                          std::numeric_limits<double>::infinity(), Smoothness::Smooth);
  CHECK(std::abs(principal_value(even).value) == 0.0);
  const LineFunction odd([](double x) -> cplx { return x * std::exp(-x * x); },
                         std::numeric_limits<double>::infinity(), Smoothness::Smooth);
  CHECK(std::abs(principal_value(odd).value - std::sqrt(M_PI)) < 1e-10);
  const LineFunction shifted([](double x) -> cplx { return std::exp(-(x - 1) * (x - 1)); },
                             std::numeric_limits<double>::infinity(), Smoothness::Smooth);
  CHECK(std::abs(principal_value(shifted).value - kPvShiftedGaussian) < 1e-8);
}

TEST_CASE("principal_value of a nearly even integrand") {
  const double shift = 0.05 * 3 - 0.15;  // rounding leaves ~1e-17
  const LineFunction f([=](double x) -> cplx { return std::exp(-(x - shift) * (x - shift)); },
                       std::numeric_limits<double>::infinity(), Smoothness::Smooth);
  const QuadResult q = principal_value(f);
  CHECK(std::abs(q.value - 2.0 * std::sqrt(M_PI) * shift) <= 1e-12);
}

TEST_CASE("principal_value rejects C0 integrands") {
  const LineFunction kink([](double x) -> cplx { return std::abs(x) < 1 ? 1.0 - std::abs(x) : 0.0; }, 1.0,
                          Smoothness::C0);
  CHECK_THROWS_WITH_AS(principal_value(kink), doctest::Contains("SMOOTHNESS_VIOLATION"), Error);
  CHECK_THROWS_AS(boundary_value_pairing(kink, Side::PlusI0), Error);
}

TEST_CASE("boundary_value_pairing examples") {
  const LineFunction gauss([](double x) -> cplx { return std::exp(-x * x); },
                           std::numeric_limits<double>::infinity(), Smoothness::Smooth);
  CHECK(std::abs(boundary_value_pairing(gauss, Side::PlusI0).value - cplx(0.0, -M_PI)) < 1e-6);

  const LineFunction vanishing([](double x) -> cplx { return x * std::exp(-(x - 0.3) * (x - 0.3)); },
                               std::numeric_limits<double>::infinity(), Smoothness::Smooth);
  CHECK(boundary_value_pairing(vanishing, Side::PlusI0).value ==
        boundary_value_pairing(vanishing, Side::MinusI0).value);

  const LineFunction shifted([](double x) -> cplx { return std::exp(-(x - 1) * (x - 1)); },
                             std::numeric_limits<double>::infinity(), Smoothness::Smooth);
  const cplx v = boundary_value_pairing(shifted, Side::PlusI0).value;
  CHECK(std::abs(v.real() - kPvShiftedGaussian) < 1e-8);
  CHECK(std::abs(v.imag() + M_PI * std::exp(-1.0)) < 1e-12);
}

TEST_CASE("Sokhotski identity on a C1 corpus") {
  const auto fs = corpus();
  REQUIRE(fs.size() == 20);
  for (const auto& f : fs) {
    const cplx plus = boundary_value_pairing(f, Side::PlusI0).value;
    const cplx minus = boundary_value_pairing(f, Side::MinusI0).value;
    CHECK(std::abs((plus - minus) - cplx(0.0, -2.0 * M_PI) * f(0.0)) <= 1e-8);
  }
}

TEST_CASE("pairings are linear") {
  const auto fs = corpus();
  const cplx a(0.7, -0.3), b(-1.2, 0.4);
  for (std::size_t i = 0; i + 1 < fs.size(); i += 3) {
    const LineFunction& f = fs[i];
    const LineFunction& g = fs[i + 1];
    std::vector<double> kinks;
    for (double r : {f.support_radius(), g.support_radius()}) {
      if (std::isfinite(r)) kinks.insert(kinks.end(), {-r, r});
    }
    const LineFunction sum([&](double x) { return a * f(x) + b * g(x); }, std::numeric_limits<double>::infinity(),
                           Smoothness::C1, kinks);
    for (Side side : {Side::PlusI0, Side::MinusI0}) {
      const cplx lhs = boundary_value_pairing(sum, side).value;
      const cplx rhs = a * boundary_value_pairing(f, side).value + b * boundary_value_pairing(g, side).value;
      CHECK(std::abs(lhs - rhs) <= 1e-7 * std::max(1.0, std::abs(rhs)));
    }
  }
  auto f = gaussian4({0.1, 0.2, 0.0}, 0.5, 1.0, 1.0);
  auto g = gaussian4({-0.3, 0.0, 0.2}, 0.7, 1.5, 0.5);
  auto h = [&](const FourVector& k) { return a * f(k) + b * g(k); };
  const Mass s(1.1);
  const cplx lhs = smear_mass_shell(s, ShellSign::Plus, h, 6.0).value;
  const cplx rhs = a * smear_mass_shell(s, ShellSign::Plus, f, 6.0).value +
                   b * smear_mass_shell(s, ShellSign::Plus, g, 6.0).value;
  CHECK(std::abs(lhs - rhs) <= 1e-6 * std::abs(rhs));
}

TEST_CASE("kl_pairing: atom collapses to a single shell") {
  const WavePacket pkt = constant_packet(SpatialEnvelope({0.1, -0.2, 0.3}, 0.5, 1.0), Mass(1.0));
  auto f = [&](const FourVector& k) -> cplx { return std::norm(pkt(k)); };
  const cplx shell = smear_mass_shell(Mass(1.0), ShellSign::Plus, f, pkt.cutoff()).value;
  const cplx kl = kl_pairing(SpectralMeasure::atom(1.0, 1.0), f, pkt.cutoff()).value;
  CHECK(kl == shell);
  CHECK(kl_pairing(SpectralMeasure({{1.0, 0.0}, {2.0, 0.0}}, {}), f, pkt.cutoff()).value == cplx(0.0));
  CHECK(kl_pairing(SpectralMeasure({}, {DensityPiece{0.5, 2.0, {0.0}}}), f, pkt.cutoff()).value == cplx(0.0));
}

TEST_CASE("kl_pairing: uniform density against a 4D grid oracle") {
  const Vec3 c{0.2, 0.0, -0.1};
  auto f = [&](const FourVector& k) -> cplx {
    return std::exp(-(k.p - c).norm2()) * std::exp(-(k.e - 1.2) * (k.e - 1.2));
  };
  const oracle::Rule gl = oracle::legendre(16);
  cplx ref = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double s2 = 1.0 + 0.2 * gl.x[i];
    ref += 0.2 * gl.w[i] * oracle::shell_simpson(f, std::sqrt(s2), +1, c, 6.0, 80);
  }
  const cplx got = kl_pairing(SpectralMeasure::uniform(0.8, 1.2), f, c.norm() + 6.0).value;
  CHECK(std::abs(got - ref) <= 1e-6 * std::abs(ref));
}

TEST_CASE("kl_pairing is positive for positive measures") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const SpectralMeasure rho({{2.0, 0.5}, {0.3, 1.5}}, {DensityPiece{0.5, 3.0, {1.0, -0.2, 0.05}}});
  REQUIRE(rho.is_positive());
  for (int i = 0; i < 4; ++i) {
    const LineFunction temporal([](double x) { return cplx(1.0, 0.5 * x) * std::exp(-x * x); },
                                std::numeric_limits<double>::infinity(), Smoothness::Smooth);
    const WavePacket pkt(temporal, SpatialEnvelope({u(rng), u(rng), u(rng)}, 0.4 + 0.3 * std::abs(u(rng)), 1.0),
                         Mass(1.0 + 0.5 * i));
    auto f = [&](const FourVector& k) -> cplx { return std::norm(pkt(k)); };
    const cplx v = kl_pairing(rho, f, pkt.cutoff()).value;
    CHECK(v.real() > 0.0);
    CHECK(std::abs(v.imag()) < 1e-10 * v.real());
  }
}

TEST_CASE("SpectralMeasure validation and JSON round trip") {
  CHECK_THROWS_AS(SpectralMeasure({{1.0, -0.5}}, {}), Error);
  CHECK_THROWS_AS(SpectralMeasure({{-1.0, 0.5}}, {}), Error);
  CHECK_THROWS_AS(SpectralMeasure({}, {DensityPiece{2.0, 1.0, {1.0}}}), Error);
  CHECK_THROWS_AS(SpectralMeasure({}, {DensityPiece{0.0, 1.0, {-1.0, 0.5}}}), Error);
  const SpectralMeasure signed_rho({{1.0, -0.5}}, {DensityPiece{0.0, 1.0, {-1.0, 0.5}}}, true);
  CHECK_FALSE(signed_rho.is_positive());

  const SpectralMeasure rho({{4.0, 0.25}, {1.0, 2.0}}, {DensityPiece{0.5, 1.5, {1.0, 0.5}}, DensityPiece{2.0, 3.0, {2.0}}});
  const nlohmann::json j = rho.to_json();
  CHECK(j["atoms"][0] == nlohmann::json{4.0, 0.25});
  CHECK(j["density"][1]["interval"] == nlohmann::json{2.0, 3.0});
  const SpectralMeasure back = SpectralMeasure::from_json(j);
  CHECK(back.to_json() == j);
  // 0.25 + 2 + int_{0.5}^{1.5} (1 + s/2) + 2
  CHECK(rho.total_mass() == doctest::Approx(0.25 + 2.0 + 1.5 + 2.0).epsilon(1e-14));

  const auto bad = nlohmann::json::parse(R"({"atoms": [[1.0]]})");
  CHECK_THROWS_WITH_AS(SpectralMeasure::from_json(bad), doctest::Contains("CONFIG_INVALID"), Error);
}

}  // TEST_SUITE
