#include <random>

#include "doctest.h"
#include "yfstab/error.hpp"
#include "yfstab/testfunctions.hpp"

using namespace yfstab;

namespace {

LineFunction unit_line() { return LineFunction::constant(1.0); }

LineFunction one_plus_square() {
  return LineFunction([](double x) -> cplx { return 1.0 + x * x; }, std::numeric_limits<double>::infinity(),
                      Smoothness::Smooth);
}

}  // namespace

TEST_SUITE("testfunctions") {

TEST_CASE("bump values") {
  const BumpProfile b = make_bump();
  CHECK(b(0.5) == 0.5);
  CHECK(b(-0.5) == -0.5);
  CHECK(b(2.0) == 0.0);
  CHECK(b(1.5) == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(b(0.0) == 0.0);
}

TEST_CASE("bump invariants on a 1e5-point grid") {
  const BumpProfile b = make_bump();
  constexpr int N = 100000;
  for (int i = 0; i <= N; ++i) {
    const double x = -3.0 + 6.0 * i / N;
    REQUIRE(b(-x) == -b(x));
    if (std::abs(x) <= 1.0) REQUIRE(b(x) == x);
    if (x >= 0.0) REQUIRE((b(x) >= 0.0 && b(x) <= 2.0));
    if (std::abs(x) >= 2.0) REQUIRE(b(x) == 0.0);
  }
}

TEST_CASE("bump is continuously differentiable at the joins") {
  const BumpProfile b = make_bump();
  const double h = 1e-7;
  for (double x : {-2.0, -1.0, 1.0, 2.0}) {
    const double left = (b(x) - b(x - h)) / h;
    const double right = (b(x + h) - b(x)) / h;
    CHECK(std::abs(left - right) <= 1e-6);
    CHECK(std::abs(b.derivative(x - 1e-12) - b.derivative(x + 1e-12)) <= 1e-6);
  }
}

TEST_CASE("bump(n kappa)/kappa is nonnegative and equals n near zero") {
  const BumpProfile b = make_bump();
  for (int n : {1, 4, 16, 64, 256}) {
    for (int i = 1; i <= 4000; ++i) {
      const double x = 3.0 * i / (4000.0 * n);
      for (double k : {x, -x}) {
        const double q = b(n * k) / k;
        REQUIRE(q >= 0.0);
        if (std::abs(k) <= 1.0 / n) REQUIRE(q == doctest::Approx(double(n)).epsilon(1e-14));
      }
    }
  }
}

TEST_CASE("regulator examples") {
  const BumpProfile b = make_bump();
  const LineFunction same = regulator(b, 1, unit_line(), 2.0);
  for (double x : {-2.5, -1.7, -0.3, 0.0, 0.9, 1.2, 1.99}) CHECK(same(x) == cplx(b(x)));
  CHECK(same.support_radius() == 2.0);
  CHECK(same.smoothness() == Smoothness::C1);

  const LineFunction r4 = regulator(b, 4, one_plus_square(), 1.0);
  CHECK(r4(0.0) == cplx(0.0));
  CHECK(r4(0.125) == cplx(0.5 / 1.015625));
  CHECK(r4.support_radius() == 0.5);

  CHECK_THROWS_WITH_AS(regulator(b, 1, one_plus_square(), 1.0), doctest::Contains("INSUFFICIENT_N"), Error);
  CHECK_THROWS_AS(regulator(b, 3, one_plus_square(), 0.5), Error);
  CHECK_NOTHROW(regulator(b, 4, one_plus_square(), 0.5));
}

TEST_CASE("packet_eval factorizes") {
  const BumpProfile b = make_bump();
  const Mass m(1.3);
  const SpatialEnvelope g({0.2, -0.1, 0.4}, 0.7, 1.6);
  const WavePacket reg(regulator(b, 8, one_plus_square(), 1.0), g, m);
  for (const Vec3& p : {Vec3{0, 0, 0}, Vec3{0.3, 0.1, -0.2}, Vec3{1.0, 1.0, 1.0}}) {
    CHECK(packet_eval(reg, on_shell(p, m)) == cplx(0.0));
  }
  const WavePacket flat(unit_line(), g, m);
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p{u(rng), u(rng), u(rng)};
    const FourVector k{omega(p, m) + 0.3 * u(rng), p};
    CHECK(packet_eval(flat, k) == cplx(g(p)));
    // independent factors
    const double kappa = k.e - std::sqrt(p.norm2() + m.squared());
    const double env = 1.6 * std::exp(-(p - g.center).norm2() / (2 * 0.7 * 0.7));
    const double temporal = std::abs(8 * kappa) >= 2 ? 0.0 : b(8 * kappa) / (1 + kappa * kappa);
    CHECK(std::abs(packet_eval(reg, k) - temporal * env) <= 1e-14 * std::max(1.0, std::abs(temporal * env)));
  }
}

TEST_CASE("conjugate packet is conj(h(-k)) and involutive") {
  const LineFunction temporal([](double x) { return cplx(1.0 + x, 0.5 * x * x); },
                              std::numeric_limits<double>::infinity(), Smoothness::Smooth);
  const WavePacket h(temporal, SpatialEnvelope({0.3, 0.0, -0.2}, 0.5, 1.0), Mass(1.0));
  const WavePacket hc = h.conjugate();
  const WavePacket hcc = hc.conjugate();
  for (const FourVector& k : {FourVector{1.2, {0.1, 0.2, 0.3}}, FourVector{-0.7, {-0.4, 0.0, 0.1}}}) {
    CHECK(hc(k) == std::conj(h(-k)));
    CHECK(hcc(k) == h(k));
  }
  CHECK(hc.effective_center() == Vec3{-0.3, 0.0, 0.2});
}

TEST_CASE("spatial envelope") {
  const SpatialEnvelope g({1.0, 0.0, 0.0}, 0.5, 2.0);
  CHECK(g({1.0, 0.0, 0.0}) == 2.0);
  CHECK(g({1.5, 0.0, 0.0}) == doctest::Approx(2.0 * std::exp(-0.5)).epsilon(1e-15));
  CHECK(g.truncation_radius() == doctest::Approx(0.5 * std::sqrt(24.0 * std::log(10.0))).epsilon(1e-14));
  CHECK(g({1.0 + 1.01 * g.truncation_radius(), 0.0, 0.0}) == 0.0);
  CHECK(g({1.0 + 0.99 * g.truncation_radius(), 0.0, 0.0}) > 0.0);
  CHECK_THROWS_AS(SpatialEnvelope({0, 0, 0}, 0.0, 1.0), Error);
  const auto j = g.to_json();
  const SpatialEnvelope back = SpatialEnvelope::from_json(j);
  CHECK(back.to_json() == j);
}

TEST_CASE("uniform bound with unit w_tilde is (2 chi g)^2") {
  const SpatialEnvelope g({0.0, 0.2, 0.0}, 0.8, 1.5);
  const Mass m(1.0);
  const RegulatorFamily fam{make_bump(), unit_line(), 1.0};
  const DominatingFunction dom = uniform_bound(fam, g, m);
  CHECK(dom.M == 2.0);
  const Vec3 p{0.1, 0.3, -0.2};
  const double w = omega(p, m);
  CHECK(dom(FourVector{w + 0.5, p}) == doctest::Approx(4.0 * g(p) * g(p)).epsilon(1e-15));
  CHECK(dom(FourVector{w + 1.01, p}) == 0.0);
  CHECK(dom(FourVector{w - 1.01, p}) == 0.0);
}

TEST_CASE("uniform bound dominates every member, members vanish pointwise") {
  const SpatialEnvelope g({0.1, 0.0, -0.3}, 0.6, 1.0);
  const Mass m(2.0);
  const LineFunction wt([](double x) -> cplx { return cplx(1.2 - 0.3 * x, 0.1 * x) * std::exp(-x * x / 2); },
                        std::numeric_limits<double>::infinity(), Smoothness::Smooth);
  const RegulatorFamily fam{make_bump(), wt, 1.0};
  const DominatingFunction dom = uniform_bound(fam, g, m);
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-1.2, 1.2), uk(-1.5, 1.5);
  std::vector<FourVector> grid;
  for (int i = 0; i < 400; ++i) {
    const Vec3 p{u(rng), u(rng), u(rng)};
    grid.push_back({omega(p, m) + uk(rng), p});
  }
  for (int n = 2; n <= 256; n += 2) {
    const WavePacket pkt(fam.member(n), g, m);
    for (const FourVector& k : grid) {
      const double v = std::norm(pkt(k));
      REQUIRE(dom(k) >= v);
      const double kappa = off_shellness(k, m);
      if (2.0 / n < std::abs(kappa)) REQUIRE(v == 0.0);
      if (std::abs(kappa) > 1.0) REQUIRE(dom(k) == 0.0);
    }
  }
}

TEST_CASE("uniform bound needs an admissible family") {
  const RegulatorFamily fam{make_bump(), unit_line(), 0.0};
  CHECK_THROWS_AS(uniform_bound(fam, SpatialEnvelope(), Mass(1.0)), Error);
}

}  // TEST_SUITE
