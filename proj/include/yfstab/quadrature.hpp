#pragma once

// Adaptive Gauss-Kronrod integration of complex-valued integrands.
//
// The driver is global-adaptive (always bisect the interval with the largest
// error estimate) with deterministic tie-breaking, and the final value is an
// ordered sum over intervals sorted by position, so a given integrand always
// produces bit-identical results.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "yfstab/error.hpp"
#include "yfstab/kinematics.hpp"

namespace yfstab {

using cplx = std::complex<double>;

struct QuadResult {
  cplx value{0.0, 0.0};
  double error = 0.0;
  std::size_t evaluations = 0;
};

struct QuadOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  std::size_t max_intervals = 2000;
};

namespace detail {

struct GK15 {
  // Kronrod abscissae on [0,1] (positive half, descending), with weights.
  static constexpr std::array<double, 8> xk = {
      0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
      0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
      0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
      0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
  static constexpr std::array<double, 8> wk = {
      0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
      0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
      0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
      0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
  // Gauss 7-point weights at xk[1], xk[3], xk[5], xk[7].
  static constexpr std::array<double, 4> wg = {
      0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
      0.381830050505118944950369775488975, 0.417959183673469387755102040816327};
};

struct Interval {
  double a;
  double b;
  cplx value;
  double error;
  double l1;
  bool splittable;
};

template <class F>
Interval gk15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const cplx fc = f(center);
  cplx resk = fc * GK15::wk[7];
  cplx resg = fc * GK15::wg[3];
  double resabs = std::abs(fc) * GK15::wk[7];
  std::array<cplx, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * GK15::xk[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const cplx sum = f1[j] + f2[j];
    resk += sum * GK15::wk[j];
    resabs += (std::abs(f1[j]) + std::abs(f2[j])) * GK15::wk[j];
    if (j % 2 == 1) resg += sum * GK15::wg[j / 2];
  }
  const cplx mean = resk * 0.5;
  double resasc = GK15::wk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += GK15::wk[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  const double aw = std::abs(half);
  resasc *= aw;
  resabs *= aw;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(err, 50.0 * eps * resabs);
  }
  const double mid_gap = std::abs(half) * (1.0 - GK15::xk[0]);
  const bool splittable = mid_gap > 4.0 * eps * std::max(std::abs(a), std::abs(b)) && half != 0.0;
  return {a, b, resk * half, err, resabs, splittable};
}

}  // namespace detail

/// Integrate f over [a, b]. Breakpoints strictly inside (a, b) seed the
/// initial partition so that kinks and jumps are never straddled.
template <class F>
QuadResult integrate(F&& f, double a, double b, const QuadOptions& opt = {},
                     std::span<const double> breakpoints = {}) {
  QuadResult out;
  if (a == b) return out;
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::size_t evals = 0;
  auto counted = [&](double x) {
    ++evals;
    return cplx(f(x));
  };

  std::vector<detail::Interval> iv;
  iv.reserve(std::max<std::size_t>(64, cuts.size()));
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) iv.push_back(detail::gk15(counted, cuts[i], cuts[i + 1]));

  auto totals = [&](cplx& value, double& error, double& l1) {
    value = 0.0;
    error = 0.0;
    l1 = 0.0;
    for (const auto& s : iv) {
      value += s.value;
      error += s.error;
      l1 += s.l1;
    }
  };

  cplx value;
  double error = 0.0;
  double l1 = 0.0;
  totals(value, error, l1);
  constexpr double eps = std::numeric_limits<double>::epsilon();
  for (;;) {
    const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
    if (error <= tol || error <= 100.0 * eps * l1) break;
    // Largest splittable error; ties resolved by position.
    std::size_t worst = iv.size();
    for (std::size_t i = 0; i < iv.size(); ++i) {
      if (!iv[i].splittable) continue;
      if (worst == iv.size() || iv[i].error > iv[worst].error) worst = i;
    }
    if (worst == iv.size() || iv.size() >= opt.max_intervals) {
      char msg[256];
      std::snprintf(msg, sizeof msg,
                    "adaptive quadrature on [%.6g, %.6g] stopped at error %.3g > tolerance %.3g (value %.6g) "
                    "after %zu intervals",
                    a, b, error, tol, std::abs(value), iv.size());
      throw Error(ErrorCode::NonConverged, msg);
    }
    const detail::Interval parent = iv[worst];
    const double mid = 0.5 * (parent.a + parent.b);
    iv[worst] = detail::gk15(counted, parent.a, mid);
    iv.push_back(detail::gk15(counted, mid, parent.b));
    totals(value, error, l1);
  }
  std::sort(iv.begin(), iv.end(), [](const auto& x, const auto& y) { return x.a < y.a; });
  totals(value, error, l1);
  out.value = sign * value;
  out.error = error;
  out.evaluations = evals;
  return out;
}

/// Integral over [a, +inf) via x = a + t/(1-t).
template <class F>
QuadResult integrate_to_infinity(F&& f, double a, const QuadOptions& opt = {}) {
  auto mapped = [&](double t) -> cplx {
    const double one_minus = 1.0 - t;
    if (one_minus <= 0.0) return 0.0;
    const double x = a + t / one_minus;
    return cplx(f(x)) / (one_minus * one_minus);
  };
  return integrate(mapped, 0.0, 1.0, opt);
}

/// Fixed-order rules, (node, weight) pairs.
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule on [-1, 1].
const Rule& gauss_legendre(int n);
/// n-point Gauss-Hermite rule for weight exp(-x^2) on the real line.
const Rule& gauss_hermite(int n);

struct BallOptions {
  double rel_tol = 1e-6;
  double abs_tol = 0.0;
  std::vector<double> radial_breakpoints;
  std::size_t max_intervals = 2000;
};

/// Integral of f(k) d^3k over the ball |k| <= radius, spherical coordinates
/// around the origin with nested adaptive rules. Tolerances are relative to
/// the larger of |I| and a coarse estimate of int |f|, so truncation steps at
/// the 1e-12 level never force refinement of negligible local integrals.
template <class F>
QuadResult integrate_ball(F&& f, double radius, const BallOptions& opt = {}) {
  auto point = [&](double r, double u, double phi) {
    const double st = std::sqrt(std::max(0.0, 1.0 - u * u));
    return cplx(f(Vec3{r * st * std::cos(phi), r * st * std::sin(phi), r * u}));
  };
  // Coarse product rule for the L1 scale.
  double l1 = 0.0;
  {
    const Rule& gr = gauss_legendre(24);
    const Rule& ga = gauss_legendre(12);
    for (std::size_t i = 0; i < gr.nodes.size(); ++i) {
      const double r = 0.5 * radius * (gr.nodes[i] + 1.0);
      for (std::size_t j = 0; j < ga.nodes.size(); ++j) {
        for (std::size_t k = 0; k < ga.nodes.size(); ++k) {
          const double phi = M_PI * (ga.nodes[k] + 1.0);
          l1 += gr.weights[i] * ga.weights[j] * ga.weights[k] * r * r * std::abs(point(r, ga.nodes[j], phi));
        }
      }
    }
    l1 *= 0.5 * radius * M_PI;
  }
  const double floor = std::max(opt.rel_tol * l1, opt.abs_tol);
  QuadOptions outer{opt.rel_tol, floor / 3.0, opt.max_intervals};
  std::size_t evals = 0;
  auto radial = [&](double r) -> cplx {
    if (r == 0.0) return 0.0;
    const double budget = floor / (3.0 * radius * r * r);
    QuadOptions mid{opt.rel_tol / 3.0, budget, opt.max_intervals};
    QuadOptions inner{opt.rel_tol / 9.0, budget / 6.0, opt.max_intervals};
    auto polar = [&](double u) -> cplx {
      auto azimuth = [&](double phi) { return point(r, u, phi); };
      const QuadResult q = integrate(azimuth, 0.0, 2.0 * M_PI, inner);
      evals += q.evaluations;
      return q.value;
    };
    const QuadResult q = integrate(polar, -1.0, 1.0, mid);
    return q.value * (r * r);
  };
  QuadResult out = integrate(radial, 0.0, radius, outer, opt.radial_breakpoints);
  out.evaluations = evals + 24 * 12 * 12;
  out.error += std::max(std::abs(out.value), l1) * (opt.rel_tol / 3.0);
  return out;
}

}  // namespace yfstab
