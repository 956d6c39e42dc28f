#pragma once

// Shared test oracles, independent of the implementation paths they check:
// dense-grid torus quadrature, brute-force boundary integrals, classical
// Bessel/Legendre identities.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "homog/common.hpp"
#include "homog/geometry.hpp"
#include "homog/torus.hpp"

namespace homog::testing {

// Trapezoidal mean of f over T^d on an n-per-axis grid (exact for
// trigonometric polynomials once n exceeds twice the band limit).
inline Complex torus_grid_mean(const TorusFunction& f, int n) {
  const int d = f.dim();
  Complex acc{0, 0};
  std::vector<int> idx(d, 0);
  const long total = static_cast<long>(std::pow(n, d));
  for (long t = 0; t < total; ++t) {
    long rem = t;
    Vec y(d);
    for (int c = 0; c < d; ++c) {
      y[c] = double(rem % n) / n;
      rem /= n;
    }
    acc += f.evaluate(y);
  }
  return acc / double(total);
}

// Dense trapezoid quadrature of x -> P(x,y) g_eps(y) over the unit circle.
inline Complex disk_boundary_integral_brute(
    const Vec& x, const std::function<Complex(const Vec&)>& boundary_fn, int n) {
  Complex acc{0, 0};
  for (int j = 0; j < n; ++j) {
    const double th = kTwoPi * j / n;
    const Vec y{std::cos(th), std::sin(th)};
    const double rho2 = (x - y).norm2();
    const double p = (1.0 - x.norm2()) / (kTwoPi * rho2);
    acc += p * boundary_fn(y);
  }
  return acc * (kTwoPi / n);
}

// Spherical-harmonic oracle for zonal plane-wave data on the unit sphere:
// e^{i k u} = sum_l (2l+1) i^l j_l(k) P_l(u)  (downward-recurrence Bessel).
inline std::vector<double> spherical_bessel_all(int lmax, double x) {
  std::vector<double> j(lmax + 1, 0.0);
  if (x == 0) {
    j[0] = 1.0;
    return j;
  }
  // Miller downward recurrence seeded past the turning point; normalized by
  // the sum rule sum_l (2l+1) j_l(x)^2 = 1, which never degenerates (the
  // j_0-based normalization fails whenever x is near a multiple of pi).
  const int start = std::max<int>(lmax, static_cast<int>(std::ceil(std::abs(x)))) +
                    32 + static_cast<int>(10 * std::cbrt(std::abs(x)));
  std::vector<double> tmp(start + 2, 0.0);
  tmp[start + 1] = 0.0;
  tmp[start] = 1.0;
  for (int l = start; l >= 1; --l) {
    tmp[l - 1] = (2.0 * l + 1.0) / x * tmp[l] - tmp[l + 1];
    if (std::abs(tmp[l - 1]) > 1e250) {
      for (int t = l - 1; t <= start + 1; ++t) tmp[t] *= 1e-250;
    }
  }
  double s = 0;
  for (int l = 0; l <= start; ++l) s += (2.0 * l + 1.0) * tmp[l] * tmp[l];
  double scale = 1.0 / std::sqrt(s);
  // the sum rule loses the overall sign; pin it with whichever of the two
  // closed forms is farther from its zero
  const double j0 = std::sin(x) / x;
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  const bool use0 = std::abs(j0) >= std::abs(j1);
  const double ref = use0 ? j0 : j1;
  const double got = (use0 ? tmp[0] : tmp[1]) * scale;
  if (ref * got < 0) scale = -scale;
  for (int l = 0; l <= lmax; ++l) j[l] = tmp[l] * scale;
  return j;
}

inline std::vector<double> legendre_all(int lmax, double u) {
  std::vector<double> p(lmax + 1);
  p[0] = 1;
  if (lmax >= 1) p[1] = u;
  for (int l = 2; l <= lmax; ++l)
    p[l] = ((2.0 * l - 1.0) * u * p[l - 1] - (l - 1.0) * p[l - 2]) / l;
  return p;
}

// Dirichlet solution of the unit ball with data e^{2 pi i y3 / eps} at a
// point with radius r and cos(colatitude) u, via the Rayleigh expansion.
inline Complex ball3_axis_wave_solution(double k, double r, double u, bool neumann) {
  const int lmax = static_cast<int>(k + 10 * std::cbrt(k + 1) + 40);
  const auto j = spherical_bessel_all(lmax, k);
  const auto p = legendre_all(lmax, u);
  Complex acc{0, 0};
  Complex il{1, 0};  // i^l
  double rl = 1;     // r^l
  for (int l = 0; l <= lmax; ++l) {
    if (l > 0) rl *= r;
    const double mult = neumann ? (l == 0 ? 0.0 : 1.0 / l) : 1.0;
    acc += (2.0 * l + 1.0) * il * j[l] * rl * p[l] * mult;
    il *= Complex{0, 1};
  }
  return acc;
}

}  // namespace homog::testing
