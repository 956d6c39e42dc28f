#pragma once

#include <cstdint>
#include <vector>

#include "homog/common.hpp"
#include "homog/geometry.hpp"

namespace homog {

enum class KernelKind { poisson, neumann, neumann_grad };

// Closed-form boundary kernels for the Laplacian on a ball.
struct KernelFamily {
  KernelKind kind;
  ConvexDomain domain;
};

// Surface measure of the unit sphere S^{d-1}.
double unit_sphere_area(int d);

// Poisson kernel of the ball of radius R:
//   P(x, y) = (R^2 - |x-c|^2) / (omega_{d-1} R |x - y|^d).
// Positive, unit mass over the boundary for every interior x.
double poisson_eval(const ConvexDomain& ball, const Vec& x, const Vec& y);

// Interior Neumann function of the unit 3-ball restricted to boundary y,
// normalized so that u(x) = int N(x,y) g(y) dsigma solves Laplace u = 0,
// du/dn = g - mean(g), with u(0) = 0 (equivalently zero boundary average):
//   N(x, y) = (1/4pi) [ 2/|x-y| - 2 + ln( 2 / (1 - x.y + |x-y|) ) ].
double neumann_eval(const ConvexDomain& ball3, const Vec& x, const Vec& y);
Vec neumann_grad_x(const ConvexDomain& ball3, const Vec& x, const Vec& y);

struct PoissonBoundReport {
  // empirical sup of P |x-y|^d / d(x), full sample and first half
  double c0_full{0}, c0_half{0};
  // sup of |d^alpha P| |x-y|^{d-1+|alpha|} for |alpha| = 1, 2 (arclength
  // derivatives along the boundary parametrization)
  double c1_full{0}, c1_half{0};
  double c2_full{0}, c2_half{0};
  std::size_t samples{0};
  bool stable(double factor = 1.1) const;
};

// Samples interior x (biased toward the boundary) and boundary y, evaluating
// the kernel-bound ratios of the closed form. Derivatives are analytic.
PoissonBoundReport certify_poisson_bounds(const ConvexDomain& ball,
                                          std::size_t sample_size,
                                          std::uint64_t seed = 1);

struct PoissonMassEntry {
  Vec x;
  double dist;
  double integral;
  double deviation;  // |integral - 1|
};
struct PoissonMassReport {
  std::vector<PoissonMassEntry> entries;
  double max_deviation{0};
  double resolution{0};
  bool pass(double tol = 1e-6) const { return max_deviation <= tol; }
};

// Integrates |P(x, .)| over the boundary at the given quadrature resolution
// for a radial grid of interior points whose distance goes down to
// 10 x (node spacing). Throws QuadratureUnderResolved when the unit-mass
// identity is violated by more than 1%.
PoissonMassReport certify_poisson_mass(const ConvexDomain& ball, double resolution,
                                       std::vector<double> distances = {});

struct NeumannBoundReport {
  double c0_full{0}, c0_half{0};  // sup |N| |x-y|^{d-2}
  double harmonicity_residual{0}; // max FD Laplacian over samples
  std::size_t samples{0};
  bool stable(double factor = 1.1) const;
};

NeumannBoundReport certify_neumann_bounds(const ConvexDomain& ball3,
                                          std::size_t sample_size,
                                          std::uint64_t seed = 1);

}  // namespace homog
