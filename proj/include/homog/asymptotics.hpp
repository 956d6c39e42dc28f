#pragma once

#include <span>
#include <vector>

#include "homog/common.hpp"
#include "homog/geometry.hpp"
#include "homog/norms_rates.hpp"
#include "homog/torus.hpp"

namespace homog {

// sigma_hat(xi) = int_Gamma e^{-2 pi i xi.y} dsigma(y) by oscillation-resolved
// quadrature with a doubling self-test.
Complex surface_fourier(const ConvexDomain& domain, const Vec& xi,
                        double q_per_wavelength = 12.0, double rtol = 1e-7);

struct DecaySweep {
  std::vector<double> lambdas;   // octave anchors
  std::vector<double> envelope;  // per-octave max of |value|
  RateFit fit;                   // log(envelope) vs log(lambda)
};

// Envelope decay of |sigma_hat(lambda dir)| over dyadic lambda. Values inside
// an octave oscillate (Bessel zeros), so each octave contributes its max.
DecaySweep surface_fourier_decay(const ConvexDomain& domain, const Vec& dir,
                                 double lambda_min, double lambda_max,
                                 int samples_per_octave = 8);

// Two-pole stationary-phase asymptotic of the disk solution with boundary
// data e^{2 pi i y_2 / eps}:
//   u_eps(x) ~ sqrt(eps) [ e^{-i pi/4} P(x,n+) e^{2 pi i/eps}
//                        + e^{+i pi/4} P(x,n-) e^{-2 pi i/eps} ],
// n+- = (0,+-1), valid for |x| < 1/2.
Complex stationary_phase_2d(const Vec& x, double eps);

// F_eps = (1/|D|) int_Gamma g(y, y/eps) dsigma(y); eps = 0 gives F_0.
Complex oscillatory_boundary_average(const ConvexDomain& domain,
                                     const BoundaryData& data, double eps,
                                     double q_per_wavelength = 12.0);

struct WeylReport {
  std::vector<double> lambdas;
  std::vector<double> residuals;        // |a_lambda|
  std::vector<double> octave_lambdas;   // octave anchors
  std::vector<double> octave_envelope;  // per-octave max residual
  RateFit fit;                          // envelope decay
  bool octaves_monotone{true};          // envelope decreasing after 1st octave
};

// a_lambda = |Gamma|^{-1} int_Gamma g(lambda y) dsigma - int_{T^d} g.
WeylReport weyl_limit_check(const ConvexDomain& domain, const TorusFunction& g,
                            std::span<const double> lambdas,
                            double q_per_wavelength = 12.0);

}  // namespace homog
