#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "homog/common.hpp"
#include "homog/geometry.hpp"

namespace homog {

// Separation-of-variables representation of the harmonic extension of
// boundary data on a disk (d=2, Fourier modes) or ball (d=3, spherical
// harmonics). Analysis is quadrature-based: trapezoid projection on the
// circle, Gauss-Legendre(cos theta) x trapezoid(phi) on the sphere.
//
// For d=3 the internal grid pole can be aligned with the oscillation axis of
// the data, which keeps the azimuthal order budget independent of 1/eps for
// axis-parallel mode sets.
enum class HarmonicProblem {
  dirichlet,  // radial multiplier (r/R)^l
  neumann,    // multiplier r^l / l, l >= 1; unit ball only
};

struct AnalysisOptions {
  // max |d(phase)/d(angle)| of the data along the surface, in radians per
  // radian (2 pi R |m| / eps for torus modes)
  double max_parametric_freq{0};
  int slow_band{0};       // angular band of slowly varying coefficients
  int azimuthal_band{0};  // d=3: |m_phi| budget of the data in the aligned frame
  double rtol{1e-9};      // analysis-doubling guard tolerance
  bool doubling_guard{true};
  int threads{0};
};

class HarmonicField {
 public:
  using BoundaryFn = std::function<Complex(const Vec&)>;  // physical points

  static HarmonicField analyze(const ConvexDomain& ball, const BoundaryFn& f,
                               const AnalysisOptions& opts,
                               HarmonicProblem problem = HarmonicProblem::dirichlet,
                               std::optional<RotMat> align = std::nullopt);

  int dim() const { return dim_; }
  int degree_cutoff() const { return L_; }
  int azimuthal_cutoff() const { return M_; }
  const RotMat& alignment() const { return align_; }
  const ConvexDomain& domain() const { return ball_; }

  Complex value(const Vec& x_phys) const;
  // Cartesian gradient at a physical interior point, r > 0 (d=3 only).
  std::array<Complex, 4> gradient(const Vec& x_phys) const;

  // Product-grid evaluation in the INTERNAL (aligned) frame. Radii are
  // physical. Output is flattened with the last angle fastest:
  //   d=2: idx = i_r * Nt + j          over (r_i, theta_j)
  //   d=3: idx = (i_r * Nu + j) * Np + k over (r_i, u_j = cos theta, phi_k)
  struct GridEval {
    std::vector<Complex> values;
    // physical Cartesian gradient components, same indexing, empty unless asked
    std::vector<std::array<Complex, 4>> gradients;
  };
  GridEval eval_grid(std::span<const double> radii, std::span<const double> ang1,
                     std::span<const double> ang2 = {}, bool want_gradient = false) const;

  double coeff_abs_sum() const;

 private:
  HarmonicField(ConvexDomain ball, HarmonicProblem problem, RotMat align)
      : ball_(std::move(ball)), problem_(problem), align_(align) {}

  double multiplier(int l) const;

  ConvexDomain ball_;
  HarmonicProblem problem_;
  RotMat align_;
  int dim_{0};
  int L_{0};
  int M_{0};
  // d=2: fourier_[n + L] for n in [-L, L]
  std::vector<Complex> fourier_;
  // d=3: sph_[m + M][l] for l in [|m|, L]
  std::vector<std::vector<Complex>> sph_;
};

// Normalized associated Legendre values Ptilde_l^m(u) for fixed m >= 0 and
// l = m..L (orthonormal spherical-harmonic convention, Condon-Shortley
// phase), plus sin(theta) * d/dtheta values. Exposed for tests.
void normalized_legendre_row(int m, int L, double u, std::span<double> p_out,
                             std::span<double> sdp_out = {});

}  // namespace homog
