#pragma once

#include <array>
#include <optional>
#include <vector>

#include "homog/common.hpp"

namespace homog {

// Small dense rotation, used to align quadrature/mesh poles with the
// oscillation axis of boundary data on balls.
struct RotMat {
  int dim{0};
  std::array<std::array<double, 4>, 4> r{};

  static RotMat identity(int dim);
  // Orthogonal map taking the unit vector a to the pole axis e_{dim-1}.
  static RotMat pole_alignment(const Vec& a);
  Vec apply(const Vec& v) const;            // R v
  Vec apply_transposed(const Vec& v) const; // R^T v
  bool is_identity(double tol = 1e-15) const;
};

enum class DomainKind { ball, ellipsoid };

// Uniformly convex reference domain: ball or axis-aligned ellipsoid,
// d in {2,3,4}. All principal curvatures are bounded away from zero as long
// as every semi-axis is positive and finite.
class ConvexDomain {
 public:
  static ConvexDomain ball(int dim, double radius, std::optional<Vec> center = {});
  static ConvexDomain ellipsoid(int dim, std::vector<double> semi_axes,
                                std::optional<Vec> center = {});

  int dim() const { return dim_; }
  DomainKind kind() const { return kind_; }
  bool is_ball() const { return kind_ == DomainKind::ball; }
  double radius() const { return axes_[0]; }
  const std::vector<double>& semi_axes() const { return axes_; }
  const Vec& center() const { return center_; }

  // Implicit surface function sum_i ((y-c)_i / a_i)^2 - 1.
  double implicit(const Vec& y) const;

  Vec normal(const Vec& y) const;                 // throws PointNotOnBoundary
  double distance_to_boundary(const Vec& x) const;// throws PointNotInterior
  bool contains(const Vec& x) const;              // closure
  bool strictly_inside(const Vec& x) const;

  double volume() const;
  double surface_measure() const;  // closed form for ball, quadrature otherwise
  double inradius() const { return *std::min_element(axes_.begin(), axes_.end()); }

  // Parametrization of the boundary by angles (d-1 of them) and its partials;
  // used by quadrature construction and kernel-derivative certificates.
  Vec boundary_point(const std::array<double, 3>& angles) const;

 private:
  ConvexDomain(int dim, DomainKind kind, std::vector<double> axes, Vec center);
  int dim_;
  DomainKind kind_;
  std::vector<double> axes_;
  Vec center_;
};

// Quadrature over the boundary surface. d=2 uses equispaced trapezoid in the
// parameter; d=3 Gauss-Legendre in cos(theta) x trapezoid in phi; d=4 product
// over hyperspherical angles. Node counts can be anisotropic to resolve
// oscillation along a chosen pole axis only.
struct SurfaceQuadrature {
  std::vector<Vec> nodes;
  std::vector<double> weights;
  std::vector<Vec> normals;
  int order{0};
  // nodes per unit arclength (d=2) or per unit area (d>=3)
  double resolution{0};
  std::array<int, 3> angular_counts{};

  double weight_sum() const;
};

SurfaceQuadrature build_quadrature(const ConvexDomain& domain, double resolution);

// Anisotropic form: counts per angular direction (theta[,theta2],phi).
// `align` rotates the grid pole (balls only).
SurfaceQuadrature build_quadrature_counts(const ConvexDomain& domain,
                                          const std::array<int, 3>& counts,
                                          const RotMat* align = nullptr);

// Euclidean ball inside the unit torus (radius <= 1/2, so it does not wrap
// onto itself).
struct TorusBall {
  Vec center;
  double radius{0};
  double measure() const;
};

struct EquidistributionResult {
  double smoothed;        // mollified-indicator fraction
  double hard;            // sharp-indicator fraction
  double target;          // mu(A)
  double smoothing_width; // delta_s used
  std::size_t node_count;
};

// Fraction of surface measure of { y in Gamma : lambda*y mod 1 in A },
// by quadrature at the given resolution with indicator smoothing width
// resolution^{-1/2}.
EquidistributionResult equidistribution_fraction(const ConvexDomain& domain,
                                                 double lambda, const TorusBall& A,
                                                 double resolution);

}  // namespace homog
