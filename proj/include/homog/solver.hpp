#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homog/common.hpp"
#include "homog/geometry.hpp"
#include "homog/spectral.hpp"
#include "homog/torus.hpp"

namespace homog {

enum class SolveEngine { quadrature, spectral };

struct SolveOptions {
  SolveEngine engine{SolveEngine::quadrature};
  // quadrature: nodes per oscillation wavelength along the boundary
  double q_per_wavelength{12.0};
  // quadrature doubling self-test tolerance (relative)
  double rtol{1e-7};
  // spectral analysis guard tolerance
  double spectral_rtol{1e-9};
  int threads{0};
  // optional cap on the linear node density; 0 = automatic
  double max_linear_density{0};
};

// Values of a solution at interior probe points.
struct FieldProbe {
  std::vector<Vec> points;
  std::vector<double> dist;       // cached d(x)
  std::vector<Complex> values;
  double epsilon{0};              // 0 marks the homogenized problem
  // metadata
  SolveEngine engine{SolveEngine::quadrature};
  double linear_density{0};       // quadrature nodes per unit arclength
  int degree_cutoff{0};           // spectral L
  std::string kernel;             // "poisson" or "neumann"
};

// u(x) = int_Gamma P(x,y) g(y, y/eps) dsigma(y); eps = nullopt solves the
// homogenized problem with data gbar.
FieldProbe solve_dirichlet(const ConvexDomain& ball, const BoundaryData& data,
                           std::optional<double> eps, std::span<const Vec> probes,
                           const SolveOptions& opts = {});

// v(x) = int_Gamma N(x,y) g(y, y/eps) dsigma(y) on the unit 3-ball; the
// boundary-average normalization is built into the kernel (constants map
// to zero).
FieldProbe solve_neumann_v(const ConvexDomain& ball3, const BoundaryData& data,
                           std::optional<double> eps, std::span<const Vec> probes,
                           const SolveOptions& opts = {});

// Cartesian gradient values of the Neumann solution (spectral engine).
struct GradientProbe {
  std::vector<Vec> points;
  std::vector<std::array<Complex, 4>> gradients;
};
GradientProbe solve_neumann_gradient(const ConvexDomain& ball3, const BoundaryData& data,
                                     std::optional<double> eps,
                                     std::span<const Vec> probes,
                                     const SolveOptions& opts = {});

// Builds the aligned spectral field for a boundary-data trace; shared by the
// solver and the sweep driver.
HarmonicField analyze_boundary_field(const ConvexDomain& ball, const BoundaryData& data,
                                     std::optional<double> eps, HarmonicProblem problem,
                                     const SolveOptions& opts = {});

// Per-domain certified constants of the kernel-mass machinery:
//   c_mass: sup_x int |P(x,.)|, c_tail: sup delta/d(x) int_{|y-xi|>=delta} P.
struct KernelMassConstants {
  double c_mass{1.0};
  double c_tail{1.0};
};
KernelMassConstants certified_mass_constants(const ConvexDomain& ball);

struct ConcentrationReport {
  double delta{0};
  double c1{0}, c2{0};
  double lip_g_eps{0};
  double sup_g{0};
  struct Entry {
    Vec x;
    double dist;
    double lhs;    // |u_eps(x) - g_eps(xi)|
    double bound;  // C1 delta Lip(g_eps) + sup_g / 8
  };
  std::vector<Entry> entries;
  bool applicable{true};
  std::string note;
  bool pass(double slack = 1e-8) const;
};

// Checks the boundary-concentration estimate at points on the inward normal
// ray from xi at distances {C2 delta / 2, C2 delta / 4}.
ConcentrationReport boundary_concentration_check(const ConvexDomain& ball,
                                                 const BoundaryData& data, double eps,
                                                 const Vec& xi,
                                                 const SolveOptions& opts = {});

}  // namespace homog
