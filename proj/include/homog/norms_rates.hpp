#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "homog/common.hpp"
#include "homog/geometry.hpp"
#include "homog/solver.hpp"
#include "homog/torus.hpp"

namespace homog {

// Product volume mesh on a ball: radial shells (geometrically refined toward
// the boundary down to h_min <= eps/4) x angular grid. Angles live in the
// aligned frame used by the spectral engine; weights carry the full volume
// element, so sum(w) = |D|.
struct VolumeMesh {
  int dim{0};
  double radius{0};
  Vec center;
  RotMat align;
  std::vector<double> r, wr;      // radial nodes; weights include r^{d-1}
  std::vector<double> a1, wa1;    // d=2: theta; d=3: u = cos(theta)
  std::vector<double> a2, wa2;    // d=3: phi
  double h_min{0};
  int layer_shells{0};

  std::size_t size() const {
    return r.size() * a1.size() * std::max<std::size_t>(1, a2.size());
  }
  double weight(std::size_t i, std::size_t j, std::size_t k) const {
    return wr[i] * wa1[j] * (wa2.empty() ? 1.0 : wa2[k]);
  }
  double weight_sum() const;
  Vec node(std::size_t i, std::size_t j, std::size_t k) const;  // physical point
};

struct MeshOptions {
  double tangential_per_wavelength{4.0};
  double hmin_factor{0.25};      // h_min = hmin_factor * eps
  double radial_ratio{0.7};      // geometric refinement toward the boundary
  double layer_depth_frac{0.5};  // layer region depth as a fraction of R
  double shell_cap_frac{0.05};   // max shell thickness as a fraction of R
  int bulk_nodes{16};
  int per_shell_nodes{2};
  int min_angular{64};
  int azimuthal_nodes{0};        // d=3; 0 = automatic from the data
  double refine{1.0};            // uniform refinement multiplier (guards)
};

// eps = 0 builds an oscillation-free mesh (homogenized problems).
VolumeMesh build_volume_mesh(const ConvexDomain& ball, double eps, double data_band,
                             const MeshOptions& opts = {},
                             std::optional<RotMat> align = std::nullopt);

// (sum_cells w |f|^p)^{1/p}
double lp_norm(const VolumeMesh& mesh, std::span<const Complex> values, double p);

enum class ProblemKind { dirichlet, neumann, neumann_grad };
enum class FitModel { pure_power, power_log };

struct SweepEntry {
  double eps{0};
  double p{0};
  double norm{0};
  bool ok{true};
  std::string error;
  // metadata
  int dim{0};
  double resolution{0};    // spectral degree cutoff or quadrature density
  std::size_t mesh_nodes{0};
  double mesh_guard_rel{0};   // relative change under mesh refinement
  double dual_path_err{0};    // max |spectral - quadrature| over check probes
  double wallclock_ms{0};
};

struct EpsSweep {
  std::string problem_tag;
  std::vector<SweepEntry> entries;

  std::vector<const SweepEntry*> ok_entries(double p) const;
};

struct RateFit {
  double slope{0};
  double intercept{0};
  double r2{0};
  FitModel model{FitModel::pure_power};
  int points{0};
};

RateFit fit_rate(const EpsSweep& sweep, double p, FitModel model, int min_points = 4);
// direct form used by asymptotics sweeps
RateFit fit_loglog(std::span<const double> x, std::span<const double> y, FitModel model,
                   int min_points = 4);

struct SweepOptions {
  SolveOptions solve;
  MeshOptions mesh;
  bool mesh_guard{true};
  double mesh_guard_tol{0.02};
  bool dual_path_check{true};
  double dual_path_tol{1e-6};
  int dual_path_probes{12};
  int threads{0};
};

struct SweepProblem {
  ProblemKind kind{ProblemKind::dirichlet};
  ConvexDomain domain;
  BoundaryData data;
  std::string tag;
};

// One norm per (eps, p); failures are recorded per entry, not dropped.
EpsSweep run_sweep(const SweepProblem& problem, std::span<const double> p_list,
                   std::span<const double> eps_list, const SweepOptions& opts = {});

struct OptimalityReport {
  bool applicable{true};
  std::string note;
  double sup_g_minus_mean{0};
  std::vector<double> ratios;  // r(eps) = norm / (eps^{1/p} sup|g - gbar|)
  double min_ratio{0}, max_ratio{0};
  bool pass(double threshold = 0.5) const {
    return !applicable || (max_ratio > 0 && min_ratio >= threshold * max_ratio);
  }
};

// Lower-bound stability check of r(eps) across a sweep.
OptimalityReport optimality_check(const EpsSweep& sweep, double p, const TorusFunction& g);

struct InterpolationReport {
  struct Entry {
    double eps, lhs, rhs;
  };
  std::vector<Entry> entries;
  double constant{0};  // (2 sup|g|)^{1 - 1/p}
  bool pass() const {
    for (const auto& e : entries)
      if (e.lhs > e.rhs * (1 + 1e-9)) return false;
    return !entries.empty();
  }
};

// ||u_eps - u_0||_p <= (2 sup|g|)^{1-1/p} ||u_eps - u_0||_1^{1/p}, verified on
// every eps shared by the p-sweep and the 1-sweep.
InterpolationReport interpolation_check(const EpsSweep& sweep, double p, double sup_g);

// CSV with columns eps,p,d,norm,slope_so_far,resolution,wallclock_ms
// (17 significant digits, deterministic ordering).
std::string sweep_csv(const EpsSweep& sweep);

}  // namespace homog
