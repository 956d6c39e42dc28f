#pragma once

#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "homog/common.hpp"
#include "homog/geometry.hpp"
#include "homog/norms_rates.hpp"
#include "homog/torus.hpp"

namespace homog {

// Periodic coefficient tensor A^{alpha beta}_{ij}(y): one torus function per
// entry, alpha,beta in [0,d), i,j in [0,N).
class PeriodicTensor {
 public:
  PeriodicTensor(int dim, int N);

  int dim() const { return dim_; }
  int ncomp() const { return n_; }

  TorusFunction& entry(int alpha, int beta, int i, int j);
  const TorusFunction& entry(int alpha, int beta, int i, int j) const;

  // constant identity tensor A = I (delta_{alpha beta} delta_{ij})
  static PeriodicTensor identity(int dim, int N);

  double evaluate_form(const Vec& y, std::span<const double> xi) const;  // A xi.xi
  // sampled ellipticity constants over a 16^d grid and random xi
  struct Ellipticity {
    double lower{0}, upper{0};
    bool elliptic(double margin = 1e-9) const { return lower > margin; }
  };
  Ellipticity sample_ellipticity(std::uint64_t seed = 7, int nxi = 100) const;

  double max_band() const;

  static PeriodicTensor from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

 private:
  int dim_, n_;
  std::vector<TorusFunction> entries_;  // [((alpha*d+beta)*N+i)*N+j]
};

struct DivergenceFreeReport {
  bool holds{false};
  double max_residual{0};  // max over (k,i,gamma,m) of 2 pi |sum_a m_a c_m(A^{ga}_{ki})|
};

// Row divergence in Fourier space: rows (A^{gamma 1}_{ki}, ..., A^{gamma d}_{ki})
// are divergence free iff sum_alpha m_alpha c_m(A^{gamma alpha}_{ki}) = 0 for
// every stored mode m.
DivergenceFreeReport check_divergence_free(const PeriodicTensor& A);

struct EffectiveTensor {
  int dim{0}, n{0};
  std::vector<double> ahat;              // [((alpha*d+beta)*N+i)*N+j]
  std::vector<TorusFunction> correctors; // chi^{gamma k}_j at [(gamma*N+k)*N+j]
  double weak_residual{0};
  double condition_estimate{0};

  double ahat_entry(int alpha, int beta, int i, int j) const;
  bool is_identity(double tol = 1e-8) const;
};

struct CellSolveOptions {
  int mode_margin{1};       // enlarge the stored set by this many bandwidths
  double residual_tol{1e-8};
  double condition_limit{1e12};
  int max_enlargements{2};
};

// Galerkin-spectral cell problem: periodic mean-zero chi^{gamma k} with
// div(A (grad chi + e_gamma e_k)) = 0, then Ahat from the averaged flux.
EffectiveTensor solve_cell(const PeriodicTensor& A, const CellSolveOptions& opts = {});

// h(y) = inverse of (Ahat^{alpha beta} n_alpha n_beta)_{N x N}.
std::vector<double> h_matrix(const EffectiveTensor& ahat, const Vec& n);

// omega_eps^{ij}(y) = h_{ik}(y) n_alpha n_beta A^{alpha beta}_{kj}(y/eps);
// requires the divergence-free row condition.
std::vector<Complex> omega_eps(const PeriodicTensor& A, const EffectiveTensor& ahat,
                               const ConvexDomain& domain, const Vec& y, double eps);

// Homogenized boundary data of the oscillating-operator problem (N = 1):
//   g*(y) = h(y) n_a n_b sum_m c_m(A^{ab}) c_{-m}(g; y).
BoundaryData g_star(const PeriodicTensor& A, const EffectiveTensor& ahat,
                    const ConvexDomain& domain, const BoundaryData& g);

// Exact finite-mode expansion of omega_eps(y) g(y, y/eps) as boundary data
// (N = 1); its zero-mode part equals g_star by construction.
BoundaryData omega_g_data(const PeriodicTensor& A, const EffectiveTensor& ahat,
                          const ConvexDomain& domain, const BoundaryData& g);

struct Theorem13Report {
  DivergenceFreeReport divfree;
  EffectiveTensor effective;
  EpsSweep sweep;
  RateFit fit_log;        // slope under the eps |ln eps| model
  RateFit fit_pure;
  double min_slope_required{0};
  bool pass{false};
};

// d=3 pipeline: v_eps = Dirichlet solution with data omega_eps g_eps,
// u_0 with data g*; sweeps ||v_eps - u_0||_{L^p} and fits the rate.
Theorem13Report verify_theorem13_pipeline(const PeriodicTensor& A,
                                          const BoundaryData& g,
                                          const ConvexDomain& domain, double p,
                                          std::span<const double> eps_list,
                                          const SweepOptions& opts = {});

}  // namespace homog
