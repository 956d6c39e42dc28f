#pragma once

#include <span>

#include "homog/norms_rates.hpp"

namespace homog {

struct NeumannSweepReport {
  EpsSweep sweep;
  RateFit fit;
  double min_slope_required{0};
  bool pass{false};
};

// ||v_eps - v_0||_{L^p(D)} sweep on the unit 3-ball; asserts slope >= 1/p - 0.1.
NeumannSweepReport neumann_sweep(const ConvexDomain& ball3, const BoundaryData& data,
                                 double p, std::span<const double> eps_list,
                                 const SweepOptions& opts = {});

// ||grad(v_eps - v_0)||_{L^p(D)} sweep; asserts slope >= kappa, kappa in (0, 1/p).
NeumannSweepReport neumann_gradient_sweep(const ConvexDomain& ball3,
                                          const BoundaryData& data, double p,
                                          std::span<const double> eps_list,
                                          double kappa,
                                          const SweepOptions& opts = {});

struct FepsDecayReport {
  std::vector<double> eps;
  std::vector<double> deviation;  // |F_eps - F_0|
  RateFit fit;
  double min_slope_required{0};
  bool pass{false};
};

// Example-5 compatibility data: F_eps = |D|^{-1} int_Gamma g_eps; decay of
// |F_eps - F_0| at rate (d-1)/2.
FepsDecayReport f_eps_decay(const ConvexDomain& domain, const BoundaryData& data,
                            std::span<const double> eps_list);

}  // namespace homog
