#pragma once

#include <utility>
#include <vector>

namespace homog {

// Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration on P_n.
// Deterministic; accurate to ~1e-15 for n up to several thousand.
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

GaussRule gauss_legendre(int n);

// Affine image of the rule on [a, b].
GaussRule gauss_legendre(int n, double a, double b);

}  // namespace homog
