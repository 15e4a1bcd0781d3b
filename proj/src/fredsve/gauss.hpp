#pragma once

#include <vector>

namespace fredsve::quad {

struct GaussRule {
  std::vector<double> nodes;   // on (-1,1), ascending
  std::vector<double> weights; // positive, sum to 2
};

// Gauss-Legendre rule with n nodes (exact for polynomials of degree 2n-1).
// Results are cached per n.
const GaussRule& gauss_legendre(int n);

}  // namespace fredsve::quad
