#pragma once

#include <array>
#include <vector>

namespace shapecalc::quad {

struct Rule1D {
  std::vector<double> points;   // on [0, 1]
  std::vector<double> weights;  // sum to 1
};

/// Gauss-Legendre rule with n points mapped to [0, 1].
const Rule1D& gauss_legendre(int n);

struct TrianglePoint {
  double xi;
  double eta;
  double weight;  // weights sum to 1/2 (area of the reference triangle)
};

/// Symmetric 12-point rule, exact for polynomials of degree 6.
const std::array<TrianglePoint, 12>& triangle_rule();

}  // namespace shapecalc::quad
