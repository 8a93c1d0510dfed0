#pragma once

#include <Eigen/Core>

#include <array>

namespace shapecalc::p2 {

// Quadratic Lagrange basis on the reference triangle (0,0), (1,0), (0,1).
// Node order: v0, v1, v2, m01, m12, m20.

inline std::array<double, 6> shape(double xi, double eta) {
  const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  return {l0 * (2 * l0 - 1), l1 * (2 * l1 - 1), l2 * (2 * l2 - 1), 4 * l0 * l1, 4 * l1 * l2, 4 * l2 * l0};
}

/// Derivatives with respect to (xi, eta), one row per basis function.
inline Eigen::Matrix<double, 6, 2> grad(double xi, double eta) {
  const double l0 = 1.0 - xi - eta, l1 = xi, l2 = eta;
  Eigen::Matrix<double, 6, 2> g;
  g << -(4 * l0 - 1), -(4 * l0 - 1),
       4 * l1 - 1, 0.0,
       0.0, 4 * l2 - 1,
       4 * (l0 - l1), -4 * l1,
       4 * l2, 4 * l1,
       -4 * l2, 4 * (l0 - l2);
  return g;
}

/// Quadratic basis on [0,1] for an edge: start, end, midpoint.
inline std::array<double, 3> edge_shape(double s) {
  return {(1 - s) * (1 - 2 * s), s * (2 * s - 1), 4 * s * (1 - s)};
}

inline std::array<double, 3> edge_shape_ds(double s) { return {4 * s - 3, 4 * s - 1, 4 - 8 * s}; }

/// Reference coordinates of the point at fraction s along local edge e,
/// traversed in triangle order.
inline Eigen::Vector2d edge_point(int e, double s) {
  switch (e) {
    case 0: return {s, 0.0};
    case 1: return {1.0 - s, s};
    default: return {0.0, 1.0 - s};
  }
}

/// Local node indices (start, end, mid) of local edge e.
inline std::array<int, 3> edge_nodes(int e) {
  switch (e) {
    case 0: return {0, 1, 3};
    case 1: return {1, 2, 4};
    default: return {2, 0, 5};
  }
}

}  // namespace shapecalc::p2
