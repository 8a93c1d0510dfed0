#pragma once

#include "shapecalc/space.hpp"

#include <Eigen/SparseCore>

#include <functional>

namespace shapecalc::assembly {

using SpMat = Eigen::SparseMatrix<double>;

/// Edge weight callback: (boundary edge index, local coordinate in [0,1]).
using EdgeWeight = std::function<double(int edge, double xi)>;

SpMat stiffness(const fem::Space& V);
SpMat mass(const fem::Space& V);
/// Boundary mass over edges accepted by `use_edge`, optionally weighted.
SpMat boundary_mass(const fem::Space& V, const std::function<bool(const mesh::BoundaryEdge&)>& use_edge,
                    const EdgeWeight& weight = nullptr);

/// Gradient of a finite element field in physical coordinates at (xi, eta).
Vec2 gradient(const fem::Space& V, int t, const Eigen::VectorXd& u, double xi, double eta);

}  // namespace shapecalc::assembly
