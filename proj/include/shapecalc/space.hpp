#pragma once

#include "shapecalc/mesh.hpp"

#include <Eigen/Core>

#include <memory>
#include <vector>

namespace shapecalc::fem {

/// Continuous Lagrange space of degree 2 or 3, isoparametric in its own
/// degree. For degree 2 the degrees of freedom coincide with the mesh nodes;
/// for degree 3 boundary edge nodes are shifted by the mesh cubic offsets. Local ordering: vertices, then the interior nodes of edges
/// (0,1), (1,2), (2,0) in traversal order, then interior nodes.
class Space {
 public:
  Space(mesh::TriMeshPtr mesh, int degree);

  const mesh::TriMesh& mesh() const { return *mesh_; }
  const mesh::TriMeshPtr& mesh_ptr() const { return mesh_; }
  int degree() const { return k_; }
  int num_dofs() const { return static_cast<int>(points_.size()); }
  int num_local() const { return nloc_; }

  /// Global dofs of triangle t (num_local() entries).
  const int* element_dofs(int t) const { return &elem_[static_cast<std::size_t>(t * nloc_)]; }
  /// Dofs along boundary edge e in parameter order (degree + 1 entries).
  const int* edge_dofs(int e) const { return &edge_[static_cast<std::size_t>(e * (k_ + 1))]; }

  const Vec2& point(int dof) const { return points_[static_cast<std::size_t>(dof)]; }
  const mesh::BoundaryNode& tag(int dof) const { return tags_[static_cast<std::size_t>(dof)]; }
  bool on_boundary(int dof) const { return tags_[static_cast<std::size_t>(dof)].loop >= 0; }

  /// Reference basis values and (xi, eta) derivatives.
  Eigen::VectorXd shape(double xi, double eta) const;
  Eigen::MatrixXd grad(double xi, double eta) const;
  /// 1D basis on an edge at fraction s, equispaced nodes 0, 1/k, ..., 1.
  Eigen::VectorXd edge_shape(double s) const;
  Eigen::VectorXd edge_shape_derivative(double s) const;

  /// Element geometry. `G` is grad(xi, eta) at the point of interest.
  Vec2 map(int t, double xi, double eta) const;
  Mat2 jacobian(int t, const Eigen::MatrixXd& G) const;
  Mat2 jacobian(int t, double xi, double eta) const { return jacobian(t, grad(xi, eta)); }
  /// d x / d s along boundary edge e at fraction s.
  Vec2 edge_derivative(int e, double s) const;

 private:
  mesh::TriMeshPtr mesh_;
  int k_;
  int nloc_;
  std::vector<int> elem_;
  std::vector<int> edge_;
  std::vector<Vec2> points_;
  std::vector<mesh::BoundaryNode> tags_;
  Eigen::MatrixXd coeff_;  // monomial coefficients of the reference basis
  std::vector<std::pair<int, int>> powers_;
};

using SpacePtr = std::shared_ptr<const Space>;

}  // namespace shapecalc::fem
