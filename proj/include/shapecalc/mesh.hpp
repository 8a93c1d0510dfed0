#pragma once

#include "shapecalc/geometry.hpp"

#include <array>
#include <cmath>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace shapecalc::mesh {

using geometry::BoundaryLabel;

class MeshError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reference-curve location of a boundary node; loop < 0 for interior nodes.
struct BoundaryNode {
  int loop = -1;
  double u = 0.0;
};

/// A boundary edge, oriented in the direction of travel of its loop.
struct BoundaryEdge {
  int tri = -1;
  int local = -1;            // local edge: 0 = (0,1), 1 = (1,2), 2 = (2,0)
  std::array<int, 3> nodes;  // start, end, midpoint
  int loop = -1;
  int arc = -1;
  double u0 = 0.0;  // start parameter
  double u1 = 0.0;  // end parameter, u1 > u0 (may exceed the period)
  BoundaryLabel label = BoundaryLabel::Wall;
};

/// Isoparametric P2 triangle mesh. Nodes 0..num_vertices-1 are triangle
/// corners, the rest are edge midpoints. Local node order per triangle:
/// v0, v1, v2, m01, m12, m20.
struct TriMesh {
  geometry::DomainPtr domain;
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 6>> tris;
  std::vector<BoundaryNode> boundary;  // one entry per node
  std::vector<BoundaryEdge> edges;     // boundary edges grouped by loop, in travel order
  /// Per boundary edge: curve point minus quadratic edge point at fractions
  /// 1/3 and 2/3. Cubic spaces add these to their edge nodes.
  std::vector<std::array<Vec2, 2>> cubic_offsets;
  int num_vertices = 0;
  int level = 0;
  double h = 0.0;

  int num_nodes() const { return static_cast<int>(nodes.size()); }
  int num_triangles() const { return static_cast<int>(tris.size()); }
  bool on_boundary(int node) const { return boundary[static_cast<std::size_t>(node)].loop >= 0; }

  /// Element map and its Jacobian at reference point (xi, eta).
  Vec2 map(int t, double xi, double eta) const;
  Mat2 jacobian(int t, double xi, double eta) const;
  /// Straight-sided signed area of the corner triangle.
  double corner_area(int t) const;
  /// Smallest Jacobian determinant over corners and interior quadrature points.
  double min_jacobian(int t) const;

  double max_edge_length() const;
  double min_edge_length() const;

  /// Throws MeshError describing the first violated structural invariant.
  void check() const;
};

using TriMeshPtr = std::shared_ptr<const TriMesh>;

/// Constrained Delaunay mesh of the domain with target edge length h.
TriMeshPtr generate_mesh(const geometry::DomainPtr& domain, double h);
/// Uniform red refinement; boundary midpoints are placed on the curves.
TriMeshPtr refine(const TriMesh& mesh);
/// generate_mesh(h0) refined `level` times.
TriMeshPtr build_mesh(const geometry::DomainPtr& domain, double h0, int level);

/// Quadrature point on the reference wall, tagged by (edge, xi) so that
/// values on deformed meshes sharing the topology are pulled back exactly.
struct WallPoint {
  int edge = -1;
  double xi = 0.0;
  int loop = -1;
  int arc = -1;
  double u = 0.0;
  double s = 0.0;  // loop arclength
  double weight = 0.0;
  Vec2 x, n, tau;
  double kappa = 0.0;
};

struct WallQuadrature {
  std::vector<WallPoint> points;
  int order = 0;
  std::size_t size() const { return points.size(); }
  double total_weight() const;
};

using WallQuadraturePtr = std::shared_ptr<const WallQuadrature>;

/// Gauss rule with `order` points (2..6) on every wall edge, using exact
/// curve measure, normals and curvature.
WallQuadraturePtr wall_quadrature(const TriMesh& mesh, int order = 4);
/// Same rule on every boundary edge, inflow included.
WallQuadraturePtr boundary_quadrature(const TriMesh& mesh, int order = 4);

/// Admissibility summary for x -> x + t * theta(x) on a mesh.
struct DomainTransform {
  double t = 0.0;
  double sup_theta = 0.0;
  double sup_dtheta = 0.0;
  double t_max = 0.0;  // largest t keeping every Jacobian determinant positive
  bool admissible() const { return std::abs(t) * (sup_theta + sup_dtheta) < 0.5 && std::abs(t) < t_max; }
};

/// Extends boundary displacements harmonically into the interior. The
/// factorization is built once per reference mesh.
class MeshDeformer {
 public:
  explicit MeshDeformer(TriMeshPtr reference);
  ~MeshDeformer();
  MeshDeformer(const MeshDeformer&) = delete;
  MeshDeformer& operator=(const MeshDeformer&) = delete;

  /// Displacement field theta (per node) induced by the deformation direction.
  std::vector<Vec2> extend(const geometry::DeformationField& field) const;
  DomainTransform transform(const std::vector<Vec2>& theta, double t) const;
  /// Deformed mesh with nodes x + t*theta(x); throws on inverted elements.
  TriMeshPtr deform(const geometry::DeformationField& field, double t) const;
  TriMeshPtr deform(const std::vector<Vec2>& theta, double t) const;

  const TriMeshPtr& reference() const { return ref_; }

 private:
  struct Impl;
  TriMeshPtr ref_;
  std::unique_ptr<Impl> impl_;
};

// I/O --------------------------------------------------------------------

void write_mesh(const TriMesh& mesh, std::ostream& out);
/// Reads the plain-text format produced by write_mesh.
TriMeshPtr read_mesh(std::istream& in, const geometry::DomainPtr& domain);
/// Gmsh MSH 2.2 ASCII: element types 1, 2, 8, 9. Physical group 1 (or a
/// group named "inflow") is inflow, 2 (or "wall") is wall. Boundary nodes are
/// projected onto the domain curves.
TriMeshPtr read_gmsh(std::istream& in, const geometry::DomainPtr& domain);
void write_quadrature_csv(const WallQuadrature& q, std::ostream& out);

}  // namespace shapecalc::mesh
