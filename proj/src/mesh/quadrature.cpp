#include "shapecalc/mesh.hpp"
#include "shapecalc/quadrature_rules.hpp"

namespace shapecalc::mesh {

double WallQuadrature::total_weight() const {
  double s = 0.0;
  for (const auto& p : points) s += p.weight;
  return s;
}

namespace {

WallQuadraturePtr edge_quadrature(const TriMesh& mesh, int order, bool wall_only) {
  if (order < 2 || order > 6) throw MeshError("wall quadrature order must be in 2..6");
  const auto& gl = quad::gauss_legendre(order);
  auto q = std::make_shared<WallQuadrature>();
  q->order = order;
  for (int ei = 0; ei < static_cast<int>(mesh.edges.size()); ++ei) {
    const auto& e = mesh.edges[static_cast<std::size_t>(ei)];
    if (wall_only && e.label != BoundaryLabel::Wall) continue;
    const auto& c = mesh.domain->curve(e.loop);
    const double du = e.u1 - e.u0;
    for (std::size_t k = 0; k < gl.points.size(); ++k) {
      WallPoint p;
      p.edge = ei;
      p.xi = gl.points[k];
      p.loop = e.loop;
      p.arc = e.arc;
      p.u = c.wrap(e.u0 + p.xi * du);
      p.s = c.arclength(p.u);
      p.weight = gl.weights[k] * du * c.speed(p.u);
      p.x = c.point(p.u);
      p.n = c.normal(p.u);
      p.tau = Vec2(-p.n.y(), p.n.x());
      p.kappa = c.curvature(p.u);
      q->points.push_back(p);
    }
  }
  return q;
}

}  // namespace

WallQuadraturePtr wall_quadrature(const TriMesh& mesh, int order) { return edge_quadrature(mesh, order, true); }

WallQuadraturePtr boundary_quadrature(const TriMesh& mesh, int order) { return edge_quadrature(mesh, order, false); }

}  // namespace shapecalc::mesh
