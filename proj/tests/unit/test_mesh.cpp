#include "doctest.h"

#include "shapecalc/mesh.hpp"
#include "shapecalc/quadrature_rules.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace shapecalc;
using namespace shapecalc::mesh;

namespace {

double mesh_area(const TriMesh& m) {
  double a = 0.0;
  for (int t = 0; t < m.num_triangles(); ++t)
    for (const auto& q : quad::triangle_rule()) a += q.weight * m.jacobian(t, q.xi, q.eta).determinant();
  return a;
}

geometry::DomainPtr half_wall_disk() {
  auto c = std::make_shared<geometry::Circle>(Vec2::Zero(), 1.0);
  return geometry::make_single_loop(c, {0.0, 0.5}, {geometry::BoundaryLabel::Inflow, geometry::BoundaryLabel::Wall});
}

}  // namespace

TEST_CASE("annulus mesh: structure, refinement and area") {
  auto d = geometry::make_annulus(1.0, 2.0);
  auto m0 = build_mesh(d, 0.25, 0);
  auto m1 = refine(*m0);
  CHECK_NOTHROW(m0->check());
  CHECK(m1->num_triangles() == 4 * m0->num_triangles());
  CHECK(m1->edges.size() == 2 * m0->edges.size());
  CHECK(m1->level == 1);
  CHECK(m1->cubic_offsets.size() == m1->edges.size());
  // Isoparametric P2 area error is O(h^4).
  const double exact = 3 * std::numbers::pi;
  const double e0 = std::abs(mesh_area(*m0) - exact), e1 = std::abs(mesh_area(*m1) - exact);
  CHECK(e0 < 1e-4);
  CHECK(e1 < e0 / 10);
  // Boundary nodes sit on their curves.
  for (int i = 0; i < m1->num_nodes(); ++i)
    if (m1->on_boundary(i)) {
      const auto& b = m1->boundary[static_cast<std::size_t>(i)];
      CHECK((m1->nodes[static_cast<std::size_t>(i)] - d->curve(b.loop).point(b.u)).norm() < 1e-12);
    }
}

TEST_CASE("wall quadrature integrates over the exact wall") {
  auto d = geometry::make_annulus(1.0, 2.0);
  auto m = build_mesh(d, 0.25, 1);
  auto q = wall_quadrature(*m);
  CHECK(q->total_weight() == doctest::Approx(4 * std::numbers::pi).epsilon(1e-12));
  for (const auto& p : q->points) {
    CHECK(p.loop == 0);
    CHECK(p.kappa == doctest::Approx(0.5));
    CHECK(p.x.norm() == doctest::Approx(2.0));
  }
  auto all = boundary_quadrature(*m);
  CHECK(all->total_weight() == doctest::Approx(6 * std::numbers::pi).epsilon(1e-12));
}

TEST_CASE("deformer: zero step is the identity, normal motion moves the wall") {
  auto d = geometry::make_annulus(1.0, 2.0);
  auto m = build_mesh(d, 0.25, 0);
  MeshDeformer def(m);
  auto V = geometry::make_deformation(d, geometry::uniform_mode(*d, 0));
  auto same = def.deform(V, 0.0);
  for (int i = 0; i < m->num_nodes(); ++i)
    CHECK((same->nodes[static_cast<std::size_t>(i)] - m->nodes[static_cast<std::size_t>(i)]).norm() == 0.0);
  auto grown = def.deform(V, 0.1);
  for (const auto& e : grown->edges)
    if (e.loop == 0) CHECK(grown->nodes[static_cast<std::size_t>(e.nodes[0])].norm() == doctest::Approx(2.1));
  CHECK(mesh_area(*grown) == doctest::Approx(std::numbers::pi * (2.1 * 2.1 - 1.0)).epsilon(1e-4));
  const auto tr = def.transform(def.extend(V), 0.1);
  CHECK(tr.admissible());
  CHECK_THROWS_AS(def.deform(V, -1.5), MeshError);
}

TEST_CASE("plain-text mesh round trip") {
  auto d = geometry::make_annulus(1.0, 2.0);
  auto m = build_mesh(d, 0.25, 1);
  std::stringstream ss;
  write_mesh(*m, ss);
  auto r = read_mesh(ss, d);
  CHECK(r->num_nodes() == m->num_nodes());
  CHECK(r->num_triangles() == m->num_triangles());
  CHECK(r->edges.size() == m->edges.size());
  CHECK(mesh_area(*r) == doctest::Approx(mesh_area(*m)).epsilon(1e-14));

  std::stringstream bad("shapecalc-mesh 7\n");
  CHECK_THROWS_AS(read_mesh(bad, d), MeshError);
}

TEST_CASE("gmsh import of a linear fan mesh") {
  auto d = half_wall_disk();
  std::ostringstream msh;
  msh << "$MeshFormat\n2.2 0 8\n$EndMeshFormat\n$Nodes\n9\n";
  for (int k = 0; k < 8; ++k) {
    const double a = k * std::numbers::pi / 4;
    msh << k + 1 << " " << std::cos(a) << " " << std::sin(a) << " 0\n";
  }
  msh << "9 0 0 0\n$EndNodes\n$Elements\n16\n";
  int id = 1;
  for (int k = 0; k < 8; ++k) msh << id++ << " 1 2 " << (k < 4 ? 1 : 2) << " 1 " << k + 1 << " " << (k + 1) % 8 + 1 << "\n";
  for (int k = 0; k < 8; ++k) msh << id++ << " 2 2 0 1 9 " << k + 1 << " " << (k + 1) % 8 + 1 << "\n";
  msh << "$EndElements\n";
  std::istringstream in(msh.str());
  auto m = read_gmsh(in, d);
  CHECK(m->num_triangles() == 8);
  CHECK(m->edges.size() == 8);
  int walls = 0;
  for (const auto& e : m->edges) walls += e.label == geometry::BoundaryLabel::Wall ? 1 : 0;
  CHECK(walls == 4);
  // Boundary midpoints were placed on the circle.
  for (const auto& e : m->edges) CHECK(m->nodes[static_cast<std::size_t>(e.nodes[2])].norm() == doctest::Approx(1.0));

  std::istringstream nofmt("$Nodes\n0\n$EndNodes\n");
  CHECK_THROWS_AS(read_gmsh(nofmt, d), MeshError);
}
