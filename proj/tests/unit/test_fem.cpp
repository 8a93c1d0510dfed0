#include "doctest.h"

#include "shapecalc/fem.hpp"
#include "shapecalc/validation.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace shapecalc;

namespace {

geometry::DomainPtr star_domain() {
  auto c = std::make_shared<geometry::StarCurve>(Vec2::Zero(), 1.5,
                                                 std::vector<geometry::StarCurve::Mode>{{2, 0.15, 0.0}, {3, 0.0, 0.1}});
  using BL = geometry::BoundaryLabel;
  return geometry::make_single_loop(c, {0.0, 0.1, 0.5, 0.6}, {BL::Inflow, BL::Wall, BL::Inflow, BL::Wall});
}

// Max nodal error of the consistent flux for a harmonic polynomial-exponential.
double flux_error(const geometry::DomainPtr& d, int level, int degree) {
  auto U = [](const Vec2& p) { return p.x() * p.x() - p.y() * p.y() + 0.3 * std::exp(p.x()) * std::cos(p.y()); };
  auto G = [](const Vec2& p) {
    return Vec2(2 * p.x() + 0.3 * std::exp(p.x()) * std::cos(p.y()), -2 * p.y() - 0.3 * std::exp(p.x()) * std::sin(p.y()));
  };
  fem::Discretization disc(mesh::build_mesh(d, 0.25, level), degree);
  const auto& c = d->curve(0);
  const auto f = disc.solve_dirichlet(disc.boundary_values([&](int, double u) { return U(c.point(u)); }));
  const Eigen::VectorXd lam = disc.flux(f.values);
  double e = 0.0;
  for (std::size_t i = 0; i < disc.boundary_nodes().size(); ++i) {
    const double u = disc.space().tag(disc.boundary_nodes()[i]).u;
    e = std::max(e, std::abs(lam(static_cast<Eigen::Index>(i)) - G(c.point(u)).dot(c.normal(u))));
  }
  return e;
}

}  // namespace

TEST_CASE("space: dof counts and partition of unity") {
  auto m = mesh::build_mesh(geometry::make_annulus(1.0, 2.0), 0.25, 0);
  fem::Space p2(m, 2), p3(m, 3);
  CHECK(p2.num_dofs() == m->num_nodes());
  const int ne = m->num_nodes() - m->num_vertices;
  CHECK(p3.num_dofs() == m->num_vertices + 2 * ne + m->num_triangles());
  CHECK(p3.num_local() == 10);
  for (const auto& [xi, eta] : {std::pair{0.2, 0.3}, std::pair{0.6, 0.1}}) {
    CHECK(p3.shape(xi, eta).sum() == doctest::Approx(1.0));
    CHECK(p3.grad(xi, eta).colwise().sum().norm() < 1e-12);
  }
  CHECK(p3.edge_shape_derivative(0.4).sum() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS(fem::Space(m, 4));
}

TEST_CASE("Laplace on the annulus reproduces ln r / ln 2") {
  auto d = geometry::make_annulus(1.0, 2.0);
  geometry::BoundaryData g(d, {{geometry::BoundaryData::constant(1.0)}, {geometry::BoundaryData::constant(0.0)}});
  for (int degree : {2, 3}) {
    fem::Discretization disc(mesh::build_mesh(d, 0.25, 1), degree);
    const auto psi = fem::solve_laplace_dirichlet(disc, g);
    double err = 0.0;
    for (int i = 0; i < disc.num_dofs(); ++i)
      err = std::max(err, std::abs(psi.values(i) - std::log(disc.space().point(i).norm()) / std::log(2.0)));
    CHECK(err < (degree == 3 ? 1e-5 : 1e-4));
    CHECK(psi.residual < 1e-10);
    const auto q = mesh::wall_quadrature(disc.mesh());
    const auto dn = fem::boundary_normal_derivative(disc, psi, q);
    CHECK((dn.values.array() - 1.0 / (2 * std::log(2.0))).abs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("cubic geometry gives third-order wall flux on a curved non-symmetric boundary") {
  auto d = star_domain();
  const double e1 = flux_error(d, 1, 3), e2 = flux_error(d, 2, 3);
  CHECK(std::log2(e1 / e2) > 2.7);
  const double q1 = flux_error(d, 1, 2), q2 = flux_error(d, 2, 2);
  CHECK(std::log2(q1 / q2) > 1.6);
  CHECK(e2 < q2);
}

TEST_CASE("mixed biharmonic solve matches the radial oracle") {
  auto d = geometry::make_annulus(1.0, 2.0);
  fem::Discretization disc(mesh::build_mesh(d, 0.25, 1), 3);
  geometry::BoundaryData g(d, {{geometry::BoundaryData::constant(1.0)}, {geometry::BoundaryData::constant(0.0)}});
  const Eigen::VectorXd gb = disc.boundary_values(g);
  auto [psi, omega] = disc.solve_mixed(gb, Eigen::VectorXd::Zero(gb.size()));
  validation::RadialBiharmonic exact(1.0, 2.0, 0.0, 1.0, 0.0, 0.0);
  const auto q = mesh::wall_quadrature(disc.mesh());
  const auto w = disc.sample(disc.trace(omega.values), q, "omega");
  CHECK((w.values.array() - exact.omega(2.0)).abs().maxCoeff() < 2e-2 * std::abs(exact.omega(2.0)));
  CHECK(disc.mixed_rcond() > 0);
  CHECK_THROWS_AS(disc.solve_mixed(gb, Eigen::VectorXd::Zero(3)), fem::SolverError);
}

TEST_CASE("sparse LU solves a small system") {
  fem::SpMat A(3, 3);
  A.insert(0, 0) = 4;
  A.insert(0, 1) = 1;
  A.insert(1, 0) = 1;
  A.insert(1, 1) = 3;
  A.insert(2, 2) = 2;
  A.insert(2, 0) = 1;
  fem::SparseLU lu(A);
  const Eigen::Vector3d x(1.0, -2.0, 0.5);
  CHECK((lu.solve(A * x) - x).norm() < 1e-14);
  CHECK(lu.rcond() > 0.1);
}

TEST_CASE("wall profiles: arithmetic, norms and CSV") {
  auto d = geometry::make_annulus(1.0, 2.0);
  auto q = mesh::wall_quadrature(*mesh::build_mesh(d, 0.25, 0));
  auto one = fem::make_profile("one", q, [](const mesh::WallPoint&) { return 1.0; });
  auto x = fem::make_profile("x", q, [](const mesh::WallPoint& p) { return p.x.x(); });
  CHECK(fem::wall_norm(one) == doctest::Approx(std::sqrt(4 * std::numbers::pi)));
  CHECK(fem::wall_inner_product(one, x) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(fem::wall_inner_product(x, x) == doctest::Approx(4 * std::numbers::pi * 2).epsilon(1e-10));
  CHECK(fem::wall_norm((one * 2.0) - one - one) == 0.0);
  std::ostringstream csv;
  fem::write_profiles_csv({one, x}, csv);
  CHECK(csv.str().rfind("loop,", 0) == 0);
}
