#include "doctest.h"

#include "shapecalc/control.hpp"

#include <cmath>
#include <sstream>

using namespace shapecalc;

namespace {

ops::FlowCase annulus_case(ops::FlowKind kind, int level) {
  auto d = geometry::make_annulus(1.0, 2.0);
  geometry::BoundaryData g(d, {{geometry::BoundaryData::constant(1.0)}, {geometry::BoundaryData::constant(0.0)}});
  auto m = mesh::build_mesh(d, 0.25, level);
  return {kind, g, std::make_shared<fem::Discretization>(m), mesh::wall_quadrature(*m)};
}

}  // namespace

TEST_CASE("bases are nested and independent") {
  auto d = geometry::make_annulus(1.0, 2.0);
  auto q = mesh::wall_quadrature(*mesh::build_mesh(d, 0.25, 0));
  for (const std::string kind : {"fourier", "bump"}) {
    const auto b = control::make_basis(d, kind, 8);
    CHECK(b.size() == 8);
    CHECK(b.prefix(3).names == std::vector<std::string>(b.names.begin(), b.names.begin() + 3));
    CHECK(control::basis_independence(b, q) > 1e-3);
  }
  CHECK_THROWS(control::make_basis(d, "wavelet", 4));
}

TEST_CASE("fits: in-span exactness, monotone nested residuals, projection") {
  const auto c = annulus_case(ops::FlowKind::Potential, 1);
  const auto& d = c.g.domain();
  ops::Linearization lin(c);
  const auto basis = control::fourier_basis(d, 9);
  const auto sys = control::assemble_response(lin, basis, 2);
  CHECK(sys.size() == 9);
  CHECK((sys.G - sys.G.transpose()).norm() < 1e-12 * sys.G.norm());

  const auto target = sys.column(2) * 1.5 + sys.column(7) * -0.4;
  const auto fit = control::fit_target(sys, target, 0.0);
  CHECK(fit.residual < 1e-10);
  CHECK(fit.coefficients(2) == doctest::Approx(1.5).epsilon(1e-8));
  CHECK(fit.coefficients(7) == doctest::Approx(-0.4).epsilon(1e-8));

  const auto gauss = control::gaussian_target(*d, c.quad, 0, 2.0, 1.0);
  const auto rows = control::residual_study(sys, gauss, {1, 3, 5, 9}, {1e-8, 1e-4});
  CHECK(rows.size() == 8);
  CHECK(control::columns_monotone(rows));
  CHECK(rows.front().alpha == 1e-8);
  CHECK(rows.back().alpha == 1e-4);

  // Projecting out the target direction leaves nothing to fit.
  auto unit = gauss * (1.0 / fem::wall_norm(gauss));
  const auto pfit = control::fit_target_projected(sys, gauss, 1e-8, {unit});
  CHECK(fem::wall_norm(pfit.fitted) < 1e-8);

  std::ostringstream csv;
  control::write_study_csv(rows, csv);
  CHECK(csv.str().rfind("N,alpha,residual_raw,residual_projected", 0) == 0);
}

TEST_CASE("response assembly does not depend on the thread count") {
  const auto c = annulus_case(ops::FlowKind::Stokes, 0);
  ops::Linearization lin(c);
  const auto basis = control::bump_basis(c.g.domain(), 6);
  const auto a = control::assemble_response(lin, basis, 1);
  const auto b = control::assemble_response(lin, basis, 4);
  CHECK((a.R - b.R).norm() == 0.0);
}

TEST_CASE("kernel transfer resamples and orthonormalizes") {
  auto d = geometry::make_annulus(1.0, 2.0);
  auto q0 = mesh::wall_quadrature(*mesh::build_mesh(d, 0.25, 0));
  auto q2 = mesh::wall_quadrature(*mesh::build_mesh(d, 0.25, 2));
  auto a = fem::make_profile("a", q0, [](const mesh::WallPoint& p) { return std::cos(p.s / 2); });
  auto b = fem::make_profile("b", q0, [](const mesh::WallPoint& p) { return 2 * std::cos(p.s / 2); });
  auto c = fem::make_profile("c", q0, [](const mesh::WallPoint& p) { return std::sin(p.s / 2) + 0.1; });
  const auto k = control::transfer_kernel({a, b, c}, q2);
  REQUIRE(k.size() == 2);
  CHECK(fem::wall_norm(k[0]) == doctest::Approx(1.0));
  CHECK(std::abs(fem::wall_inner_product(k[0], k[1])) < 1e-12);
  CHECK(k[0].quad == q2);
}

TEST_CASE("targets") {
  auto d = geometry::make_annulus(1.0, 2.0);
  auto q = mesh::wall_quadrature(*mesh::build_mesh(d, 0.25, 0));
  const auto m = control::mode_target(*d, q, 0, 0);
  CHECK((m.values.array() - 1.0).abs().maxCoeff() < 1e-14);
  const auto g = control::gaussian_target(*d, q, 0, 2.0, 1.0);
  CHECK(g.values.maxCoeff() <= 1.0);
  CHECK(g.values.minCoeff() >= 0.0);
  CHECK_THROWS(control::gaussian_target(*d, q, 1, 2.0, 1.0));
}
