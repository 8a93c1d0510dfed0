#include "doctest.h"

#include "shapecalc/validation.hpp"

#include <cmath>

using namespace shapecalc;

namespace {

ops::FlowCase annulus_case(ops::FlowKind kind, int level) {
  auto d = geometry::make_annulus(1.0, 2.0);
  geometry::BoundaryData g(d, {{geometry::BoundaryData::constant(1.0)}, {geometry::BoundaryData::constant(0.0)}});
  auto m = mesh::build_mesh(d, 0.25, level);
  return {kind, g, std::make_shared<fem::Discretization>(m), mesh::wall_quadrature(*m)};
}

double max_dev(const fem::WallProfile& p, double v) { return (p.values.array() - v).abs().maxCoeff(); }

}  // namespace

TEST_CASE("flow kind names") {
  CHECK(ops::parse_flow_kind("stokes") == ops::FlowKind::Stokes);
  CHECK(ops::to_string(ops::FlowKind::Potential) == "potential");
  CHECK_THROWS_AS(ops::parse_flow_kind("euler"), std::invalid_argument);
}

TEST_CASE("S and dS on the annulus against the radial oracles") {
  for (auto kind : {ops::FlowKind::Potential, ops::FlowKind::Stokes}) {
    const auto c = annulus_case(kind, 1);
    const auto o = validation::radial_oracles(kind, 1.0, 2.0, 0.0, 1.0);
    ops::Linearization lin(c);
    CHECK(max_dev(lin.base().S, o.S) < 2e-2 * std::abs(o.S));
    const auto V = geometry::make_deformation(c.g.domain(), geometry::uniform_mode(*c.g.domain(), 0));
    const auto dS = lin.apply(V);
    CHECK(max_dev(dS, o.dS) < 5e-2 * std::abs(o.dS));
    CHECK_THROWS_AS(kind == ops::FlowKind::Potential ? ops::eval_dSs(lin, V) : ops::eval_dSp(lin, V),
                    std::invalid_argument);
  }
}

TEST_CASE("dS is linear and vanishes for the zero field") {
  const auto c = annulus_case(ops::FlowKind::Potential, 0);
  const auto& d = c.g.domain();
  ops::Linearization lin(c);
  const auto V1 = geometry::make_deformation(d, geometry::fourier_mode(*d, 0, 2, false), 0.3);
  const auto V2 = geometry::make_deformation(d, geometry::bump_mode(*d, 0, 3.0, 2.0), 0.5);
  const auto lhs = lin.apply(V1 + 2.0 * V2);
  const auto rhs = lin.apply(V1) + lin.apply(V2) * 2.0;
  CHECK(fem::wall_norm(lhs - rhs) < 1e-12 * fem::wall_norm(lhs));
  CHECK(fem::wall_norm(lin.apply(geometry::zero_deformation(d))) == 0.0);
}

TEST_CASE("dS agrees with a central difference of S") {
  for (auto kind : {ops::FlowKind::Potential, ops::FlowKind::Stokes}) {
    const auto c = annulus_case(kind, 1);
    const auto& d = c.g.domain();
    ops::Linearization lin(c);
    mesh::MeshDeformer def(c.disc->mesh_ptr());
    const auto V = geometry::make_deformation(d, geometry::bump_mode(*d, 0, 3.0, 2.0), 0.5);
    const auto dS = lin.apply(V);
    const auto fd = validation::fd_oracle(c, def, V, 1e-3);
    CHECK(fem::wall_norm(fd - dS) < 2e-2 * fem::wall_norm(dS));
  }
}

TEST_CASE("the curvature term is what the Taylor remainder needs") {
  const auto c = annulus_case(ops::FlowKind::Potential, 2);
  const auto& d = c.g.domain();
  mesh::MeshDeformer def(c.disc->mesh_ptr());
  const auto V = geometry::make_deformation(d, geometry::uniform_mode(*d, 0));
  ops::Linearization with(c);
  ops::Linearization without(c, ops::LinearizeOptions{false});
  CHECK(validation::taylor_test(with, def, V).slope > 1.8);
  CHECK(validation::taylor_test(without, def, V).slope < 1.3);
}
