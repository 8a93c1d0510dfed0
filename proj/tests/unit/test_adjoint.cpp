#include "doctest.h"

#include "shapecalc/adjoint.hpp"

#include <cmath>

using namespace shapecalc;

namespace {

struct Case {
  geometry::DomainPtr domain;
  ops::FlowCase flow;
};

Case annulus(ops::FlowKind kind, int level) {
  auto d = geometry::make_annulus(1.0, 2.0);
  geometry::BoundaryData g(d, {{geometry::BoundaryData::constant(1.0)}, {geometry::BoundaryData::constant(0.0)}});
  auto m = mesh::build_mesh(d, 0.25, level);
  return {d, {kind, g, std::make_shared<fem::Discretization>(m), mesh::wall_quadrature(*m)}};
}

Case star(ops::FlowKind kind, int level) {
  auto c = std::make_shared<geometry::StarCurve>(Vec2::Zero(), 1.5,
                                                 std::vector<geometry::StarCurve::Mode>{{2, 0.15, 0.0}, {3, 0.0, 0.1}});
  using BL = geometry::BoundaryLabel;
  using BD = geometry::BoundaryData;
  auto d = geometry::make_single_loop(c, {0.0, 0.1, 0.5, 0.6}, {BL::Inflow, BL::Wall, BL::Inflow, BL::Wall});
  BD g(d, {{BD::ramp(0, 1), BD::constant(1), BD::ramp(1, 0), BD::constant(0)}});
  auto m = mesh::build_mesh(d, 0.25, level);
  return {d, {kind, g, std::make_shared<fem::Discretization>(m), mesh::wall_quadrature(*m)}};
}

}  // namespace

TEST_CASE("adjoint identities hold on a non-symmetric domain") {
  for (auto kind : {ops::FlowKind::Potential, ops::FlowKind::Stokes}) {
    const auto c = star(kind, 1);
    ops::Linearization lin(c.flow);
    const auto V = geometry::make_deformation(c.domain, geometry::windowed_mode(*c.domain, 0, 1, 2), 0.3);
    const geometry::WallFunction mu(c.domain, {{1.0, geometry::windowed_mode(*c.domain, 0, 3, 1)},
                                               {0.5, geometry::windowed_mode(*c.domain, 0, 1, 0)}});
    const auto r = adjoint::identity_check(lin, V, mu);
    CHECK(std::abs(r.lhs) > 1e-3 * r.scale);
    // Level 1 is coarse; the acceptance run checks convergence.
    CHECK(r.residual < 5e-5);
  }
}

TEST_CASE("flipping kappa breaks the potential identity") {
  const auto c = annulus(ops::FlowKind::Potential, 1);
  ops::Linearization lin(c.flow);
  const auto V = geometry::make_deformation(c.domain, geometry::uniform_mode(*c.domain, 0));
  const geometry::WallFunction mu(c.domain, {{1.0, geometry::uniform_mode(*c.domain, 0)}});
  CHECK(adjoint::identity_check(lin, V, mu).residual < 1e-6);
  CHECK(adjoint::identity_check(lin, V, mu, {true}).residual > 1e-1);
}

TEST_CASE("adjoint states satisfy their boundary conditions") {
  const auto c = annulus(ops::FlowKind::Stokes, 1);
  const geometry::WallFunction mu(c.domain, {{1.0, geometry::fourier_mode(*c.domain, 0, 1, false)}});
  const auto& d = *c.flow.disc;
  auto pot = c.flow;
  pot.kind = ops::FlowKind::Potential;
  const auto phi = adjoint::adjoint_potential(pot, mu);
  const Eigen::VectorXd expect = d.boundary_values([&](int loop, double u) { return mu.value(loop, u); });
  CHECK((d.trace(phi.values) - expect).cwiseAbs().maxCoeff() < 1e-12);
  const auto st = adjoint::adjoint_stokes(c.flow, mu);
  CHECK(d.trace(st.phi.values).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Robin probe: positive on the annulus and monotone in the coefficient") {
  const auto c = annulus(ops::FlowKind::Potential, 1);
  const auto& d = *c.flow.disc;
  const auto base = adjoint::robin_uniqueness_probe(d, *c.flow.quad, adjoint::curvature_coefficient());
  const auto up = adjoint::robin_uniqueness_probe(d, *c.flow.quad, adjoint::curvature_coefficient(1.0, 0.5));
  const auto down = adjoint::robin_uniqueness_probe(d, *c.flow.quad, adjoint::curvature_coefficient(-1.0));
  CHECK(base.eigenvalue > 0);
  CHECK(up.eigenvalue >= base.eigenvalue);
  CHECK(down.eigenvalue <= base.eigenvalue);
  CHECK(base.residual < 1e-6);
  // Same seed, same answer.
  const auto again = adjoint::robin_uniqueness_probe(d, *c.flow.quad, adjoint::curvature_coefficient());
  CHECK(again.eigenvalue == base.eigenvalue);
}

TEST_CASE("Stokes obstruction probe on the annulus") {
  const auto c = annulus(ops::FlowKind::Stokes, 0);
  ops::Linearization lin(c.flow);
  const auto c11 = adjoint::c11_profile(lin);
  // Radial flow: c11 = -d_n omega / omega is constant on the outer wall, up to
  // the level 0 discretization error.
  CHECK((c11.values.array() - c11.values.mean()).abs().maxCoeff() < 0.15 * std::abs(c11.values.mean()));
  const auto rep = adjoint::stokes_obstruction_probe(*c.flow.disc, c.flow.quad, c11);
  CHECK(rep.smallest > 0);
  CHECK(rep.dimension == static_cast<int>(rep.kernel.size()));
  CHECK(std::is_sorted(rep.singular_values.begin(), rep.singular_values.end()));
  CHECK(rep.dimension_low <= rep.dimension);
  CHECK(rep.dimension <= rep.dimension_high);
}
