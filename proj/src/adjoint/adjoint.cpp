#include "shapecalc/adjoint.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace shapecalc::adjoint {

namespace {

Eigen::VectorXd boundary_mu(const fem::Discretization& d, const geometry::WallFunction& mu) {
  return d.boundary_values([&](int loop, double u) { return mu.value(loop, u); });
}

fem::WallProfile sample_mu(const ops::FlowCase& c, const geometry::WallFunction& mu) {
  return fem::make_profile("mu", c.quad, [&](const mesh::WallPoint& p) { return mu.value(p.loop, p.u); });
}

IdentityReport finish(double lhs, double rhs, double scale) {
  IdentityReport r{lhs, rhs, scale, 0.0};
  const double diff = std::abs(lhs - rhs);
  if (scale > 0)
    r.residual = diff / scale;
  else if (diff > 0)
    r.residual = std::numeric_limits<double>::infinity();
  return r;
}

}  // namespace

fem::ScalarField adjoint_potential(const ops::FlowCase& c, const geometry::WallFunction& mu) {
  if (c.kind != ops::FlowKind::Potential) throw std::invalid_argument("adjoint_potential needs a potential-flow case");
  return c.disc->solve_dirichlet(boundary_mu(*c.disc, mu), "phi");
}

StokesAdjoint adjoint_stokes(const ops::FlowCase& c, const geometry::WallFunction& mu) {
  if (c.kind != ops::FlowKind::Stokes) throw std::invalid_argument("adjoint_stokes needs a Stokes case");
  const auto& d = *c.disc;
  const Eigen::VectorXd gn = boundary_mu(d, mu);
  auto [phi, w] = d.solve_mixed(Eigen::VectorXd::Zero(gn.size()), gn, "phi", "laplace_phi");
  w.values = -w.values;
  return {std::move(phi), std::move(w)};
}

IdentityReport identity_check_potential(const ops::Linearization& lin, const geometry::DeformationField& V,
                                        const geometry::WallFunction& mu, const IdentityOptions& opts) {
  const auto& c = lin.flow_case();
  if (c.kind != ops::FlowKind::Potential) throw std::invalid_argument("identity_check_potential needs a potential-flow case");
  const auto& d = *c.disc;
  const fem::WallProfile dS = lin.apply(V);
  const fem::WallProfile m = sample_mu(c, mu);
  const fem::WallProfile vn = lin.normal_speed(V);
  const fem::WallProfile z0 = d.sample(lin.base().dn_psi, c.quad, "z0");
  const fem::ScalarField phi = adjoint_potential(c, mu);
  const fem::WallProfile dn_phi = d.sample(d.flux(phi.values), c.quad, "dn_phi");
  const double sign = opts.flip_kappa ? -1.0 : 1.0;
  double rhs = 0.0;
  for (std::size_t i = 0; i < c.quad->size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    const auto& p = c.quad->points[i];
    rhs += p.weight * (dn_phi.values(k) + sign * p.kappa * m.values(k)) * vn.values(k) * z0.values(k);
  }
  return finish(fem::wall_inner_product(dS, m), rhs, fem::wall_norm(dS) * fem::wall_norm(m));
}

IdentityReport identity_check_stokes(const ops::Linearization& lin, const geometry::DeformationField& V,
                                     const geometry::WallFunction& mu, const IdentityOptions&) {
  const auto& c = lin.flow_case();
  if (c.kind != ops::FlowKind::Stokes) throw std::invalid_argument("identity_check_stokes needs a Stokes case");
  const auto& d = *c.disc;
  const fem::WallProfile dS = lin.apply(V);
  const fem::WallProfile m = sample_mu(c, mu);
  const fem::WallProfile vn = lin.normal_speed(V);
  const fem::WallProfile w0 = d.sample(lin.base().omega_b, c.quad, "omega0");
  const fem::WallProfile dn_w0 = d.sample(lin.base().dn_omega, c.quad, "dn_omega0");
  const StokesAdjoint adj = adjoint_stokes(c, mu);
  const fem::WallProfile lap = d.sample(d.trace(adj.laplacian.values), c.quad, "laplace_phi");
  const Eigen::VectorXd integrand =
      vn.values.array() * (-w0.values.array() * lap.values.array() + dn_w0.values.array() * m.values.array());
  const double rhs = fem::wall_inner_product(fem::WallProfile{"rhs", integrand, c.quad},
                                             fem::WallProfile{"one", Eigen::VectorXd::Ones(integrand.size()), c.quad});
  return finish(fem::wall_inner_product(dS, m), rhs, fem::wall_norm(dS) * fem::wall_norm(m));
}

IdentityReport identity_check(const ops::Linearization& lin, const geometry::DeformationField& V,
                              const geometry::WallFunction& mu, const IdentityOptions& opts) {
  return lin.flow_case().kind == ops::FlowKind::Potential ? identity_check_potential(lin, V, mu, opts)
                                                          : identity_check_stokes(lin, V, mu, opts);
}

}  // namespace shapecalc::adjoint
