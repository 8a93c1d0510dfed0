#include "shapecalc/operators.hpp"

namespace shapecalc::ops {

std::string to_string(FlowKind k) { return k == FlowKind::Potential ? "potential" : "stokes"; }

FlowKind parse_flow_kind(const std::string& text) {
  if (text == "potential") return FlowKind::Potential;
  if (text == "stokes") return FlowKind::Stokes;
  throw std::invalid_argument("unknown flow kind '" + text + "' (expected potential or stokes)");
}

namespace {

void require_case(const FlowCase& c) {
  if (!c.disc || !c.quad) throw std::invalid_argument("flow case needs a discretization and a wall quadrature");
  if (c.disc->mesh().edges.size() < 1) throw std::invalid_argument("flow case mesh has no boundary");
}

}  // namespace

BaseState solve_base(const FlowCase& c) {
  require_case(c);
  const auto& d = *c.disc;
  BaseState b;
  const Eigen::VectorXd g = d.boundary_values(c.g);
  if (c.kind == FlowKind::Potential) {
    b.psi = d.solve_dirichlet(g, "psi");
    b.dn_psi = d.flux(b.psi.values);
    b.S = d.sample(-b.dn_psi, c.quad, "S_p");
  } else {
    auto [psi, omega] = d.solve_mixed(g, Eigen::VectorXd::Zero(g.size()));
    b.psi = std::move(psi);
    b.omega = std::move(omega);
    b.omega_b = d.trace(b.omega.values);
    b.dn_omega = d.flux(b.omega.values);
    b.S = d.sample(b.omega_b, c.quad, "S_s");
  }
  return b;
}

fem::WallProfile eval_Sp(const FlowCase& c) {
  if (c.kind != FlowKind::Potential) throw std::invalid_argument("eval_Sp needs a potential-flow case");
  return solve_base(c).S;
}

fem::WallProfile eval_Ss(const FlowCase& c) {
  if (c.kind != FlowKind::Stokes) throw std::invalid_argument("eval_Ss needs a Stokes case");
  return solve_base(c).S;
}

fem::WallProfile eval_S(const FlowCase& c) { return solve_base(c).S; }

Linearization::Linearization(FlowCase c, LinearizeOptions opts)
    : case_(std::move(c)), opts_(opts), base_(solve_base(case_)) {
  const auto& d = *case_.disc;
  if (case_.kind == FlowKind::Potential) {
    z0_ = d.sample(base_.dn_psi, case_.quad, "z0");
  } else {
    dn_omega0_ = d.sample(base_.dn_omega, case_.quad, "dn_omega0");
  }
}

fem::WallProfile Linearization::normal_speed(const geometry::DeformationField& V) const {
  return fem::make_profile("v_n", case_.quad, [&](const mesh::WallPoint& p) { return V.normal_speed(p.loop, p.u); });
}

std::pair<fem::ScalarField, fem::ScalarField> Linearization::derivative_state(
    const geometry::DeformationField& V) const {
  const auto& d = *case_.disc;
  const Eigen::VectorXd vn = d.boundary_values([&](int loop, double u) { return V.normal_speed(loop, u); });
  if (case_.kind == FlowKind::Potential) {
    const Eigen::VectorXd data = -(vn.array() * base_.dn_psi.array()).matrix();
    return {d.solve_dirichlet(data, "psi_prime"), fem::ScalarField{}};
  }
  const Eigen::VectorXd gn = (vn.array() * base_.omega_b.array()).matrix();
  return d.solve_mixed(Eigen::VectorXd::Zero(vn.size()), gn, "psi_prime", "omega_prime");
}

fem::WallProfile Linearization::apply(const geometry::DeformationField& V) const {
  const auto& d = *case_.disc;
  const fem::WallProfile vn = normal_speed(V);
  auto [psi_p, omega_p] = derivative_state(V);
  fem::WallProfile out;
  if (case_.kind == FlowKind::Potential) {
    out = d.sample(-d.flux(psi_p.values), case_.quad, "dS_p");
    if (opts_.curvature_term)
      for (std::size_t i = 0; i < case_.quad->size(); ++i) {
        const auto k = static_cast<Eigen::Index>(i);
        out.values(k) += case_.quad->points[i].kappa * z0_.values(k) * vn.values(k);
      }
  } else {
    out = d.sample(d.trace(omega_p.values), case_.quad, "dS_s");
    out.values += (dn_omega0_.values.array() * vn.values.array()).matrix();
  }
  return out;
}

fem::WallProfile eval_dSp(const Linearization& lin, const geometry::DeformationField& V) {
  if (lin.flow_case().kind != FlowKind::Potential) throw std::invalid_argument("eval_dSp needs a potential-flow case");
  return lin.apply(V);
}

fem::WallProfile eval_dSs(const Linearization& lin, const geometry::DeformationField& V) {
  if (lin.flow_case().kind != FlowKind::Stokes) throw std::invalid_argument("eval_dSs needs a Stokes case");
  return lin.apply(V);
}

}  // namespace shapecalc::ops
