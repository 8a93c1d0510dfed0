#pragma once

#include "shapecalc/fem.hpp"

namespace shapecalc::ops {

enum class FlowKind { Potential, Stokes };

std::string to_string(FlowKind k);
FlowKind parse_flow_kind(const std::string& text);

/// One flow problem on one mesh. `quad` always lives on the reference mesh;
/// on deformed meshes it indexes the same material wall points.
struct FlowCase {
  FlowKind kind = FlowKind::Potential;
  geometry::BoundaryData g;
  fem::DiscretizationPtr disc;
  mesh::WallQuadraturePtr quad;
};

/// Solutions of the base problem on a case's mesh.
struct BaseState {
  fem::ScalarField psi;
  fem::ScalarField omega;        // Stokes only
  Eigen::VectorXd dn_psi;        // consistent flux, boundary-indexed (potential)
  Eigen::VectorXd omega_b;       // trace of omega (Stokes)
  Eigen::VectorXd dn_omega;      // consistent flux of omega (Stokes)
  fem::WallProfile S;            // S_p or S_s
};

BaseState solve_base(const FlowCase& c);

/// -(d_n Psi) on the wall.
fem::WallProfile eval_Sp(const FlowCase& c);
/// omega on the wall.
fem::WallProfile eval_Ss(const FlowCase& c);
fem::WallProfile eval_S(const FlowCase& c);

struct LinearizeOptions {
  bool curvature_term = true;  // include kappa z(0) v_n in dS_p
};

/// Linearized shape operator at the reference configuration of a case.
class Linearization {
 public:
  explicit Linearization(FlowCase c, LinearizeOptions opts = {});

  fem::WallProfile apply(const geometry::DeformationField& V) const;
  const BaseState& base() const { return base_; }
  const FlowCase& flow_case() const { return case_; }
  const LinearizeOptions& options() const { return opts_; }

  /// Normal speed sampled at the wall quadrature.
  fem::WallProfile normal_speed(const geometry::DeformationField& V) const;
  /// Shape-derivative state: Psi' (and omega' for Stokes).
  std::pair<fem::ScalarField, fem::ScalarField> derivative_state(const geometry::DeformationField& V) const;

 private:
  FlowCase case_;
  LinearizeOptions opts_;
  BaseState base_;
  fem::WallProfile z0_, dn_omega0_;
};

fem::WallProfile eval_dSp(const Linearization& lin, const geometry::DeformationField& V);
fem::WallProfile eval_dSs(const Linearization& lin, const geometry::DeformationField& V);

}  // namespace shapecalc::ops
