#include "shapecalc/validation.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>

namespace shapecalc::validation {

namespace {

Eigen::RowVector4d value_row(double r) { return {1.0, r * r, std::log(r), r * r * std::log(r)}; }
Eigen::RowVector4d slope_row(double r) { return {0.0, 2 * r, 1 / r, 2 * r * std::log(r) + r}; }
// d/dr of the two rows above.
Eigen::RowVector4d value_row_dr(double r) { return slope_row(r); }
Eigen::RowVector4d slope_row_dr(double r) { return {0.0, 2.0, -1 / (r * r), 2 * std::log(r) + 3}; }

void check_radii(double r1, double r2) {
  if (!(r1 > 0 && r2 > r1)) throw std::invalid_argument("radial oracle needs 0 < r1 < r2");
}

}  // namespace

RadialPotential::RadialPotential(double r1_, double r2_, double g1_, double g2_)
    : r1(r1_), r2(r2_), g1(g1_), g2(g2_) {
  check_radii(r1, r2);
  b = (g2 - g1) / std::log(r2 / r1);
  a = g1 - b * std::log(r1);
}

double RadialPotential::psi(double r) const { return a + b * std::log(r); }
double RadialPotential::dpsi(double r) const { return b / r; }
double RadialPotential::S() const { return -dpsi(r2); }

double RadialPotential::dS() const {
  const double L = std::log(r2 / r1);
  return (g2 - g1) * (L + 1) / (r2 * r2 * L * L);
}

RadialBiharmonic::RadialBiharmonic(double r1_, double r2_, double a1_, double a2_, double s1_, double s2_)
    : r1(r1_), r2(r2_), a1(a1_), a2(a2_), s1(s1_), s2(s2_) {
  check_radii(r1, r2);
  Eigen::Matrix4d A;
  A << value_row(r1), value_row(r2), slope_row(r1), slope_row(r2);
  const Eigen::FullPivLU<Eigen::Matrix4d> lu(A);
  if (!lu.isInvertible()) throw std::runtime_error("radial biharmonic system is singular");
  c = lu.solve(Eigen::Vector4d(a1, a2, s1, s2));
}

double RadialBiharmonic::psi(double r) const { return value_row(r) * c; }
double RadialBiharmonic::dpsi(double r) const { return slope_row(r) * c; }
double RadialBiharmonic::omega(double r) const { return -4 * c(1) - 4 * c(3) * (std::log(r) + 1); }
double RadialBiharmonic::domega(double r) const { return -4 * c(3) / r; }

double RadialBiharmonic::domega_outer_dR() const {
  Eigen::Matrix4d A, dA = Eigen::Matrix4d::Zero();
  A << value_row(r1), value_row(r2), slope_row(r1), slope_row(r2);
  dA.row(1) = value_row_dr(r2);
  dA.row(3) = slope_row_dr(r2);
  const Eigen::Vector4d dc = -A.fullPivLu().solve(dA * c);
  return -4 * dc(1) - 4 * dc(3) * (std::log(r2) + 1) + domega(r2);
}

RadialProfiles radial_oracles(ops::FlowKind kind, double r1, double r2, double g1, double g2) {
  RadialProfiles p;
  if (kind == ops::FlowKind::Potential) {
    const RadialPotential o(r1, r2, g1, g2);
    p.S = o.S();
    p.dS = o.dS();
    p.z = o.dpsi(r2);
  } else {
    const RadialBiharmonic o(r1, r2, g1, g2, 0.0, 0.0);
    p.S = o.omega(r2);
    p.dS = o.domega_outer_dR();
    p.z = o.omega(r2);
    p.dn_omega = o.domega(r2);
  }
  return p;
}

}  // namespace shapecalc::validation
