#pragma once

#include "shapecalc/operators.hpp"

#include <Eigen/Core>

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace shapecalc::validation {

// Radial oracles on the annulus r1 < r < r2 ----------------------------------

/// Harmonic Psi = a + b ln r with Psi(r1) = g1, Psi(r2) = g2.
struct RadialPotential {
  RadialPotential(double r1, double r2, double g1, double g2);

  double psi(double r) const;
  double dpsi(double r) const;
  /// S_p on the outer circle: -dPsi/dr at r2.
  double S() const;
  /// Derivative of S_p with respect to the outer radius.
  double dS() const;

  double r1, r2, g1, g2, a, b;
};

/// Radial biharmonic Psi = A + B r^2 + C ln r + D r^2 ln r with
/// Psi(r1) = a1, Psi(r2) = a2, Psi'(r1) = s1, Psi'(r2) = s2 (radial derivatives).
struct RadialBiharmonic {
  RadialBiharmonic(double r1, double r2, double a1, double a2, double s1, double s2);

  double psi(double r) const;
  double dpsi(double r) const;
  /// omega = -Laplace(Psi).
  double omega(double r) const;
  double domega(double r) const;
  /// d/dR of omega_R(R), the outer-wall vorticity of the family with r2 = R.
  double domega_outer_dR() const;

  double r1, r2, a1, a2, s1, s2;
  Eigen::Vector4d c;  // A, B, C, D
};

/// Closed-form annulus values for the flow operators with wall data g2 on the
/// outer wall and g1 on the inner circle.
struct RadialProfiles {
  double S = 0.0;         // S on the outer wall
  double dS = 0.0;        // dS for v_n = 1 on the outer wall
  double z = 0.0;         // dPsi/dn (potential) or omega (Stokes) on the outer wall
  double dn_omega = 0.0;  // Stokes only
};
RadialProfiles radial_oracles(ops::FlowKind kind, double r1, double r2, double g1, double g2);

// Analytic fields for the differentiation lemmas ------------------------------

/// Scalar function on the plane with gradient and Hessian.
struct ScalarFunction {
  std::function<double(const Vec2&)> value;
  std::function<Vec2(const Vec2&)> gradient;
  std::function<Mat2(const Vec2&)> hessian;
};

ScalarFunction constant_function(double c);
/// c0 + c1 x + c2 y + c3 x^2 + c4 x y + c5 y^2 + c6 x^3 + c7 y^3.
ScalarFunction polynomial_function(const std::array<double, 8>& coeffs);
ScalarFunction sum(const ScalarFunction& a, const ScalarFunction& b);

/// Smooth vector field theta on the plane with first and second derivatives.
class AnalyticField {
 public:
  virtual ~AnalyticField() = default;
  virtual Vec2 value(const Vec2& x) const = 0;
  virtual Mat2 jacobian(const Vec2& x) const = 0;
  /// Hessian of component k.
  virtual Mat2 hessian(const Vec2& x, int k) const = 0;
  virtual std::string describe() const = 0;
};

using AnalyticFieldPtr = std::shared_ptr<const AnalyticField>;

AnalyticFieldPtr zero_field();
/// eps * (-(y - cy), x - cx).
AnalyticFieldPtr rotation_field(double eps, Vec2 centre = Vec2::Zero());
/// x (1 - r_fixed / r): zero on the circle r_fixed, normal speed r - r_fixed.
AnalyticFieldPtr radial_stretch_field(double r_fixed);
/// eps * (sin(a.x), cos(b.x)) for wave vectors a, b.
AnalyticFieldPtr wave_field(double eps, Vec2 a, Vec2 b);

// Taylor and finite-difference oracles -----------------------------------------

struct TaylorOptions {
  std::vector<double> t_list{0.1, 0.05, 0.025, 0.0125};
  int threads = 1;
};

struct TaylorReport {
  std::string op;
  std::vector<double> t;
  std::vector<double> remainder;
  std::vector<double> dropped;  // t values skipped because the mesh tangled
  std::vector<std::string> warnings;
  double slope = 0.0;
  bool exact = false;     // all remainders vanish (slope undefined)
  double dS_norm = 0.0;   // wall L2 norm of dS(V)
};

/// Flow case on the mesh deformed by t V, sharing the reference wall quadrature.
ops::FlowCase deformed_case(const ops::FlowCase& c, const mesh::MeshDeformer& deformer,
                            const geometry::DeformationField& V, double t);

/// remainder(t) = || S(Omega_tV) o (Id + tV) - S(Omega_0) - t dS(V) ||.
TaylorReport taylor_test(const ops::Linearization& lin, const mesh::MeshDeformer& deformer,
                         const geometry::DeformationField& V, const TaylorOptions& opts = {});

/// Central difference (S(Omega_tV) - S(Omega_-tV)) / (2t), pulled back.
fem::WallProfile fd_oracle(const ops::FlowCase& c, const mesh::MeshDeformer& deformer,
                           const geometry::DeformationField& V, double t);

/// Least-squares slope of log(values) against log(t); NaN if fewer than two
/// positive entries.
double loglog_slope(const std::vector<double>& t, const std::vector<double>& values);

// Differentiation of domain and boundary integrals ----------------------------

struct HadamardReport {
  double formula = 0.0;
  std::vector<double> t;
  std::vector<double> fd;
  std::vector<double> residual;  // |fd - formula| / max(|formula|, 1)
  double order = 0.0;            // log-log slope of residual in t
};

/// J(t) = int_{Omega_t} y_t f dx with y_t = y0 + t y1 and Omega_t = (Id + t theta)(Omega_0);
/// compares central differences of J with int y1 f dx + int y0 f (theta.n) ds.
HadamardReport hadamard_domain_check(const mesh::TriMesh& mesh, const AnalyticField& theta, const ScalarFunction& y0,
                                     const ScalarFunction& y1, const ScalarFunction& f,
                                     const std::vector<double>& t_list = {0.1, 0.05, 0.025, 0.0125});

/// J(t) = int_{Gamma_t} z_t f ds; formula int z' f + (z0 d_n f + kappa z0 f)(theta.n) ds with
/// the boundary shape derivative z' = z1 + d_n z0 (theta.n).
HadamardReport hadamard_boundary_check(const mesh::TriMesh& mesh, const AnalyticField& theta,
                                       const ScalarFunction& z0, const ScalarFunction& z1, const ScalarFunction& f,
                                       const std::vector<double>& t_list = {0.1, 0.05, 0.025, 0.0125});

struct LaplacianReport {
  double max_residual = 0.0;  // max |lhs - rhs| / max(1, |lhs|)
  int points = 0;
};

/// (Laplace f) o (Id + theta) against the pulled-back Laplacian of f o (Id + theta),
/// at every interior quadrature point of the mesh.
LaplacianReport pulled_back_laplacian_check(const mesh::TriMesh& mesh, const AnalyticField& theta,
                                            const ScalarFunction& f);

void write_taylor_csv(const TaylorReport& r, std::ostream& out);

}  // namespace shapecalc::validation
