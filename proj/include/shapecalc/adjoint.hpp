#pragma once

#include "shapecalc/operators.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace shapecalc::adjoint {

/// Harmonic phi with trace mu (mu vanishes on inflow arcs by construction).
fem::ScalarField adjoint_potential(const ops::FlowCase& c, const geometry::WallFunction& mu);

struct StokesAdjoint {
  fem::ScalarField phi;        // zero trace, d_n phi = mu
  fem::ScalarField laplacian;  // Laplace(phi), i.e. minus the vorticity slot
};

StokesAdjoint adjoint_stokes(const ops::FlowCase& c, const geometry::WallFunction& mu);

struct IdentityOptions {
  /// Debug mutation: use -kappa in the potential identity.
  bool flip_kappa = false;
};

struct IdentityReport {
  double lhs = 0.0;       // <dS(V), mu>
  double rhs = 0.0;       // adjoint representation
  double scale = 0.0;     // ||dS(V)|| ||mu||
  double residual = 0.0;  // |lhs - rhs| / scale, 0 if both sides vanish
};

/// <dS_p(V), mu> against int (d_n phi + kappa mu) v_n d_n Psi(0) ds.
IdentityReport identity_check_potential(const ops::Linearization& lin, const geometry::DeformationField& V,
                                        const geometry::WallFunction& mu, const IdentityOptions& opts = {});
/// <dS_s(V), mu> against int v_n (-omega(0) Laplace(phi) + d_n omega(0) mu) ds.
IdentityReport identity_check_stokes(const ops::Linearization& lin, const geometry::DeformationField& V,
                                     const geometry::WallFunction& mu, const IdentityOptions& opts = {});
IdentityReport identity_check(const ops::Linearization& lin, const geometry::DeformationField& V,
                              const geometry::WallFunction& mu, const IdentityOptions& opts = {});

// Uniqueness and obstruction probes --------------------------------------------

using WallCoefficient = std::function<double(const mesh::WallPoint&)>;

/// scale * kappa + shift, with kappa from the exact curve.
WallCoefficient curvature_coefficient(double scale = 1.0, double shift = 0.0);

struct EigenOptions {
  int max_iterations = 150;
  double tolerance = 1e-10;
  std::uint64_t seed = 1;
};

struct RobinReport {
  double eigenvalue = 0.0;
  double shift = 0.0;
  double residual = 0.0;  // ||A x - lambda B x|| / ||A x||
  int iterations = 0;
  int level = 0;
  int dofs = 0;
};

/// Smallest eigenvalue of a(phi, phi) = int |grad phi|^2 + int_wall kappa phi^2
/// relative to the H1 inner product, on functions vanishing on inflow arcs.
RobinReport robin_uniqueness_probe(const fem::Discretization& d, const mesh::WallQuadrature& q,
                                   const WallCoefficient& kappa, const EigenOptions& opts = {});

/// c11 = -d_n omega(0) / omega(0) on the wall; throws if omega(0) nearly vanishes.
fem::WallProfile c11_profile(const ops::Linearization& lin);

struct ObstructionReport {
  std::vector<double> singular_values;  // ascending
  double threshold = 0.0;               // relative to the largest singular value
  int dimension = 0;
  int dimension_low = 0;   // at threshold / 10
  int dimension_high = 0;  // at threshold * 10
  double smallest = 0.0;
  double gap = 0.0;        // first singular value above the cut over the last one below
  int level = 0;
  int wall_dofs = 0;
  std::vector<fem::WallProfile> kernel;  // candidate vectors, wall-L2 orthonormal
};

/// Generalized eigenproblem of int Laplace(phi) Laplace(eta) + int_wall c11 d_n phi d_n eta
/// against the wall mass, over clamped biharmonic phi parameterized by d_n phi.
ObstructionReport stokes_obstruction_probe(const fem::Discretization& d, const mesh::WallQuadraturePtr& q,
                                           const fem::WallProfile& c11, double threshold = 1e-6, int threads = 1);

void write_robin_report(const RobinReport& r, std::ostream& out);
void write_obstruction_report(const ObstructionReport& r, std::ostream& out);

}  // namespace shapecalc::adjoint
