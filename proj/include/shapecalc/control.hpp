#pragma once

#include "shapecalc/operators.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

namespace shapecalc::control {

/// Ordered deformation directions; prefixes of a basis are nested bases.
struct DeformationBasis {
  std::vector<geometry::DeformationField> fields;
  std::vector<std::string> names;

  int size() const { return static_cast<int>(fields.size()); }
  DeformationBasis prefix(int n) const;
};

/// Fourier modes on full wall loops (uniform, cos 1, sin 1, ...) and windowed
/// modes on partial wall arcs, interleaved over wall components.
DeformationBasis fourier_basis(const geometry::DomainPtr& domain, int n);
/// C2 bumps of fixed width; centres follow a nested bit-reversal sequence
/// along each wall component. `width` is a fraction of the component length.
DeformationBasis bump_basis(const geometry::DomainPtr& domain, int n, double width = 0.2);
/// "fourier" or "bump".
DeformationBasis make_basis(const geometry::DomainPtr& domain, const std::string& kind, int n);

/// Smallest eigenvalue of the normalized Gram matrix of the normal speeds;
/// the basis is independent if this is well above zero.
double basis_independence(const DeformationBasis& basis, const mesh::WallQuadraturePtr& q);

/// Responses dS(V_i) as columns, with their wall Gram matrix.
struct GramSystem {
  Eigen::MatrixXd R;  // quadrature points x N
  Eigen::MatrixXd G;  // R^T W R
  mesh::WallQuadraturePtr quad;

  int size() const { return static_cast<int>(R.cols()); }
  GramSystem prefix(int n) const;
  fem::WallProfile column(int i) const;
};

/// Evaluates the columns concurrently; results do not depend on `threads`.
GramSystem assemble_response(const ops::Linearization& lin, const DeformationBasis& basis, int threads = 1);

struct FitResult {
  Eigen::VectorXd coefficients;
  double residual = 0.0;  // ||R c - target|| / ||target||
  fem::WallProfile fitted;
};

/// Minimizes ||R c - target||^2 + alpha ||c||^2, i.e. (G + alpha I) c = R^T W target,
/// through a QR factorization of the stacked system. alpha = 0 requires full rank.
FitResult fit_target(const GramSystem& sys, const fem::WallProfile& target, double alpha);

/// Same fit after projecting responses and target onto the wall-L2 orthogonal
/// complement of `kernel` (orthonormal profiles).
FitResult fit_target_projected(const GramSystem& sys, const fem::WallProfile& target, double alpha,
                               const std::vector<fem::WallProfile>& kernel);

/// Resamples profiles (e.g. obstruction candidates from a coarser probe mesh)
/// onto another quadrature of the same domain by linear interpolation in loop
/// arclength, then orthonormalizes them in the wall L2 product. Vectors that
/// become dependent are dropped.
std::vector<fem::WallProfile> transfer_kernel(const std::vector<fem::WallProfile>& kernel,
                                              const mesh::WallQuadraturePtr& target);

struct StudyRow {
  int n = 0;
  double alpha = 0.0;
  double residual_raw = 0.0;
  double residual_projected = 0.0;
};

/// Rows follow alpha_list order, then n_list order. Without kernel vectors the projected
/// column equals the raw one.
std::vector<StudyRow> residual_study(const GramSystem& sys, const fem::WallProfile& target,
                                     const std::vector<int>& n_list, const std::vector<double>& alpha_list,
                                     const std::vector<fem::WallProfile>& kernel = {});

/// True if every residual column (per alpha) is nonincreasing in N within tol.
bool columns_monotone(const std::vector<StudyRow>& rows, double tol = 1e-10);

// Targets ---------------------------------------------------------------------

/// exp(-(d / width)^2) with d the arclength distance to `center` on `loop`
/// (periodic on full wall loops).
fem::WallProfile gaussian_target(const geometry::Domain& domain, const mesh::WallQuadraturePtr& q, int loop,
                                 double center, double width);
/// cos(2 pi k s / L) on `loop`.
fem::WallProfile mode_target(const geometry::Domain& domain, const mesh::WallQuadraturePtr& q, int loop, int k);

void write_study_csv(const std::vector<StudyRow>& rows, std::ostream& out);
void write_coefficients_csv(const FitResult& fit, const DeformationBasis& basis, std::ostream& out);

}  // namespace shapecalc::control
