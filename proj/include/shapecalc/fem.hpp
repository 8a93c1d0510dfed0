#pragma once

#include "shapecalc/mesh.hpp"
#include "shapecalc/space.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace shapecalc::fem {

using SpMat = Eigen::SparseMatrix<double>;

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Finite element coefficients in a Lagrange space.
struct ScalarField {
  std::string name;
  Eigen::VectorXd values;
  SpacePtr space;
  double residual = 0.0;  // relative residual of the producing linear solve
};

/// Values at the points of a wall quadrature.
struct WallProfile {
  std::string name;
  Eigen::VectorXd values;
  mesh::WallQuadraturePtr quad;

  std::size_t size() const { return static_cast<std::size_t>(values.size()); }
  WallProfile operator+(const WallProfile& o) const;
  WallProfile operator-(const WallProfile& o) const;
  WallProfile operator*(double f) const;
};

WallProfile make_profile(std::string name, const mesh::WallQuadraturePtr& q,
                         const std::function<double(const mesh::WallPoint&)>& fn);
double wall_inner_product(const WallProfile& a, const WallProfile& b);
double wall_norm(const WallProfile& a);

/// Sparse LU (UMFPACK) of a square matrix; solves are safe to run concurrently.
class SparseLU {
 public:
  explicit SparseLU(const SpMat& A);
  ~SparseLU();
  SparseLU(const SparseLU&) = delete;
  SparseLU& operator=(const SparseLU&) = delete;
  Eigen::VectorXd solve(const Eigen::VectorXd& b) const;
  double rcond() const { return rcond_; }

 private:
  SpMat A_;
  void* numeric_ = nullptr;
  double rcond_ = 0.0;
};

/// Lagrange discretization (degree 3 by default) of one mesh: matrices,
/// boundary bookkeeping and cached factorizations. Boundary vectors are
/// indexed by position in boundary_nodes().
class Discretization {
 public:
  explicit Discretization(mesh::TriMeshPtr mesh, int degree = 3);
  ~Discretization();

  const mesh::TriMesh& mesh() const { return space_->mesh(); }
  const mesh::TriMeshPtr& mesh_ptr() const { return space_->mesh_ptr(); }
  const Space& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  int degree() const { return space_->degree(); }
  int num_dofs() const { return space_->num_dofs(); }
  const std::vector<int>& boundary_nodes() const { return bnodes_; }
  const std::vector<int>& interior_nodes() const { return inodes_; }
  /// Position of a dof in the boundary (or interior) list.
  int slot(int dof) const { return slot_[static_cast<std::size_t>(dof)]; }

  const SpMat& stiffness() const { return K_; }
  const SpMat& mass() const { return M_; }
  /// Boundary mass over all boundary edges, restricted to boundary nodes.
  const SpMat& boundary_mass() const { return Mb_; }

  /// Boundary vector with fn(loop, u) evaluated at the reference tags.
  Eigen::VectorXd boundary_values(const std::function<double(int loop, double u)>& fn) const;
  Eigen::VectorXd boundary_values(const geometry::BoundaryData& g) const;
  Eigen::VectorXd trace(const Eigen::VectorXd& u) const;

  /// Discrete harmonic field with boundary values g.
  ScalarField solve_dirichlet(const Eigen::VectorXd& g, std::string name = "psi") const;
  /// Consistent normal derivative on the boundary: M_b lambda = (K u)_B.
  Eigen::VectorXd flux(const Eigen::VectorXd& u) const;
  /// Ciarlet-Raviart mixed biharmonic solve with psi = g (strong) and
  /// d_n psi = gn (weak). Returns (psi, omega) with omega = -Laplace(psi).
  std::pair<ScalarField, ScalarField> solve_mixed(const Eigen::VectorXd& g, const Eigen::VectorXd& gn,
                                                  std::string psi_name = "psi", std::string omega_name = "omega") const;

  /// Boundary function evaluated at wall quadrature points.
  WallProfile sample(const Eigen::VectorXd& f_b, const mesh::WallQuadraturePtr& q, std::string name) const;

  /// Weighted boundary mass sum_q w_q c_q N_i N_j over the points of a wall
  /// quadrature (all dofs, full size).
  SpMat wall_mass(const mesh::WallQuadrature& q, const Eigen::VectorXd& c) const;
  /// Dofs on wall edges that do not touch an inflow edge, in increasing order.
  std::vector<int> free_wall_dofs() const;
  /// Dofs lying on inflow edges, in increasing order.
  std::vector<int> inflow_dofs() const;

  /// Estimated reciprocal condition number of the mixed system (0 if not built).
  double mixed_rcond() const;

 private:
  void build_mixed() const;

  SpacePtr space_;
  std::vector<int> bnodes_, inodes_, slot_;
  SpMat K_, M_, Mb_, Kii_, Kib_;
  struct Factorizations;
  std::unique_ptr<Factorizations> fact_;
  mutable std::once_flag mixed_once_;
};

using DiscretizationPtr = std::shared_ptr<const Discretization>;

// Convenience wrappers named after the operations they realize.
ScalarField solve_laplace_dirichlet(const Discretization& d, const geometry::BoundaryData& g);
WallProfile boundary_normal_derivative(const Discretization& d, const ScalarField& field,
                                       const mesh::WallQuadraturePtr& q);

// CSV export ---------------------------------------------------------------

void write_field_csv(const ScalarField& f, std::ostream& out);
void write_profile_csv(const WallProfile& p, std::ostream& out);
/// Several profiles on one quadrature as columns.
void write_profiles_csv(const std::vector<WallProfile>& ps, std::ostream& out);

}  // namespace shapecalc::fem
