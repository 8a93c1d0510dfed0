#include "shapecalc/fem.hpp"

#include "../common/assembly.hpp"

#include <Eigen/SparseCholesky>

#include <sstream>

namespace shapecalc::fem {

namespace {

using Triplet = Eigen::Triplet<double>;

// Block of A with rows/cols mapped through slot tables (-1 drops the entry).
SpMat block(const SpMat& A, const std::vector<int>& row_slot, const std::vector<int>& col_slot, int nr, int nc) {
  std::vector<Triplet> trip;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      const int r = row_slot[static_cast<std::size_t>(it.row())], c = col_slot[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
    }
  SpMat B(nr, nc);
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

double relative(double num, double den) { return den > 0 ? num / den : num; }

constexpr double kResidualLimit = 1e-9;

}  // namespace

struct Discretization::Factorizations {
  Eigen::SimplicialLDLT<SpMat> laplace;
  Eigen::SimplicialLDLT<SpMat> bmass;
  std::unique_ptr<SparseLU> mixed;
  SpMat mixed_matrix;
};

Discretization::Discretization(mesh::TriMeshPtr m, int degree)
    : space_(std::make_shared<Space>(std::move(m), degree)), fact_(std::make_unique<Factorizations>()) {
  const auto& V = *space_;
  const int n = V.num_dofs();
  slot_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& list = V.on_boundary(i) ? bnodes_ : inodes_;
    slot_[static_cast<std::size_t>(i)] = static_cast<int>(list.size());
    list.push_back(i);
  }
  if (inodes_.empty()) throw SolverError("mesh has no interior nodes");
  K_ = assembly::stiffness(V);
  M_ = assembly::mass(V);
  const SpMat Mb_full = assembly::boundary_mass(V, nullptr);

  std::vector<int> islot(static_cast<std::size_t>(n), -1), bslot(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) (V.on_boundary(i) ? bslot : islot)[static_cast<std::size_t>(i)] = slot(i);
  const int ni = static_cast<int>(inodes_.size()), nb = static_cast<int>(bnodes_.size());
  Kii_ = block(K_, islot, islot, ni, ni);
  Kib_ = block(K_, islot, bslot, ni, nb);
  Mb_ = block(Mb_full, bslot, bslot, nb, nb);

  fact_->laplace.compute(Kii_);
  if (fact_->laplace.info() != Eigen::Success) throw SolverError("interior stiffness factorization failed");
  fact_->bmass.compute(Mb_);
  if (fact_->bmass.info() != Eigen::Success) throw SolverError("boundary mass factorization failed");
}

Discretization::~Discretization() = default;

Eigen::VectorXd Discretization::boundary_values(const std::function<double(int, double)>& fn) const {
  Eigen::VectorXd g(static_cast<Eigen::Index>(bnodes_.size()));
  for (std::size_t k = 0; k < bnodes_.size(); ++k) {
    const auto& tag = space_->tag(bnodes_[k]);
    g(static_cast<Eigen::Index>(k)) = fn(tag.loop, tag.u);
  }
  return g;
}

Eigen::VectorXd Discretization::boundary_values(const geometry::BoundaryData& g) const {
  return boundary_values([&](int loop, double u) { return g.value(loop, u); });
}

Eigen::VectorXd Discretization::trace(const Eigen::VectorXd& u) const {
  Eigen::VectorXd t(static_cast<Eigen::Index>(bnodes_.size()));
  for (std::size_t k = 0; k < bnodes_.size(); ++k) t(static_cast<Eigen::Index>(k)) = u(bnodes_[k]);
  return t;
}

ScalarField Discretization::solve_dirichlet(const Eigen::VectorXd& g, std::string name) const {
  if (g.size() != static_cast<Eigen::Index>(bnodes_.size())) throw SolverError("Dirichlet data has wrong size");
  const Eigen::VectorXd rhs = -(Kib_ * g);
  const Eigen::VectorXd ui = fact_->laplace.solve(rhs);
  ScalarField f;
  f.name = std::move(name);
  f.space = space_;
  f.values.resize(num_dofs());
  for (std::size_t k = 0; k < bnodes_.size(); ++k) f.values(bnodes_[k]) = g(static_cast<Eigen::Index>(k));
  for (std::size_t k = 0; k < inodes_.size(); ++k) f.values(inodes_[k]) = ui(static_cast<Eigen::Index>(k));
  f.residual = relative((Kii_ * ui - rhs).norm(), rhs.norm());
  if (!(f.residual < kResidualLimit) || !f.values.allFinite()) {
    std::ostringstream os;
    os << "Laplace solve residual " << f.residual << " exceeds " << kResidualLimit;
    throw SolverError(os.str());
  }
  return f;
}

Eigen::VectorXd Discretization::flux(const Eigen::VectorXd& u) const {
  const Eigen::VectorXd Ku = K_ * u;
  return fact_->bmass.solve(trace(Ku));
}

void Discretization::build_mixed() const {
  std::call_once(mixed_once_, [this] {
    const int n = num_dofs();
    const int ni = static_cast<int>(inodes_.size());
    std::vector<Triplet> trip;
    trip.reserve(static_cast<std::size_t>(M_.nonZeros() + 2 * K_.nonZeros()));
    for (int k = 0; k < M_.outerSize(); ++k)
      for (SpMat::InnerIterator it(M_, k); it; ++it) trip.emplace_back(it.row(), it.col(), it.value());
    for (int k = 0; k < K_.outerSize(); ++k)
      for (SpMat::InnerIterator it(K_, k); it; ++it) {
        const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
        if (!space_->on_boundary(c)) trip.emplace_back(r, n + slot(c), -it.value());
        if (!space_->on_boundary(r)) trip.emplace_back(n + slot(r), c, -it.value());
      }
    fact_->mixed_matrix.resize(n + ni, n + ni);
    fact_->mixed_matrix.setFromTriplets(trip.begin(), trip.end());
    fact_->mixed = std::make_unique<SparseLU>(fact_->mixed_matrix);
  });
  if (!fact_->mixed) throw SolverError("mixed system factorization unavailable");
}

double Discretization::mixed_rcond() const { return fact_->mixed ? fact_->mixed->rcond() : 0.0; }

std::pair<ScalarField, ScalarField> Discretization::solve_mixed(const Eigen::VectorXd& g, const Eigen::VectorXd& gn,
                                                                std::string psi_name, std::string omega_name) const {
  const auto nb = static_cast<Eigen::Index>(bnodes_.size());
  if (g.size() != nb || gn.size() != nb) throw SolverError("mixed boundary data has wrong size");
  build_mixed();
  const int n = num_dofs();
  const int ni = static_cast<int>(inodes_.size());
  Eigen::VectorXd gfull = Eigen::VectorXd::Zero(n);
  for (std::size_t k = 0; k < bnodes_.size(); ++k) gfull(bnodes_[k]) = g(static_cast<Eigen::Index>(k));
  const Eigen::VectorXd Mgn = Mb_ * gn;
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + ni);
  rhs.head(n) = K_ * gfull;
  for (std::size_t k = 0; k < bnodes_.size(); ++k) rhs(bnodes_[k]) -= Mgn(static_cast<Eigen::Index>(k));
  const Eigen::VectorXd x = fact_->mixed->solve(rhs);
  const double res = relative((fact_->mixed_matrix * x - rhs).norm(), rhs.norm());
  if (!(res < kResidualLimit) || !x.allFinite()) {
    std::ostringstream os;
    os << "mixed solve residual " << res << " exceeds " << kResidualLimit << " (reciprocal condition estimate "
       << fact_->mixed->rcond() << ")";
    throw SolverError(os.str());
  }
  ScalarField psi{std::move(psi_name), gfull, space_, res};
  for (std::size_t k = 0; k < inodes_.size(); ++k) psi.values(inodes_[k]) = x(n + static_cast<Eigen::Index>(k));
  ScalarField omega{std::move(omega_name), x.head(n), space_, res};
  return {std::move(psi), std::move(omega)};
}

WallProfile Discretization::sample(const Eigen::VectorXd& f_b, const mesh::WallQuadraturePtr& q, std::string name) const {
  WallProfile p;
  p.name = std::move(name);
  p.quad = q;
  p.values.resize(static_cast<Eigen::Index>(q->size()));
  for (std::size_t i = 0; i < q->size(); ++i) {
    const auto& wp = q->points[i];
    const int* dofs = space_->edge_dofs(wp.edge);
    const Eigen::VectorXd N = space_->edge_shape(wp.xi);
    double v = 0.0;
    for (int k = 0; k <= space_->degree(); ++k) v += N(k) * f_b(slot(dofs[k]));
    p.values(static_cast<Eigen::Index>(i)) = v;
  }
  return p;
}

SpMat Discretization::wall_mass(const mesh::WallQuadrature& q, const Eigen::VectorXd& c) const {
  if (c.size() != static_cast<Eigen::Index>(q.size())) throw SolverError("wall coefficient has wrong size");
  const int k = space_->degree();
  std::vector<Triplet> trip;
  trip.reserve(q.size() * static_cast<std::size_t>((k + 1) * (k + 1)));
  for (std::size_t i = 0; i < q.size(); ++i) {
    const auto& wp = q.points[i];
    const int* dofs = space_->edge_dofs(wp.edge);
    const Eigen::VectorXd N = space_->edge_shape(wp.xi);
    const double w = wp.weight * c(static_cast<Eigen::Index>(i));
    for (int a = 0; a <= k; ++a)
      for (int b = 0; b <= k; ++b) trip.emplace_back(dofs[a], dofs[b], w * N(a) * N(b));
  }
  SpMat W(num_dofs(), num_dofs());
  W.setFromTriplets(trip.begin(), trip.end());
  return W;
}

std::vector<int> Discretization::inflow_dofs() const {
  std::vector<char> mark(static_cast<std::size_t>(num_dofs()), 0);
  const int k = space_->degree();
  for (std::size_t e = 0; e < mesh().edges.size(); ++e)
    if (mesh().edges[e].label == mesh::BoundaryLabel::Inflow)
      for (int j = 0; j <= k; ++j) mark[static_cast<std::size_t>(space_->edge_dofs(static_cast<int>(e))[j])] = 1;
  std::vector<int> out;
  for (int i = 0; i < num_dofs(); ++i)
    if (mark[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

std::vector<int> Discretization::free_wall_dofs() const {
  std::vector<char> mark(static_cast<std::size_t>(num_dofs()), 0);
  const int k = space_->degree();
  for (std::size_t e = 0; e < mesh().edges.size(); ++e)
    if (mesh().edges[e].label == mesh::BoundaryLabel::Wall)
      for (int j = 0; j <= k; ++j) mark[static_cast<std::size_t>(space_->edge_dofs(static_cast<int>(e))[j])] = 1;
  for (int i : inflow_dofs()) mark[static_cast<std::size_t>(i)] = 0;
  std::vector<int> out;
  for (int i = 0; i < num_dofs(); ++i)
    if (mark[static_cast<std::size_t>(i)]) out.push_back(i);
  return out;
}

ScalarField solve_laplace_dirichlet(const Discretization& d, const geometry::BoundaryData& g) {
  return d.solve_dirichlet(d.boundary_values(g));
}

WallProfile boundary_normal_derivative(const Discretization& d, const ScalarField& field,
                                       const mesh::WallQuadraturePtr& q) {
  return d.sample(d.flux(field.values), q, "dn_" + field.name);
}

}  // namespace shapecalc::fem
