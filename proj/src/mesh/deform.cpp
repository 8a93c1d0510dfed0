#include "shapecalc/mesh.hpp"

#include "../common/assembly.hpp"
#include "../common/p2.hpp"
#include "shapecalc/quadrature_rules.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace shapecalc::mesh {

struct MeshDeformer::Impl {
  std::vector<int> interior, bnd;
  std::vector<int> slot;  // node -> position in interior or boundary list
  assembly::SpMat Kib;
  Eigen::SimplicialLDLT<assembly::SpMat> solver;
};

MeshDeformer::MeshDeformer(TriMeshPtr reference) : ref_(std::move(reference)), impl_(std::make_unique<Impl>()) {
  const TriMesh& m = *ref_;
  impl_->slot.resize(static_cast<std::size_t>(m.num_nodes()));
  for (int i = 0; i < m.num_nodes(); ++i) {
    auto& list = m.on_boundary(i) ? impl_->bnd : impl_->interior;
    impl_->slot[static_cast<std::size_t>(i)] = static_cast<int>(list.size());
    list.push_back(i);
  }
  const auto K = assembly::stiffness(fem::Space(ref_, 2));
  std::vector<Eigen::Triplet<double>> ii, ib;
  for (int k = 0; k < K.outerSize(); ++k)
    for (assembly::SpMat::InnerIterator it(K, k); it; ++it) {
      const int r = static_cast<int>(it.row()), c = static_cast<int>(it.col());
      if (m.on_boundary(r)) continue;
      const int sr = impl_->slot[static_cast<std::size_t>(r)], sc = impl_->slot[static_cast<std::size_t>(c)];
      (m.on_boundary(c) ? ib : ii).emplace_back(sr, sc, it.value());
    }
  const int ni = static_cast<int>(impl_->interior.size()), nb = static_cast<int>(impl_->bnd.size());
  assembly::SpMat Kii(ni, ni);
  Kii.setFromTriplets(ii.begin(), ii.end());
  impl_->Kib.resize(ni, nb);
  impl_->Kib.setFromTriplets(ib.begin(), ib.end());
  impl_->solver.compute(Kii);
  if (impl_->solver.info() != Eigen::Success) throw MeshError("mesh deformer: interior Laplacian factorization failed");
}

MeshDeformer::~MeshDeformer() = default;

std::vector<Vec2> MeshDeformer::extend(const geometry::DeformationField& field) const {
  const TriMesh& m = *ref_;
  std::vector<Vec2> theta(static_cast<std::size_t>(m.num_nodes()), Vec2::Zero());
  const int nb = static_cast<int>(impl_->bnd.size());
  Eigen::MatrixXd gb(nb, 2);
  for (int k = 0; k < nb; ++k) {
    const auto& tag = m.boundary[static_cast<std::size_t>(impl_->bnd[static_cast<std::size_t>(k)])];
    const Vec2 v = field.displacement(tag.loop, tag.u);
    gb.row(k) = v.transpose();
    theta[static_cast<std::size_t>(impl_->bnd[static_cast<std::size_t>(k)])] = v;
  }
  if (field.is_zero()) return theta;
  const Eigen::MatrixXd rhs = -(impl_->Kib * gb);
  const Eigen::MatrixXd xi = impl_->solver.solve(rhs);
  for (int k = 0; k < static_cast<int>(impl_->interior.size()); ++k)
    theta[static_cast<std::size_t>(impl_->interior[static_cast<std::size_t>(k)])] = xi.row(k).transpose();
  return theta;
}

DomainTransform MeshDeformer::transform(const std::vector<Vec2>& theta, double t) const {
  const TriMesh& m = *ref_;
  DomainTransform out;
  out.t = t;
  for (const auto& v : theta) out.sup_theta = std::max(out.sup_theta, v.norm());
  out.t_max = std::numeric_limits<double>::infinity();
  auto visit = [&](int tri, double xi, double eta) {
    const auto G = p2::grad(xi, eta);
    const auto& tr = m.tris[static_cast<std::size_t>(tri)];
    Mat2 T = Mat2::Zero();
    for (int i = 0; i < 6; ++i) T += theta[static_cast<std::size_t>(tr[static_cast<std::size_t>(i)])] * G.row(i);
    const Mat2 D = T * m.jacobian(tri, xi, eta).inverse();
    const Eigen::JacobiSVD<Mat2> svd(D);
    out.sup_dtheta = std::max(out.sup_dtheta, svd.singularValues()(0));
    // det(I + s D) = 1 + s tr D + s^2 det D; smallest |s| root bounds t.
    const double a = D.determinant(), b = D.trace();
    for (double sign : {1.0, -1.0}) {
      const double bb = sign * b;
      if (std::abs(a) < 1e-300) {
        if (bb < 0) out.t_max = std::min(out.t_max, -1.0 / bb);
        continue;
      }
      const double disc = bb * bb - 4.0 * a;
      if (disc < 0) continue;
      const double r = std::sqrt(disc);
      for (double s : {(-bb - r) / (2 * a), (-bb + r) / (2 * a)})
        if (s > 0) out.t_max = std::min(out.t_max, s);
    }
  };
  for (int tri = 0; tri < m.num_triangles(); ++tri) {
    visit(tri, 0, 0);
    visit(tri, 1, 0);
    visit(tri, 0, 1);
    for (const auto& q : quad::triangle_rule()) visit(tri, q.xi, q.eta);
  }
  return out;
}

TriMeshPtr MeshDeformer::deform(const geometry::DeformationField& field, double t) const {
  return deform(extend(field), t);
}

TriMeshPtr MeshDeformer::deform(const std::vector<Vec2>& theta, double t) const {
  const TriMesh& ref = *ref_;
  if (theta.size() != ref.nodes.size()) throw MeshError("displacement size does not match mesh");
  auto m = std::make_shared<TriMesh>(ref);
  if (t == 0.0) return m;
  for (std::size_t i = 0; i < m->nodes.size(); ++i) m->nodes[i] = ref.nodes[i] + t * theta[i];
  for (int tri = 0; tri < m->num_triangles(); ++tri) {
    if (!(m->min_jacobian(tri) > 0)) {
      const Vec2 c = m->map(tri, 1.0 / 3, 1.0 / 3);
      throw MeshError("deformation inverts triangle " + std::to_string(tri) + " near (" + std::to_string(c.x()) +
                      ", " + std::to_string(c.y()) + ") at t = " + std::to_string(t));
    }
  }
  return m;
}

}  // namespace shapecalc::mesh
