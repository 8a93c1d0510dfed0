#include "shapecalc/space.hpp"

#include <Eigen/Dense>

#include <stdexcept>

namespace shapecalc::fem {

namespace {

// Reference coordinates of the lattice nodes in local order.
std::vector<Eigen::Vector2d> reference_nodes(int k) {
  const Eigen::Vector2d v[3] = {{0, 0}, {1, 0}, {0, 1}};
  std::vector<Eigen::Vector2d> pts(v, v + 3);
  for (int e = 0; e < 3; ++e)
    for (int j = 1; j < k; ++j) {
      const double s = static_cast<double>(j) / k;
      pts.push_back((1 - s) * v[e] + s * v[(e + 1) % 3]);
    }
  for (int a = 1; a < k; ++a)
    for (int b = 1; a + b < k; ++b) pts.emplace_back(static_cast<double>(a) / k, static_cast<double>(b) / k);
  return pts;
}

double ipow(double x, int p) {
  double r = 1.0;
  for (int i = 0; i < p; ++i) r *= x;
  return r;
}

}  // namespace

Space::Space(mesh::TriMeshPtr m, int degree) : mesh_(std::move(m)), k_(degree) {
  if (k_ != 2 && k_ != 3) throw std::invalid_argument("finite element degree must be 2 or 3");
  nloc_ = (k_ + 1) * (k_ + 2) / 2;
  for (int a = 0; a <= k_; ++a)
    for (int b = 0; a + b <= k_; ++b) powers_.emplace_back(a, b);
  const auto ref = reference_nodes(k_);
  Eigen::MatrixXd V(nloc_, nloc_);
  for (int i = 0; i < nloc_; ++i)
    for (int j = 0; j < nloc_; ++j) V(i, j) = ipow(ref[static_cast<std::size_t>(i)].x(), powers_[static_cast<std::size_t>(j)].first) *
                                              ipow(ref[static_cast<std::size_t>(i)].y(), powers_[static_cast<std::size_t>(j)].second);
  // Rows of V are monomials at nodes; basis coefficients solve V C = I.
  coeff_ = V.fullPivLu().solve(Eigen::MatrixXd::Identity(nloc_, nloc_));

  const auto& msh = *mesh_;
  const int nv = msh.num_vertices;
  const int nt = msh.num_triangles();
  // Edges are identified by their P2 midpoint node.
  std::vector<int> edge_id(static_cast<std::size_t>(msh.num_nodes()), -1);
  int ne = 0;
  for (const auto& tr : msh.tris)
    for (int e = 0; e < 3; ++e) {
      auto& id = edge_id[static_cast<std::size_t>(tr[static_cast<std::size_t>(3 + e)])];
      if (id < 0) id = ne++;
    }
  const int per_edge = k_ - 1;
  const int per_tri = nloc_ - 3 - 3 * per_edge;
  const int ndofs = k_ == 2 ? msh.num_nodes() : nv + per_edge * ne + per_tri * nt;
  points_.assign(static_cast<std::size_t>(ndofs), Vec2::Zero());
  tags_.assign(static_cast<std::size_t>(ndofs), mesh::BoundaryNode{});
  elem_.resize(static_cast<std::size_t>(nt * nloc_));

  for (int t = 0; t < nt; ++t) {
    const auto& tr = msh.tris[static_cast<std::size_t>(t)];
    int* dofs = &elem_[static_cast<std::size_t>(t * nloc_)];
    for (int i = 0; i < 3; ++i) dofs[i] = tr[static_cast<std::size_t>(i)];
    for (int e = 0; e < 3; ++e) {
      const int a = tr[static_cast<std::size_t>(e)], b = tr[static_cast<std::size_t>((e + 1) % 3)];
      const int mid = tr[static_cast<std::size_t>(3 + e)];
      for (int j = 0; j < per_edge; ++j) {
        int dof;
        if (k_ == 2) {
          dof = mid;
        } else {
          // Edge dofs are stored from the lower-numbered vertex.
          const int jj = a < b ? j : per_edge - 1 - j;
          dof = nv + per_edge * edge_id[static_cast<std::size_t>(mid)] + jj;
        }
        dofs[3 + per_edge * e + j] = dof;
      }
    }
    for (int j = 0; j < per_tri; ++j) dofs[3 + 3 * per_edge + j] = nv + per_edge * ne + per_tri * t + j;
    for (int i = 0; i < nloc_; ++i)
      points_[static_cast<std::size_t>(dofs[i])] = msh.map(t, ref[static_cast<std::size_t>(i)].x(), ref[static_cast<std::size_t>(i)].y());
  }

  edge_.resize(msh.edges.size() * static_cast<std::size_t>(k_ + 1));
  for (std::size_t ei = 0; ei < msh.edges.size(); ++ei) {
    const auto& be = msh.edges[ei];
    const int* dofs = element_dofs(be.tri);
    const int a = msh.tris[static_cast<std::size_t>(be.tri)][static_cast<std::size_t>(be.local)];
    const bool forward = a == be.nodes[0];
    int* out = &edge_[ei * static_cast<std::size_t>(k_ + 1)];
    out[0] = be.nodes[0];
    out[k_] = be.nodes[1];
    for (int j = 0; j < per_edge; ++j) {
      const int local = 3 + per_edge * be.local + (forward ? j : per_edge - 1 - j);
      out[1 + j] = dofs[local];
    }
    for (int j = 0; j <= k_; ++j) {
      const double s = static_cast<double>(j) / k_;
      tags_[static_cast<std::size_t>(out[j])] =
          mesh::BoundaryNode{be.loop, msh.domain->curve(be.loop).wrap(be.u0 + s * (be.u1 - be.u0))};
    }
  }
  if (k_ == 3 && msh.cubic_offsets.size() == msh.edges.size())
    for (std::size_t ei = 0; ei < msh.edges.size(); ++ei)
      for (int j = 0; j < 2; ++j)
        points_[static_cast<std::size_t>(edge_[ei * 4 + static_cast<std::size_t>(1 + j)])] +=
            msh.cubic_offsets[ei][static_cast<std::size_t>(j)];
  // Vertex tags come from the mesh so that wrapped parameters stay canonical.
  for (int v = 0; v < msh.num_nodes() && v < ndofs; ++v)
    if (msh.on_boundary(v) && (k_ == 2 || v < nv)) tags_[static_cast<std::size_t>(v)] = msh.boundary[static_cast<std::size_t>(v)];
}

Eigen::VectorXd Space::shape(double xi, double eta) const {
  Eigen::VectorXd m(nloc_);
  for (int j = 0; j < nloc_; ++j) m(j) = ipow(xi, powers_[static_cast<std::size_t>(j)].first) * ipow(eta, powers_[static_cast<std::size_t>(j)].second);
  return coeff_.transpose() * m;
}

Eigen::MatrixXd Space::grad(double xi, double eta) const {
  Eigen::MatrixXd dm(nloc_, 2);
  for (int j = 0; j < nloc_; ++j) {
    const auto [a, b] = powers_[static_cast<std::size_t>(j)];
    dm(j, 0) = a > 0 ? a * ipow(xi, a - 1) * ipow(eta, b) : 0.0;
    dm(j, 1) = b > 0 ? b * ipow(xi, a) * ipow(eta, b - 1) : 0.0;
  }
  return coeff_.transpose() * dm;
}

Eigen::VectorXd Space::edge_shape(double s) const {
  Eigen::VectorXd N(k_ + 1);
  for (int i = 0; i <= k_; ++i) {
    const double si = static_cast<double>(i) / k_;
    double v = 1.0;
    for (int j = 0; j <= k_; ++j)
      if (j != i) v *= (s - static_cast<double>(j) / k_) / (si - static_cast<double>(j) / k_);
    N(i) = v;
  }
  return N;
}

Eigen::VectorXd Space::edge_shape_derivative(double s) const {
  Eigen::VectorXd dN = Eigen::VectorXd::Zero(k_ + 1);
  for (int i = 0; i <= k_; ++i) {
    const double si = static_cast<double>(i) / k_;
    for (int m = 0; m <= k_; ++m) {
      if (m == i) continue;
      double v = 1.0 / (si - static_cast<double>(m) / k_);
      for (int j = 0; j <= k_; ++j)
        if (j != i && j != m) v *= (s - static_cast<double>(j) / k_) / (si - static_cast<double>(j) / k_);
      dN(i) += v;
    }
  }
  return dN;
}

Vec2 Space::map(int t, double xi, double eta) const {
  if (k_ == 2) return mesh_->map(t, xi, eta);
  const Eigen::VectorXd N = shape(xi, eta);
  const int* dofs = element_dofs(t);
  Vec2 x = Vec2::Zero();
  for (int i = 0; i < nloc_; ++i) x += N(i) * points_[static_cast<std::size_t>(dofs[i])];
  return x;
}

Mat2 Space::jacobian(int t, const Eigen::MatrixXd& G) const {
  const int* dofs = element_dofs(t);
  Mat2 J = Mat2::Zero();
  for (int i = 0; i < nloc_; ++i) J += points_[static_cast<std::size_t>(dofs[i])] * G.row(i);
  return J;
}

Vec2 Space::edge_derivative(int e, double s) const {
  const Eigen::VectorXd dN = edge_shape_derivative(s);
  const int* dofs = edge_dofs(e);
  Vec2 d = Vec2::Zero();
  for (int i = 0; i <= k_; ++i) d += dN(i) * points_[static_cast<std::size_t>(dofs[i])];
  return d;
}

}  // namespace shapecalc::fem
