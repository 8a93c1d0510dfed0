#include "assembly.hpp"

#include "shapecalc/quadrature_rules.hpp"

#include <Eigen/Dense>

#include <vector>

namespace shapecalc::assembly {

namespace {

using Triplet = Eigen::Triplet<double>;

struct Tables {
  std::vector<Eigen::VectorXd> N;
  std::vector<Eigen::MatrixXd> G;
};

Tables tables(const fem::Space& V) {
  Tables t;
  for (const auto& q : quad::triangle_rule()) {
    t.N.push_back(V.shape(q.xi, q.eta));
    t.G.push_back(V.grad(q.xi, q.eta));
  }
  return t;
}

void scatter(const fem::Space& V, int t, const Eigen::MatrixXd& Ae, std::vector<Triplet>& trip) {
  const int* dofs = V.element_dofs(t);
  for (int i = 0; i < V.num_local(); ++i)
    for (int j = 0; j < V.num_local(); ++j) trip.emplace_back(dofs[i], dofs[j], Ae(i, j));
}

}  // namespace

SpMat stiffness(const fem::Space& V) {
  const auto& m = V.mesh();
  const int nl = V.num_local();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(m.num_triangles() * nl * nl));
  const auto& rule = quad::triangle_rule();
  const Tables tab = tables(V);
  Eigen::MatrixXd Ke(nl, nl), G(nl, 2);
  for (int t = 0; t < m.num_triangles(); ++t) {
    Ke.setZero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Mat2 J = V.jacobian(t, tab.G[q]);
      G.noalias() = tab.G[q] * J.inverse();
      Ke.noalias() += (rule[q].weight * J.determinant()) * G * G.transpose();
    }
    scatter(V, t, Ke, trip);
  }
  SpMat K(V.num_dofs(), V.num_dofs());
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

SpMat mass(const fem::Space& V) {
  const auto& m = V.mesh();
  const int nl = V.num_local();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(m.num_triangles() * nl * nl));
  const auto& rule = quad::triangle_rule();
  const Tables tab = tables(V);
  Eigen::MatrixXd Me(nl, nl);
  for (int t = 0; t < m.num_triangles(); ++t) {
    Me.setZero();
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double det = V.jacobian(t, tab.G[q]).determinant();
      Me.noalias() += (rule[q].weight * det) * tab.N[q] * tab.N[q].transpose();
    }
    scatter(V, t, Me, trip);
  }
  SpMat M(V.num_dofs(), V.num_dofs());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

SpMat boundary_mass(const fem::Space& V, const std::function<bool(const mesh::BoundaryEdge&)>& use_edge,
                    const EdgeWeight& weight) {
  const auto& m = V.mesh();
  const int k = V.degree();
  std::vector<Triplet> trip;
  const auto& gl = quad::gauss_legendre(6);
  std::vector<Eigen::VectorXd> N;
  for (double s : gl.points) N.push_back(V.edge_shape(s));
  Eigen::MatrixXd Me(k + 1, k + 1);
  for (int ei = 0; ei < static_cast<int>(m.edges.size()); ++ei) {
    const auto& e = m.edges[static_cast<std::size_t>(ei)];
    if (use_edge && !use_edge(e)) continue;
    Me.setZero();
    for (std::size_t q = 0; q < gl.points.size(); ++q) {
      const double s = gl.points[q];
      const Vec2 dx = V.edge_derivative(ei, s);
      const double w = gl.weights[q] * dx.norm() * (weight ? weight(ei, s) : 1.0);
      Me.noalias() += w * N[q] * N[q].transpose();
    }
    const int* dofs = V.edge_dofs(ei);
    for (int i = 0; i <= k; ++i)
      for (int j = 0; j <= k; ++j) trip.emplace_back(dofs[i], dofs[j], Me(i, j));
  }
  SpMat M(V.num_dofs(), V.num_dofs());
  M.setFromTriplets(trip.begin(), trip.end());
  return M;
}

Vec2 gradient(const fem::Space& V, int t, const Eigen::VectorXd& u, double xi, double eta) {
  const Eigen::MatrixXd Gr = V.grad(xi, eta);
  const Eigen::MatrixXd G = Gr * V.jacobian(t, Gr).inverse();
  const int* dofs = V.element_dofs(t);
  Vec2 g = Vec2::Zero();
  for (int i = 0; i < V.num_local(); ++i) g += u(dofs[i]) * G.row(i).transpose();
  return g;
}

}  // namespace shapecalc::assembly
