#include "shapecalc/quadrature_rules.hpp"
#include "shapecalc/validation.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace shapecalc::validation {

namespace {

// Central differences of J at each t and their deviation from the formula.
HadamardReport compare(double formula, const std::vector<double>& t_list, const std::function<double(double)>& J) {
  HadamardReport r;
  r.formula = formula;
  for (double t : t_list) {
    if (!(t > 0)) throw std::invalid_argument("Hadamard check step sizes must be positive");
    const double fd = (J(t) - J(-t)) / (2 * t);
    r.t.push_back(t);
    r.fd.push_back(fd);
    r.residual.push_back(std::abs(fd - formula) / std::max(std::abs(formula), 1.0));
  }
  r.order = loglog_slope(r.t, r.residual);
  return r;
}

}  // namespace

HadamardReport hadamard_domain_check(const mesh::TriMesh& m, const AnalyticField& theta, const ScalarFunction& y0,
                                     const ScalarFunction& y1, const ScalarFunction& f,
                                     const std::vector<double>& t_list) {
  const auto& rule = quad::triangle_rule();
  auto J = [&](double t) {
    double sum = 0.0;
    for (int tri = 0; tri < m.num_triangles(); ++tri)
      for (const auto& q : rule) {
        const Vec2 x = m.map(tri, q.xi, q.eta);
        const double det0 = m.jacobian(tri, q.xi, q.eta).determinant();
        const Vec2 y = x + t * theta.value(x);
        const double det = (Mat2::Identity() + t * theta.jacobian(x)).determinant();
        sum += q.weight * det0 * det * (y0.value(y) + t * y1.value(y)) * f.value(y);
      }
    return sum;
  };
  double formula = 0.0;
  for (int tri = 0; tri < m.num_triangles(); ++tri)
    for (const auto& q : rule) {
      const Vec2 x = m.map(tri, q.xi, q.eta);
      formula += q.weight * m.jacobian(tri, q.xi, q.eta).determinant() * y1.value(x) * f.value(x);
    }
  const auto bq = mesh::boundary_quadrature(m, 6);
  for (const auto& p : bq->points) formula += p.weight * y0.value(p.x) * f.value(p.x) * theta.value(p.x).dot(p.n);
  return compare(formula, t_list, J);
}

HadamardReport hadamard_boundary_check(const mesh::TriMesh& m, const AnalyticField& theta, const ScalarFunction& z0,
                                       const ScalarFunction& z1, const ScalarFunction& f,
                                       const std::vector<double>& t_list) {
  const auto bq = mesh::boundary_quadrature(m, 6);
  auto J = [&](double t) {
    double sum = 0.0;
    for (const auto& p : bq->points) {
      const Vec2 y = p.x + t * theta.value(p.x);
      const double stretch = ((Mat2::Identity() + t * theta.jacobian(p.x)) * p.tau).norm();
      sum += p.weight * stretch * (z0.value(y) + t * z1.value(y)) * f.value(y);
    }
    return sum;
  };
  double formula = 0.0;
  for (const auto& p : bq->points) {
    const double vn = theta.value(p.x).dot(p.n);
    const double z = z0.value(p.x), fx = f.value(p.x);
    const double zprime = z1.value(p.x) + z0.gradient(p.x).dot(p.n) * vn;
    formula += p.weight * (zprime * fx + (z * f.gradient(p.x).dot(p.n) + p.kappa * z * fx) * vn);
  }
  return compare(formula, t_list, J);
}

LaplacianReport pulled_back_laplacian_check(const mesh::TriMesh& m, const AnalyticField& theta,
                                            const ScalarFunction& f) {
  LaplacianReport r;
  for (int tri = 0; tri < m.num_triangles(); ++tri)
    for (const auto& q : quad::triangle_rule()) {
      const Vec2 x = m.map(tri, q.xi, q.eta);
      const Mat2 DT = Mat2::Identity() + theta.jacobian(x);
      if (std::abs(DT.determinant()) < 1e-12) throw std::runtime_error("transform Jacobian is singular in the pulled-back Laplacian check");
      const Vec2 y = x + theta.value(x);
      const Mat2 M = DT.inverse().transpose();
      const Vec2 gf = f.gradient(y);
      const Mat2 Hf = f.hessian(y);
      const double lhs = Hf.trace();
      // Derivatives of v = f o (Id + theta) by the chain rule.
      const Vec2 gv = DT.transpose() * gf;
      Mat2 Hv = DT.transpose() * Hf * DT;
      Mat2 H[2];
      for (int k = 0; k < 2; ++k) {
        H[k] = theta.hessian(x, k);
        Hv += gf(k) * H[k];
      }
      // Pulled-back Laplacian: sum_ij d_j (M grad v)_i M_ij with d_j M = -M (d_j DT)^T M.
      double rhs = 0.0;
      for (int j = 0; j < 2; ++j) {
        Mat2 dDT;
        for (int k = 0; k < 2; ++k)
          for (int i = 0; i < 2; ++i) dDT(k, i) = H[k](i, j);
        const Mat2 dM = -M * dDT.transpose() * M;
        const Vec2 dG = dM * gv + M * Hv.col(j);
        for (int i = 0; i < 2; ++i) rhs += dG(i) * M(i, j);
      }
      r.max_residual = std::max(r.max_residual, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));
      ++r.points;
    }
  return r;
}

}  // namespace shapecalc::validation
