#include "shapecalc/adjoint.hpp"

#include "../common/parallel.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace shapecalc::adjoint {

namespace {

using SpMat = fem::SpMat;

SpMat restrict(const SpMat& A, const std::vector<int>& slot, int n) {
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      const int r = slot[static_cast<std::size_t>(it.row())], c = slot[static_cast<std::size_t>(it.col())];
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
    }
  SpMat B(n, n);
  B.setFromTriplets(trip.begin(), trip.end());
  return B;
}

}  // namespace

WallCoefficient curvature_coefficient(double scale, double shift) {
  return [scale, shift](const mesh::WallPoint& p) { return scale * p.kappa + shift; };
}

RobinReport robin_uniqueness_probe(const fem::Discretization& d, const mesh::WallQuadrature& q,
                                   const WallCoefficient& kappa, const EigenOptions& opts) {
  Eigen::VectorXd kv(static_cast<Eigen::Index>(q.size()));
  for (std::size_t i = 0; i < q.size(); ++i) kv(static_cast<Eigen::Index>(i)) = kappa(q.points[i]);
  const SpMat A = d.stiffness() + d.wall_mass(q, kv);
  const SpMat B = d.stiffness() + d.mass();

  std::vector<int> slot(static_cast<std::size_t>(d.num_dofs()), 0);
  for (int i : d.inflow_dofs()) slot[static_cast<std::size_t>(i)] = -1;
  int nf = 0;
  for (auto& s : slot)
    if (s >= 0) s = nf++;
  if (nf == 0) throw std::runtime_error("Robin probe: no free degrees of freedom");
  const SpMat Af = restrict(A, slot, nf), Bf = restrict(B, slot, nf);

  // Shift below the spectrum so that A - sigma B is positive definite.
  double sigma = 0.0;
  Eigen::SimplicialLDLT<SpMat> ldlt;
  for (int attempt = 0;; ++attempt) {
    ldlt.compute(SpMat(Af - sigma * Bf));
    if (ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0).all()) break;
    if (attempt > 60) throw std::runtime_error("Robin probe: no positive definite shift found");
    sigma = sigma == 0.0 ? -1.0 : 2.0 * sigma;
  }

  // Lanczos on (A - sigma B)^{-1} B in the B inner product.
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd v(nf);
  for (int i = 0; i < nf; ++i) v(i) = uni(rng);
  std::vector<Eigen::VectorXd> Q, BQ;
  std::vector<double> alpha, beta;
  Eigen::VectorXd Bv = Bf * v;
  double nrm = std::sqrt(v.dot(Bv));
  Q.push_back(v / nrm);
  BQ.push_back(Bv / nrm);
  RobinReport rep;
  rep.shift = sigma;
  rep.level = d.mesh().level;
  rep.dofs = nf;
  double theta = 0.0;
  Eigen::VectorXd y;
  bool converged = false;
  for (int j = 0; j < opts.max_iterations; ++j) {
    Eigen::VectorXd w = ldlt.solve(BQ.back());
    const double a = BQ.back().dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass)
      for (std::size_t i = 0; i < Q.size(); ++i) w -= BQ[i].dot(w) * Q[i];
    const Eigen::VectorXd Bw = Bf * w;
    const double b = std::sqrt(std::max(w.dot(Bw), 0.0));

    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    theta = es.eigenvalues()(m - 1);
    y = es.eigenvectors().col(m - 1);
    rep.iterations = m;
    if (b * std::abs(y(m - 1)) <= opts.tolerance * std::abs(theta) || b <= 1e-14 * std::abs(theta) || m == nf) {
      converged = true;
      break;
    }
    beta.push_back(b);
    Q.push_back(w / b);
    BQ.push_back(Bw / b);
  }
  if (!converged) throw std::runtime_error("Robin probe: Lanczos iteration did not converge");
  if (!(theta > 0)) throw std::runtime_error("Robin probe: shifted operator is not positive");
  rep.eigenvalue = sigma + 1.0 / theta;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(nf);
  for (Eigen::Index i = 0; i < y.size(); ++i) x += y(i) * Q[static_cast<std::size_t>(i)];
  const Eigen::VectorXd Ax = Af * x;
  rep.residual = (Ax - rep.eigenvalue * (Bf * x)).norm() / std::max(Ax.norm(), 1e-300);
  return rep;
}

fem::WallProfile c11_profile(const ops::Linearization& lin) {
  const auto& c = lin.flow_case();
  if (c.kind != ops::FlowKind::Stokes) throw std::invalid_argument("c11 needs a Stokes case");
  const auto& d = *c.disc;
  const fem::WallProfile w0 = d.sample(lin.base().omega_b, c.quad, "omega0");
  const fem::WallProfile dn = d.sample(lin.base().dn_omega, c.quad, "dn_omega0");
  const double big = w0.values.cwiseAbs().maxCoeff();
  fem::WallProfile out{"c11", Eigen::VectorXd(w0.values.size()), c.quad};
  for (Eigen::Index i = 0; i < w0.values.size(); ++i) {
    if (!(std::abs(w0.values(i)) > 1e-8 * big)) {
      const auto& p = c.quad->points[static_cast<std::size_t>(i)];
      std::ostringstream os;
      os << "omega(0) vanishes at wall quadrature point " << i << " (loop " << p.loop << ", s = " << p.s
         << "); c11 is undefined";
      throw std::runtime_error(os.str());
    }
    out.values(i) = -dn.values(i) / w0.values(i);
  }
  return out;
}

ObstructionReport stokes_obstruction_probe(const fem::Discretization& d, const mesh::WallQuadraturePtr& q,
                                           const fem::WallProfile& c11, double threshold, int threads) {
  if (c11.quad != q) throw std::invalid_argument("c11 profile lives on a different quadrature");
  if (!(threshold > 0)) throw std::invalid_argument("obstruction threshold must be positive");
  const std::vector<int> wall = d.free_wall_dofs();
  const int nw = static_cast<int>(wall.size());
  if (nw == 0) throw std::runtime_error("obstruction probe: no wall degrees of freedom");
  const auto nb = static_cast<Eigen::Index>(d.boundary_nodes().size());

  // T_ij = int omega_i omega_j = -(M_b omega_i|_B)_j for clamped solves with d_n phi = e_i.
  Eigen::MatrixXd T(nw, nw);
  detail::parallel_for(nw, threads, [&](int i) {
    Eigen::VectorXd gn = Eigen::VectorXd::Zero(nb);
    gn(d.slot(wall[static_cast<std::size_t>(i)])) = 1.0;
    const auto sol = d.solve_mixed(Eigen::VectorXd::Zero(nb), gn);
    const Eigen::VectorXd y = d.boundary_mass() * d.trace(sol.second.values);
    for (int j = 0; j < nw; ++j) T(i, j) = -y(d.slot(wall[static_cast<std::size_t>(j)]));
  });
  T = (0.5 * (T + T.transpose())).eval();

  std::vector<int> local(static_cast<std::size_t>(d.num_dofs()), -1);
  for (int i = 0; i < nw; ++i) local[static_cast<std::size_t>(wall[static_cast<std::size_t>(i)])] = i;
  auto dense = [&](const SpMat& S) {
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(nw, nw);
    for (int k = 0; k < S.outerSize(); ++k)
      for (SpMat::InnerIterator it(S, k); it; ++it) {
        const int r = local[static_cast<std::size_t>(it.row())], c = local[static_cast<std::size_t>(it.col())];
        if (r >= 0 && c >= 0) D(r, c) += it.value();
      }
    return D;
  };
  const Eigen::MatrixXd C = dense(d.wall_mass(*q, c11.values));
  const Eigen::MatrixXd B = dense(d.wall_mass(*q, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(q->size()))));
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(T + C, B);
  if (ges.info() != Eigen::Success) throw std::runtime_error("obstruction probe: eigensolver failed");

  std::vector<int> order(static_cast<std::size_t>(nw));
  std::iota(order.begin(), order.end(), 0);
  const Eigen::VectorXd lam = ges.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return std::abs(lam(a)) < std::abs(lam(b)); });
  ObstructionReport rep;
  for (int i : order) rep.singular_values.push_back(std::abs(lam(i)));
  rep.threshold = threshold;
  rep.level = d.mesh().level;
  rep.wall_dofs = nw;
  rep.smallest = rep.singular_values.front();
  const double top = rep.singular_values.back();
  auto count = [&](double thr) {
    return static_cast<int>(std::count_if(rep.singular_values.begin(), rep.singular_values.end(),
                                          [&](double s) { return s < thr * top; }));
  };
  rep.dimension = count(threshold);
  rep.dimension_low = count(threshold / 10);
  rep.dimension_high = count(threshold * 10);
  if (rep.dimension < nw) {
    const double below = rep.dimension > 0 ? rep.singular_values[static_cast<std::size_t>(rep.dimension - 1)] : threshold * top;
    rep.gap = rep.singular_values[static_cast<std::size_t>(rep.dimension)] / below;
  }
  const auto& V = d.space();
  for (int k = 0; k < rep.dimension; ++k) {
    const Eigen::VectorXd x = ges.eigenvectors().col(order[static_cast<std::size_t>(k)]);
    rep.kernel.push_back(fem::make_profile("kernel_" + std::to_string(k), q, [&](const mesh::WallPoint& p) {
      const int* dofs = V.edge_dofs(p.edge);
      const Eigen::VectorXd N = V.edge_shape(p.xi);
      double v = 0.0;
      for (int a = 0; a <= V.degree(); ++a) {
        const int l = local[static_cast<std::size_t>(dofs[a])];
        if (l >= 0) v += N(a) * x(l);
      }
      return v;
    }));
  }
  return rep;
}

void write_robin_report(const RobinReport& r, std::ostream& out) {
  out << "{\"probe\": \"robin\", \"eigenvalue\": " << r.eigenvalue << ", \"shift\": " << r.shift
      << ", \"residual\": " << r.residual << ", \"iterations\": " << r.iterations << ", \"dofs\": " << r.dofs
      << ", \"mesh_level\": " << r.level << "}\n";
}

void write_obstruction_report(const ObstructionReport& r, std::ostream& out) {
  out << "{\"probe\": \"stokes_obstruction\", \"smallest_singular_value\": " << r.smallest
      << ", \"dimension\": " << r.dimension << ", \"dimension_at_threshold_div10\": " << r.dimension_low
      << ", \"dimension_at_threshold_mul10\": " << r.dimension_high << ", \"threshold\": " << r.threshold
      << ", \"gap\": " << r.gap << ", \"wall_dofs\": " << r.wall_dofs << ", \"mesh_level\": " << r.level << "}\n";
}

}  // namespace shapecalc::adjoint
