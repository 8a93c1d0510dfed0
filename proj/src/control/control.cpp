#include "shapecalc/control.hpp"

#include "../common/parallel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>

namespace shapecalc::control {

namespace {

struct Component {
  int loop;
  int arc;  // -1 for a loop that is entirely wall
};

std::vector<Component> wall_components(const geometry::Domain& d) {
  std::vector<Component> out;
  for (int l = 0; l < d.num_loops(); ++l) {
    if (d.is_full_wall_loop(l)) {
      out.push_back({l, -1});
      continue;
    }
    const auto& arcs = d.loop(l).arcs;
    for (int a = 0; a < static_cast<int>(arcs.size()); ++a)
      if (arcs[static_cast<std::size_t>(a)].label == geometry::BoundaryLabel::Wall) out.push_back({l, a});
  }
  if (out.empty()) throw std::invalid_argument("domain has no wall arcs");
  return out;
}

// Mode j of a component in the nested ordering.
geometry::WallModePtr component_mode(const geometry::Domain& d, const Component& c, int j) {
  if (c.arc >= 0) return geometry::windowed_mode(d, c.loop, c.arc, j);
  if (j == 0) return geometry::uniform_mode(d, c.loop);
  return geometry::fourier_mode(d, c.loop, (j + 1) / 2, j % 2 == 0);
}

// Van der Corput sequence in base 2, starting at 1/2.
double corput(int j) {
  double x = 0.0, f = 0.5;
  for (unsigned n = static_cast<unsigned>(j + 1); n; n >>= 1, f *= 0.5)
    if (n & 1u) x += f;
  return x;
}

DeformationBasis interleave(const geometry::DomainPtr& domain, int n,
                            const std::function<geometry::WallModePtr(const Component&, int)>& mode) {
  if (n < 1) throw std::invalid_argument("deformation basis must have at least one member");
  const auto comps = wall_components(*domain);
  DeformationBasis b;
  for (int i = 0; i < n; ++i) {
    const Component& c = comps[static_cast<std::size_t>(i) % comps.size()];
    const auto m = mode(c, i / static_cast<int>(comps.size()));
    b.fields.push_back(geometry::make_deformation(domain, m));
    b.names.push_back(m->describe());
  }
  return b;
}

Eigen::VectorXd sqrt_weights(const mesh::WallQuadrature& q) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(q.size()));
  for (std::size_t i = 0; i < q.size(); ++i) w(static_cast<Eigen::Index>(i)) = std::sqrt(q.points[i].weight);
  return w;
}

FitResult solve_fit(const Eigen::MatrixXd& R, const Eigen::VectorXd& t, const Eigen::VectorXd& sw, double alpha,
                    const mesh::WallQuadraturePtr& q) {
  if (!(alpha >= 0)) throw std::invalid_argument("regularization alpha must be nonnegative");
  const auto nq = R.rows(), n = R.cols();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nq + n, n);
  A.topRows(nq) = sw.asDiagonal() * R;
  A.bottomRows(n) = std::sqrt(alpha) * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nq + n);
  rhs.head(nq) = sw.asDiagonal() * t;
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  if (alpha == 0.0 && qr.rank() < n)
    throw std::invalid_argument("Gram system is singular at alpha = 0; use alpha > 0");
  FitResult f;
  f.coefficients = qr.solve(rhs);
  f.fitted = fem::WallProfile{"fitted", R * f.coefficients, q};
  const double tn = (sw.asDiagonal() * t).norm();
  const double rn = (sw.asDiagonal() * (f.fitted.values - t)).norm();
  f.residual = tn > 0 ? rn / tn : rn;
  return f;
}

}  // namespace

DeformationBasis DeformationBasis::prefix(int n) const {
  if (n < 0 || n > size()) throw std::out_of_range("basis prefix larger than the basis");
  DeformationBasis b;
  b.fields.assign(fields.begin(), fields.begin() + n);
  b.names.assign(names.begin(), names.begin() + n);
  return b;
}

DeformationBasis fourier_basis(const geometry::DomainPtr& domain, int n) {
  return interleave(domain, n, [&](const Component& c, int j) { return component_mode(*domain, c, j); });
}

DeformationBasis bump_basis(const geometry::DomainPtr& domain, int n, double width) {
  if (!(width > 0 && width < 1)) throw std::invalid_argument("bump width fraction must lie in (0, 1)");
  return interleave(domain, n, [&](const Component& c, int j) {
    const double L = c.arc >= 0 ? domain->arc_length(c.loop, c.arc) : domain->curve(c.loop).length();
    const double s0 = c.arc >= 0 ? domain->arc_start_arclength(c.loop, c.arc) : 0.0;
    const double w = width * L;
    const double centre = c.arc >= 0 ? s0 + 0.5 * w + (L - w) * corput(j) : s0 + L * corput(j);
    return geometry::bump_mode(*domain, c.loop, centre, w);
  });
}

DeformationBasis make_basis(const geometry::DomainPtr& domain, const std::string& kind, int n) {
  if (kind == "fourier") return fourier_basis(domain, n);
  if (kind == "bump") return bump_basis(domain, n);
  throw std::invalid_argument("unknown basis kind '" + kind + "' (expected fourier or bump)");
}

double basis_independence(const DeformationBasis& basis, const mesh::WallQuadraturePtr& q) {
  const int n = basis.size();
  Eigen::MatrixXd V(static_cast<Eigen::Index>(q->size()), n);
  for (int i = 0; i < n; ++i)
    for (std::size_t k = 0; k < q->size(); ++k)
      V(static_cast<Eigen::Index>(k), i) = basis.fields[static_cast<std::size_t>(i)].normal_speed(q->points[k].loop, q->points[k].u);
  const Eigen::MatrixXd SV = sqrt_weights(*q).asDiagonal() * V;
  Eigen::MatrixXd G = SV.transpose() * SV;
  const Eigen::VectorXd d = G.diagonal().cwiseSqrt().cwiseInverse();
  G = d.asDiagonal() * G * d.asDiagonal();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues()(0);
}

GramSystem GramSystem::prefix(int n) const {
  if (n < 1 || n > size()) throw std::out_of_range("Gram prefix out of range");
  return GramSystem{R.leftCols(n), G.topLeftCorner(n, n), quad};
}

fem::WallProfile GramSystem::column(int i) const { return {"response_" + std::to_string(i), R.col(i), quad}; }

GramSystem assemble_response(const ops::Linearization& lin, const DeformationBasis& basis, int threads) {
  const auto& q = lin.flow_case().quad;
  GramSystem s;
  s.quad = q;
  s.R.resize(static_cast<Eigen::Index>(q->size()), basis.size());
  detail::parallel_for(basis.size(), threads,
                       [&](int i) { s.R.col(i) = lin.apply(basis.fields[static_cast<std::size_t>(i)]).values; });
  const Eigen::MatrixXd SR = sqrt_weights(*q).asDiagonal() * s.R;
  s.G = SR.transpose() * SR;
  return s;
}

FitResult fit_target(const GramSystem& sys, const fem::WallProfile& target, double alpha) {
  if (target.quad != sys.quad) throw std::invalid_argument("target lives on a different quadrature");
  return solve_fit(sys.R, target.values, sqrt_weights(*sys.quad), alpha, sys.quad);
}

FitResult fit_target_projected(const GramSystem& sys, const fem::WallProfile& target, double alpha,
                               const std::vector<fem::WallProfile>& kernel) {
  if (target.quad != sys.quad) throw std::invalid_argument("target lives on a different quadrature");
  Eigen::VectorXd w(static_cast<Eigen::Index>(sys.quad->size()));
  for (std::size_t i = 0; i < sys.quad->size(); ++i) w(static_cast<Eigen::Index>(i)) = sys.quad->points[i].weight;
  Eigen::MatrixXd R = sys.R;
  Eigen::VectorXd t = target.values;
  for (const auto& k : kernel) {
    if (k.quad != sys.quad) throw std::invalid_argument("kernel vector lives on a different quadrature");
    const Eigen::VectorXd wk = w.cwiseProduct(k.values);
    R -= k.values * (wk.transpose() * R);
    t -= k.values * wk.dot(t);
  }
  return solve_fit(R, t, w.cwiseSqrt(), alpha, sys.quad);
}

std::vector<fem::WallProfile> transfer_kernel(const std::vector<fem::WallProfile>& kernel,
                                              const mesh::WallQuadraturePtr& target) {
  std::vector<fem::WallProfile> out;
  for (const auto& k : kernel) {
    const auto& src = *k.quad;
    // Source samples per loop, sorted by arclength.
    std::map<int, std::vector<std::pair<double, double>>> by_loop;
    for (std::size_t i = 0; i < src.size(); ++i)
      by_loop[src.points[i].loop].emplace_back(src.points[i].s, k.values(static_cast<Eigen::Index>(i)));
    for (auto& [loop, v] : by_loop) std::sort(v.begin(), v.end());
    auto p = fem::make_profile(k.name, target, [&](const mesh::WallPoint& x) {
      auto it = by_loop.find(x.loop);
      if (it == by_loop.end() || it->second.empty()) return 0.0;
      const auto& v = it->second;
      auto hi = std::lower_bound(v.begin(), v.end(), std::make_pair(x.s, -HUGE_VAL));
      if (hi == v.begin()) return v.front().second;
      if (hi == v.end()) return v.back().second;
      const auto lo = hi - 1;
      const double a = (x.s - lo->first) / (hi->first - lo->first);
      return (1 - a) * lo->second + a * hi->second;
    });
    for (const auto& e : out) p = p - e * fem::wall_inner_product(p, e);
    const double n = fem::wall_norm(p);
    if (n > 1e-8 * std::max(1.0, fem::wall_norm(k))) out.push_back(p * (1.0 / n));
  }
  return out;
}

std::vector<StudyRow> residual_study(const GramSystem& sys, const fem::WallProfile& target,
                                     const std::vector<int>& n_list, const std::vector<double>& alpha_list,
                                     const std::vector<fem::WallProfile>& kernel) {
  std::vector<StudyRow> rows;
  for (double a : alpha_list)
    for (int n : n_list) {
      const GramSystem sub = sys.prefix(n);
      StudyRow r;
      r.n = n;
      r.alpha = a;
      r.residual_raw = fit_target(sub, target, a).residual;
      r.residual_projected = kernel.empty() ? r.residual_raw : fit_target_projected(sub, target, a, kernel).residual;
      rows.push_back(r);
    }
  return rows;
}

bool columns_monotone(const std::vector<StudyRow>& rows, double tol) {
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].alpha != rows[i - 1].alpha || rows[i].n <= rows[i - 1].n) continue;
    if (rows[i].residual_raw > rows[i - 1].residual_raw + tol) return false;
    if (rows[i].residual_projected > rows[i - 1].residual_projected + tol) return false;
  }
  return true;
}

namespace {

void require_wall_loop(const mesh::WallQuadrature& q, int loop) {
  for (const auto& p : q.points)
    if (p.loop == loop) return;
  throw std::invalid_argument("target loop " + std::to_string(loop) + " carries no wall quadrature");
}

}  // namespace

fem::WallProfile gaussian_target(const geometry::Domain& domain, const mesh::WallQuadraturePtr& q, int loop,
                                 double center, double width) {
  if (!(width > 0)) throw std::invalid_argument("target width must be positive");
  require_wall_loop(*q, loop);
  const double L = domain.curve(loop).length();
  const bool periodic = domain.is_full_wall_loop(loop);
  return fem::make_profile("gaussian", q, [&](const mesh::WallPoint& p) {
    if (p.loop != loop) return 0.0;
    double dist = std::abs(p.s - center);
    if (periodic) dist = std::min(dist, L - dist);
    return std::exp(-(dist / width) * (dist / width));
  });
}

fem::WallProfile mode_target(const geometry::Domain& domain, const mesh::WallQuadraturePtr& q, int loop, int k) {
  require_wall_loop(*q, loop);
  const double L = domain.curve(loop).length();
  return fem::make_profile("mode_" + std::to_string(k), q, [&](const mesh::WallPoint& p) {
    return p.loop == loop ? std::cos(2 * std::numbers::pi * k * p.s / L) : 0.0;
  });
}

void write_study_csv(const std::vector<StudyRow>& rows, std::ostream& out) {
  out << "N,alpha,residual_raw,residual_projected\n";
  out.precision(10);
  for (const auto& r : rows) out << r.n << ',' << r.alpha << ',' << r.residual_raw << ',' << r.residual_projected << '\n';
}

void write_coefficients_csv(const FitResult& fit, const DeformationBasis& basis, std::ostream& out) {
  out << "index,name,coefficient\n";
  out.precision(12);
  for (Eigen::Index i = 0; i < fit.coefficients.size(); ++i)
    out << i << ',' << (static_cast<int>(i) < basis.size() ? basis.names[static_cast<std::size_t>(i)] : "") << ','
        << fit.coefficients(i) << '\n';
}

}  // namespace shapecalc::control
