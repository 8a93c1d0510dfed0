#include "shapecalc/fem.hpp"

#include <iomanip>
#include <ostream>

namespace shapecalc::fem {

namespace {

void require_same(const WallProfile& a, const WallProfile& b) {
  if (a.quad != b.quad || a.values.size() != b.values.size())
    throw SolverError("wall profiles '" + a.name + "' and '" + b.name + "' use different quadratures");
}

}  // namespace

WallProfile WallProfile::operator+(const WallProfile& o) const {
  require_same(*this, o);
  return {name, values + o.values, quad};
}

WallProfile WallProfile::operator-(const WallProfile& o) const {
  require_same(*this, o);
  return {name, values - o.values, quad};
}

WallProfile WallProfile::operator*(double f) const { return {name, values * f, quad}; }

WallProfile make_profile(std::string name, const mesh::WallQuadraturePtr& q,
                         const std::function<double(const mesh::WallPoint&)>& fn) {
  WallProfile p{std::move(name), Eigen::VectorXd(static_cast<Eigen::Index>(q->size())), q};
  for (std::size_t i = 0; i < q->size(); ++i) p.values(static_cast<Eigen::Index>(i)) = fn(q->points[i]);
  return p;
}

double wall_inner_product(const WallProfile& a, const WallProfile& b) {
  require_same(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.quad->size(); ++i)
    s += a.quad->points[i].weight * a.values(static_cast<Eigen::Index>(i)) * b.values(static_cast<Eigen::Index>(i));
  return s;
}

double wall_norm(const WallProfile& a) { return std::sqrt(std::max(0.0, wall_inner_product(a, a))); }

void write_field_csv(const ScalarField& f, std::ostream& out) {
  out << "node,x,y," << f.name << "\n" << std::setprecision(17);
  for (int i = 0; i < f.values.size(); ++i) {
    const auto& x = f.space->point(i);
    out << i << ',' << x.x() << ',' << x.y() << ',' << f.values(i) << '\n';
  }
}

void write_profile_csv(const WallProfile& p, std::ostream& out) { write_profiles_csv({p}, out); }

void write_profiles_csv(const std::vector<WallProfile>& ps, std::ostream& out) {
  if (ps.empty()) return;
  const auto& q = *ps.front().quad;
  out << "loop,s";
  for (const auto& p : ps) {
    require_same(ps.front(), p);
    out << ',' << p.name;
  }
  out << '\n' << std::setprecision(17);
  for (std::size_t i = 0; i < q.size(); ++i) {
    out << q.points[i].loop << ',' << q.points[i].s;
    for (const auto& p : ps) out << ',' << p.values(static_cast<Eigen::Index>(i));
    out << '\n';
  }
}

}  // namespace shapecalc::fem
