#include "shapecalc/validation.hpp"

#include "../common/parallel.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace shapecalc::validation {

namespace {

void require_reference(const ops::FlowCase& c, const mesh::MeshDeformer& d) {
  if (d.reference().get() != c.disc->mesh_ptr().get())
    throw std::invalid_argument("mesh deformer was built for a different reference mesh");
}

ops::FlowCase case_on(const ops::FlowCase& c, mesh::TriMeshPtr m) {
  return ops::FlowCase{c.kind, c.g, std::make_shared<fem::Discretization>(std::move(m), c.disc->degree()), c.quad};
}

}  // namespace

ops::FlowCase deformed_case(const ops::FlowCase& c, const mesh::MeshDeformer& deformer,
                            const geometry::DeformationField& V, double t) {
  require_reference(c, deformer);
  return case_on(c, deformer.deform(V, t));
}

double loglog_slope(const std::vector<double>& t, const std::vector<double>& v) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < t.size() && i < v.size(); ++i) {
    if (!(t[i] > 0 && v[i] > 0)) continue;
    const double x = std::log(t[i]), y = std::log(v[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TaylorReport taylor_test(const ops::Linearization& lin, const mesh::MeshDeformer& deformer,
                         const geometry::DeformationField& V, const TaylorOptions& opts) {
  const auto& c = lin.flow_case();
  require_reference(c, deformer);
  for (std::size_t i = 0; i < opts.t_list.size(); ++i) {
    if (!(opts.t_list[i] > 0)) throw std::invalid_argument("Taylor step sizes must be positive");
    if (i > 0 && !(opts.t_list[i] < opts.t_list[i - 1]))
      throw std::invalid_argument("Taylor step sizes must be strictly decreasing");
  }
  TaylorReport rep;
  rep.op = c.kind == ops::FlowKind::Potential ? "dS_p" : "dS_s";
  const fem::WallProfile dS = lin.apply(V);
  const fem::WallProfile& S0 = lin.base().S;
  rep.dS_norm = fem::wall_norm(dS);
  const auto theta = deformer.extend(V);

  const int n = static_cast<int>(opts.t_list.size());
  std::vector<std::optional<double>> rem(static_cast<std::size_t>(n));
  std::vector<std::string> why(static_cast<std::size_t>(n));
  detail::parallel_for(n, opts.threads, [&](int i) {
    const double t = opts.t_list[static_cast<std::size_t>(i)];
    mesh::TriMeshPtr m;
    try {
      m = deformer.deform(theta, t);
    } catch (const mesh::MeshError& e) {
      why[static_cast<std::size_t>(i)] = e.what();
      return;
    }
    const fem::WallProfile St = ops::eval_S(case_on(c, m));
    rem[static_cast<std::size_t>(i)] = fem::wall_norm(St - S0 - dS * t);
  });
  for (int i = 0; i < n; ++i) {
    const double t = opts.t_list[static_cast<std::size_t>(i)];
    if (rem[static_cast<std::size_t>(i)]) {
      rep.t.push_back(t);
      rep.remainder.push_back(*rem[static_cast<std::size_t>(i)]);
    } else {
      rep.dropped.push_back(t);
      std::ostringstream os;
      os << "dropped t = " << t << ": " << why[static_cast<std::size_t>(i)];
      rep.warnings.push_back(os.str());
    }
  }
  rep.exact = !rep.remainder.empty();
  for (double r : rep.remainder) rep.exact = rep.exact && r == 0.0;
  rep.slope = rep.exact ? std::numeric_limits<double>::quiet_NaN() : loglog_slope(rep.t, rep.remainder);
  return rep;
}

fem::WallProfile fd_oracle(const ops::FlowCase& c, const mesh::MeshDeformer& deformer,
                           const geometry::DeformationField& V, double t) {
  if (!(t > 0)) throw std::invalid_argument("finite-difference step must be positive");
  const fem::WallProfile plus = ops::eval_S(deformed_case(c, deformer, V, t));
  const fem::WallProfile minus = ops::eval_S(deformed_case(c, deformer, V, -t));
  fem::WallProfile out = (plus - minus) * (0.5 / t);
  out.name = "fd_" + std::string(c.kind == ops::FlowKind::Potential ? "dS_p" : "dS_s");
  return out;
}

void write_taylor_csv(const TaylorReport& r, std::ostream& out) {
  out << "t,remainder\n";
  out.precision(12);
  for (std::size_t i = 0; i < r.t.size(); ++i) out << r.t[i] << ',' << r.remainder[i] << '\n';
}

}  // namespace shapecalc::validation
