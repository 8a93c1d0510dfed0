#include "shapecalc/geometry.hpp"
#include "shapecalc/quadrature_rules.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace shapecalc::geometry {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

bool segments_cross(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
  const double d1 = cross(p2 - p1, q1 - p1);
  const double d2 = cross(p2 - p1, q2 - p1);
  const double d3 = cross(q2 - q1, p1 - q1);
  const double d4 = cross(q2 - q1, p2 - q1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

double Curve::wrap(double u) const {
  const double p = period();
  double w = std::fmod(u, p);
  if (w < 0) w += p;
  if (w >= p) w -= p;
  return w;
}

Vec2 Curve::tangent(double u) const { return d1(u).normalized(); }

Vec2 Curve::normal(double u) const {
  const Vec2 t = tangent(u);
  return {t.y(), -t.x()};
}

double Curve::curvature(double u) const {
  const Vec2 a = d1(u);
  const Vec2 b = d2(u);
  const double sp = a.norm();
  return cross(a, b) / (sp * sp * sp);
}

std::vector<double> Curve::table_breakpoints() const {
  constexpr int cells = 512;
  std::vector<double> b(cells + 1);
  for (int i = 0; i <= cells; ++i) b[static_cast<std::size_t>(i)] = period() * i / cells;
  return b;
}

double Curve::segment_length(double a, double b) const {
  const auto& gl = quad::gauss_legendre(10);
  double sum = 0.0;
  for (std::size_t q = 0; q < gl.points.size(); ++q) sum += gl.weights[q] * speed(a + (b - a) * gl.points[q]);
  return sum * (b - a);
}

void Curve::ensure_table() const {
  std::call_once(table_once_, [this] {
    table_u_ = table_breakpoints();
    table_s_.assign(table_u_.size(), 0.0);
    for (std::size_t i = 1; i < table_u_.size(); ++i)
      table_s_[i] = table_s_[i - 1] + segment_length(table_u_[i - 1], table_u_[i]);
  });
}

double Curve::length() const {
  ensure_table();
  return table_s_.back();
}

double Curve::arclength(double u) const {
  ensure_table();
  const double w = wrap(u);
  auto it = std::upper_bound(table_u_.begin(), table_u_.end(), w);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - table_u_.begin()) - 1));
  if (i >= table_u_.size() - 1) i = table_u_.size() - 2;
  return table_s_[i] + segment_length(table_u_[i], w);
}

double Curve::param_at_arclength(double s) const {
  ensure_table();
  const double L = table_s_.back();
  double w = std::fmod(s, L);
  if (w < 0) w += L;
  auto it = std::upper_bound(table_s_.begin(), table_s_.end(), w);
  std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - table_s_.begin()) - 1));
  if (i >= table_s_.size() - 1) i = table_s_.size() - 2;
  const double ua = table_u_[i], ub = table_u_[i + 1];
  // Newton from linear interpolation inside the cell.
  double u = ua + (ub - ua) * (w - table_s_[i]) / (table_s_[i + 1] - table_s_[i]);
  for (int it2 = 0; it2 < 30; ++it2) {
    const double f = table_s_[i] + segment_length(ua, u) - w;
    const double du = f / speed(u);
    u = std::clamp(u - du, ua, ub);
    if (std::abs(du) < 1e-15 * std::max(1.0, period())) break;
  }
  return u;
}

double Curve::signed_area() const {
  // Green's theorem, 0.5 * closed integral of (x y' - y x') du.
  const int cells = 256;
  const auto& gl = quad::gauss_legendre(8);
  double area = 0.0;
  const double h = period() / cells;
  for (int c = 0; c < cells; ++c) {
    for (std::size_t q = 0; q < gl.points.size(); ++q) {
      const double u = (c + gl.points[q]) * h;
      area += gl.weights[q] * h * cross(point(u), d1(u));
    }
  }
  return 0.5 * area;
}

bool Curve::is_simple(int samples) const {
  std::vector<Vec2> p(static_cast<std::size_t>(samples));
  for (int i = 0; i < samples; ++i) p[static_cast<std::size_t>(i)] = point(period() * i / samples);
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(p[i], p[(i + 1) % n], p[j], p[(j + 1) % n])) return false;
    }
  }
  return true;
}

// --- Circle ------------------------------------------------------------------

Circle::Circle(Vec2 center, double radius, bool counterclockwise)
    : center_(std::move(center)), radius_(radius), sign_(counterclockwise ? 1.0 : -1.0) {
  if (!(radius > 0)) throw GeometryError("circle radius must be positive");
}
double Circle::period() const { return kTwoPi; }
Vec2 Circle::point(double u) const { return center_ + radius_ * Vec2(std::cos(u), sign_ * std::sin(u)); }
Vec2 Circle::d1(double u) const { return radius_ * Vec2(-std::sin(u), sign_ * std::cos(u)); }
Vec2 Circle::d2(double u) const { return radius_ * Vec2(-std::cos(u), -sign_ * std::sin(u)); }
std::string Circle::describe() const {
  std::ostringstream os;
  os << "circle(r=" << radius_ << (sign_ > 0 ? ", ccw)" : ", cw)");
  return os.str();
}

// --- Ellipse -----------------------------------------------------------------

Ellipse::Ellipse(Vec2 center, double a, double b, bool counterclockwise)
    : center_(std::move(center)), a_(a), b_(b), sign_(counterclockwise ? 1.0 : -1.0) {
  if (!(a > 0 && b > 0)) throw GeometryError("ellipse semi-axes must be positive");
}
double Ellipse::period() const { return kTwoPi; }
Vec2 Ellipse::point(double u) const { return center_ + Vec2(a_ * std::cos(u), sign_ * b_ * std::sin(u)); }
Vec2 Ellipse::d1(double u) const { return {-a_ * std::sin(u), sign_ * b_ * std::cos(u)}; }
Vec2 Ellipse::d2(double u) const { return {-a_ * std::cos(u), -sign_ * b_ * std::sin(u)}; }
std::string Ellipse::describe() const {
  std::ostringstream os;
  os << "ellipse(a=" << a_ << ", b=" << b_ << (sign_ > 0 ? ", ccw)" : ", cw)");
  return os.str();
}

// --- StarCurve ---------------------------------------------------------------

StarCurve::StarCurve(Vec2 center, double r0, std::vector<Mode> modes, bool counterclockwise)
    : center_(std::move(center)), r0_(r0), modes_(std::move(modes)), sign_(counterclockwise ? 1.0 : -1.0) {
  for (int i = 0; i < 720; ++i) {
    double r, dr, ddr;
    radius(kTwoPi * i / 720, r, dr, ddr);
    if (!(r > 0)) throw GeometryError("star curve radius must stay positive");
  }
}

void StarCurve::radius(double phi, double& r, double& dr, double& ddr) const {
  r = r0_;
  dr = 0.0;
  ddr = 0.0;
  for (const auto& m : modes_) {
    const double c = std::cos(m.k * phi), s = std::sin(m.k * phi);
    r += m.a * c + m.b * s;
    dr += m.k * (-m.a * s + m.b * c);
    ddr += -m.k * m.k * (m.a * c + m.b * s);
  }
}

double StarCurve::period() const { return kTwoPi; }

Vec2 StarCurve::point(double u) const {
  const double phi = sign_ * u;
  double r, dr, ddr;
  radius(phi, r, dr, ddr);
  return center_ + r * Vec2(std::cos(phi), std::sin(phi));
}

Vec2 StarCurve::d1(double u) const {
  const double phi = sign_ * u;
  double r, dr, ddr;
  radius(phi, r, dr, ddr);
  const Vec2 e(std::cos(phi), std::sin(phi)), p(-std::sin(phi), std::cos(phi));
  return sign_ * (dr * e + r * p);
}

Vec2 StarCurve::d2(double u) const {
  const double phi = sign_ * u;
  double r, dr, ddr;
  radius(phi, r, dr, ddr);
  const Vec2 e(std::cos(phi), std::sin(phi)), p(-std::sin(phi), std::cos(phi));
  return (ddr - r) * e + 2.0 * dr * p;
}

std::string StarCurve::describe() const {
  std::ostringstream os;
  os << "star(r0=" << r0_ << ", modes=" << modes_.size() << (sign_ > 0 ? ", ccw)" : ", cw)");
  return os.str();
}

// --- PeriodicSpline ----------------------------------------------------------

PeriodicSpline::PeriodicSpline(std::vector<Vec2> control_points) : points_(std::move(control_points)) {
  const int n = static_cast<int>(points_.size());
  if (n < 4) throw GeometryError("periodic spline needs at least 4 control points");
  knots_.assign(static_cast<std::size_t>(n + 1), 0.0);
  for (int i = 0; i < n; ++i) {
    const double h = (points_[static_cast<std::size_t>((i + 1) % n)] - points_[static_cast<std::size_t>(i)]).norm();
    if (!(h > 0)) throw GeometryError("periodic spline has repeated consecutive control points");
    knots_[static_cast<std::size_t>(i + 1)] = knots_[static_cast<std::size_t>(i)] + h;
  }

  // Cyclic tridiagonal system for second derivatives, one per coordinate.
  auto h = [&](int i) {
    const int j = ((i % n) + n) % n;
    return knots_[static_cast<std::size_t>(j + 1)] - knots_[static_cast<std::size_t>(j)];
  };
  auto pt = [&](int i) -> const Vec2& { return points_[static_cast<std::size_t>(((i % n) + n) % n)]; };
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::MatrixXd rhs(n, 2);
  for (int i = 0; i < n; ++i) {
    const double hm = h(i - 1), hp = h(i);
    trip.emplace_back(i, (i - 1 + n) % n, hm);
    trip.emplace_back(i, i, 2.0 * (hm + hp));
    trip.emplace_back(i, (i + 1) % n, hp);
    const Vec2 r = 6.0 * ((pt(i + 1) - pt(i)) / hp - (pt(i) - pt(i - 1)) / hm);
    rhs(i, 0) = r.x();
    rhs(i, 1) = r.y();
  }
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(A);
  if (lu.info() != Eigen::Success) throw GeometryError("periodic spline system is singular");
  const Eigen::MatrixXd m = lu.solve(rhs);
  second_.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) second_[static_cast<std::size_t>(i)] = Vec2(m(i, 0), m(i, 1));
}

double PeriodicSpline::period() const { return knots_.back(); }

int PeriodicSpline::segment(double u) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
  int i = static_cast<int>(it - knots_.begin()) - 1;
  return std::clamp(i, 0, static_cast<int>(points_.size()) - 1);
}

Vec2 PeriodicSpline::eval_side(int seg, double u, int derivative) const {
  const int n = static_cast<int>(points_.size());
  const auto i = static_cast<std::size_t>(seg);
  const auto j = static_cast<std::size_t>((seg + 1) % n);
  const double h = knots_[i + 1] - knots_[i];
  const double A = (knots_[i + 1] - u) / h;
  const double B = (u - knots_[i]) / h;
  const Vec2& yi = points_[i];
  const Vec2& yj = points_[j];
  const Vec2& Mi = second_[i];
  const Vec2& Mj = second_[j];
  switch (derivative) {
    case 0:
      return A * yi + B * yj + ((A * A * A - A) * Mi + (B * B * B - B) * Mj) * (h * h / 6.0);
    case 1:
      return (yj - yi) / h - (3.0 * A * A - 1.0) / 6.0 * h * Mi + (3.0 * B * B - 1.0) / 6.0 * h * Mj;
    default:
      return A * Mi + B * Mj;
  }
}

Vec2 PeriodicSpline::eval(int seg, double u, int derivative) const { return eval_side(seg, u, derivative); }

Vec2 PeriodicSpline::point(double u) const {
  const double w = wrap(u);
  return eval(segment(w), w, 0);
}
Vec2 PeriodicSpline::d1(double u) const {
  const double w = wrap(u);
  return eval(segment(w), w, 1);
}
Vec2 PeriodicSpline::d2(double u) const {
  const double w = wrap(u);
  return eval(segment(w), w, 2);
}

double PeriodicSpline::knot_continuity_defect() const {
  const int n = static_cast<int>(points_.size());
  double defect = 0.0;
  for (int i = 0; i < n; ++i) {
    const int prev = (i - 1 + n) % n;
    const double u_left = knots_[static_cast<std::size_t>(prev + 1)];
    const double u_right = knots_[static_cast<std::size_t>(i)];
    for (int d = 0; d <= 2; ++d) {
      const Vec2 left = eval_side(prev, u_left, d);
      const Vec2 right = eval_side(i, u_right, d);
      defect = std::max(defect, (left - right).norm());
    }
  }
  return defect;
}

std::vector<double> PeriodicSpline::table_breakpoints() const {
  std::vector<double> b;
  const int sub = 8;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
    for (int k = 0; k < sub; ++k) b.push_back(knots_[i] + (knots_[i + 1] - knots_[i]) * k / sub);
  b.push_back(knots_.back());
  return b;
}

std::string PeriodicSpline::describe() const {
  std::ostringstream os;
  os << "spline(points=" << points_.size() << ")";
  return os.str();
}

}  // namespace shapecalc::geometry
