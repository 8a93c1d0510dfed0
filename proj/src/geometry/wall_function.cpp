#include "shapecalc/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace shapecalc::geometry {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_len(double s, double L) {
  double w = std::fmod(s, L);
  if (w < 0) w += L;
  return w;
}

class UniformMode final : public WallMode {
 public:
  explicit UniformMode(int loop) : loop_(loop) {}
  int loop() const override { return loop_; }
  double value(double) const override { return 1.0; }
  double derivative(double) const override { return 0.0; }
  std::string describe() const override { return "uniform(loop=" + std::to_string(loop_) + ")"; }

 private:
  int loop_;
};

class FourierMode final : public WallMode {
 public:
  FourierMode(int loop, double length, int k, bool sine) : loop_(loop), L_(length), k_(k), sine_(sine) {}
  int loop() const override { return loop_; }
  double value(double s) const override {
    const double a = 2.0 * kPi * k_ * s / L_;
    return sine_ ? std::sin(a) : std::cos(a);
  }
  double derivative(double s) const override {
    const double w = 2.0 * kPi * k_ / L_;
    return sine_ ? w * std::cos(w * s) : -w * std::sin(w * s);
  }
  std::string describe() const override {
    return std::string(sine_ ? "sin" : "cos") + "(k=" + std::to_string(k_) + ", loop=" + std::to_string(loop_) + ")";
  }

 private:
  int loop_;
  double L_;
  int k_;
  bool sine_;
};

// Base for modes living on a window [s0, s0 + len] of a loop of length L.
class WindowedBase : public WallMode {
 public:
  WindowedBase(int loop, double loop_length, double s0, double len)
      : loop_(loop), L_(loop_length), s0_(s0), len_(len) {}
  int loop() const override { return loop_; }
  double value(double s) const override {
    const double x = local(s);
    return x < 0 ? 0.0 : shape(x);
  }
  double derivative(double s) const override {
    const double x = local(s);
    return x < 0 ? 0.0 : shape_dx(x) / len_;
  }

 protected:
  virtual double shape(double x) const = 0;
  virtual double shape_dx(double x) const = 0;
  double local(double s) const {
    const double d = wrap_len(s - s0_, L_);
    return d <= len_ ? d / len_ : -1.0;
  }
  int loop_;
  double L_, s0_, len_;
};

class SinWindowMode final : public WindowedBase {
 public:
  SinWindowMode(int loop, double L, double s0, double len, int k) : WindowedBase(loop, L, s0, len), k_(k) {}
  std::string describe() const override {
    std::ostringstream os;
    os << "window(k=" << k_ << ", loop=" << loop_ << ", s0=" << s0_ << ", len=" << len_ << ")";
    return os.str();
  }

 protected:
  double shape(double x) const override {
    const double s = std::sin(kPi * x);
    return s * s * std::cos(k_ * kPi * x);
  }
  double shape_dx(double x) const override {
    const double s = std::sin(kPi * x), c = std::cos(kPi * x);
    return 2.0 * kPi * s * c * std::cos(k_ * kPi * x) - s * s * k_ * kPi * std::sin(k_ * kPi * x);
  }

 private:
  int k_;
};

class BumpMode final : public WindowedBase {
 public:
  BumpMode(int loop, double L, double center, double width)
      : WindowedBase(loop, L, wrap_len(center - 0.5 * width, L), width), center_(center) {}
  std::string describe() const override {
    std::ostringstream os;
    os << "bump(loop=" << loop_ << ", center=" << center_ << ", width=" << len_ << ")";
    return os.str();
  }

 protected:
  double shape(double x) const override {
    const double xi = 2.0 * x - 1.0;
    const double q = 1.0 - xi * xi;
    return q * q * q;
  }
  double shape_dx(double x) const override {
    const double xi = 2.0 * x - 1.0;
    const double q = 1.0 - xi * xi;
    return 3.0 * q * q * (-2.0 * xi) * 2.0;
  }

 private:
  double center_;
};

// Cubic spline in arclength; periodic, or clamped with zero end slopes.
class SplineMode final : public WallMode {
 public:
  SplineMode(int loop, double L, bool periodic, double s0, std::vector<double> x, std::vector<double> y)
      : loop_(loop), L_(L), periodic_(periodic), s0_(s0), x_(std::move(x)), y_(std::move(y)) {
    const int n = static_cast<int>(x_.size());
    if (periodic_) {
      // Append the wrap-around node so segment lookup is uniform.
      x_.push_back(x_.front() + L_);
      y_.push_back(y_.front());
    }
    const int m = static_cast<int>(x_.size());
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    auto h = [&](int i) { return x_[static_cast<std::size_t>(i + 1)] - x_[static_cast<std::size_t>(i)]; };
    auto yv = [&](int i) { return y_[static_cast<std::size_t>(i)]; };
    for (int i = 1; i < m - 1; ++i) {
      A(i, i - 1) = h(i - 1);
      A(i, i) = 2.0 * (h(i - 1) + h(i));
      A(i, i + 1) = h(i);
      b(i) = 6.0 * ((yv(i + 1) - yv(i)) / h(i) - (yv(i) - yv(i - 1)) / h(i - 1));
    }
    if (periodic_) {
      // M_0 = M_{m-1}; slope continuity at the wrap node.
      A(0, 0) = 1.0;
      A(0, m - 1) = -1.0;
      const double h0 = h(0), hl = h(m - 2);
      A(m - 1, 0) = 2.0 * h0;
      A(m - 1, 1) = h0;
      A(m - 1, m - 2) = hl;
      A(m - 1, m - 1) = 2.0 * hl;
      b(m - 1) = 6.0 * ((yv(1) - yv(0)) / h0 - (yv(m - 1) - yv(m - 2)) / hl);
    } else {
      A(0, 0) = 2.0 * h(0);
      A(0, 1) = h(0);
      b(0) = 6.0 * (yv(1) - yv(0)) / h(0);
      A(m - 1, m - 2) = h(m - 2);
      A(m - 1, m - 1) = 2.0 * h(m - 2);
      b(m - 1) = -6.0 * (yv(m - 1) - yv(m - 2)) / h(m - 2);
    }
    (void)n;
    const Eigen::VectorXd M = A.fullPivLu().solve(b);
    M_.assign(M.data(), M.data() + M.size());
  }
  int loop() const override { return loop_; }
  double value(double s) const override { return eval(s, false); }
  double derivative(double s) const override { return eval(s, true); }
  std::string describe() const override {
    return "sampled(loop=" + std::to_string(loop_) + ", n=" + std::to_string(y_.size()) + ")";
  }

 private:
  double eval(double s, bool deriv) const {
    double t;
    if (periodic_) {
      t = x_.front() + wrap_len(s - x_.front(), L_);
    } else {
      t = s0_ + wrap_len(s - s0_, L_);
      if (t < x_.front() || t > x_.back()) return 0.0;
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t i = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - x_.begin()) - 1));
    i = std::min(i, x_.size() - 2);
    const double h = x_[i + 1] - x_[i];
    const double A = (x_[i + 1] - t) / h, B = (t - x_[i]) / h;
    if (deriv)
      return (y_[i + 1] - y_[i]) / h - (3 * A * A - 1) / 6.0 * h * M_[i] + (3 * B * B - 1) / 6.0 * h * M_[i + 1];
    return A * y_[i] + B * y_[i + 1] + ((A * A * A - A) * M_[i] + (B * B * B - B) * M_[i + 1]) * h * h / 6.0;
  }

  int loop_;
  double L_;
  bool periodic_;
  double s0_;
  std::vector<double> x_, y_, M_;
};

void require_loop(const Domain& d, int loop) {
  if (loop < 0 || loop >= d.num_loops()) throw GeometryError("loop index " + std::to_string(loop) + " out of range");
}

void require_full_wall(const Domain& d, int loop) {
  require_loop(d, loop);
  if (!d.is_full_wall_loop(loop))
    throw GeometryError("mode needs a loop that is entirely wall; loop " + std::to_string(loop) +
                        " has inflow arcs (support would overlap an inflow arc)");
}

void require_wall_arc(const Domain& d, int loop, int arc) {
  require_loop(d, loop);
  if (arc < 0 || arc >= static_cast<int>(d.loop(loop).arcs.size()))
    throw GeometryError("arc index " + std::to_string(arc) + " out of range on loop " + std::to_string(loop));
  if (d.loop(loop).arcs[static_cast<std::size_t>(arc)].label != BoundaryLabel::Wall)
    throw GeometryError("arc " + std::to_string(arc) + " of loop " + std::to_string(loop) +
                        " is an inflow arc; deformation support must lie inside a wall arc");
}

}  // namespace

WallModePtr uniform_mode(const Domain& domain, int loop) {
  require_full_wall(domain, loop);
  return std::make_shared<UniformMode>(loop);
}

WallModePtr fourier_mode(const Domain& domain, int loop, int k, bool sine) {
  require_full_wall(domain, loop);
  if (k < 0) throw GeometryError("Fourier wavenumber must be nonnegative");
  if (k == 0 && sine) throw GeometryError("sin mode with k = 0 vanishes identically");
  return std::make_shared<FourierMode>(loop, domain.curve(loop).length(), k, sine);
}

WallModePtr windowed_mode(const Domain& domain, int loop, int arc, int k) {
  require_wall_arc(domain, loop, arc);
  if (k < 0) throw GeometryError("window wavenumber must be nonnegative");
  return std::make_shared<SinWindowMode>(loop, domain.curve(loop).length(), domain.arc_start_arclength(loop, arc),
                                         domain.arc_length(loop, arc), k);
}

WallModePtr bump_mode(const Domain& domain, int loop, double center, double width) {
  require_loop(domain, loop);
  const Curve& c = domain.curve(loop);
  const double L = c.length();
  if (!(width > 0) || width >= L) throw GeometryError("bump width must lie in (0, loop length)");
  if (!domain.is_full_wall_loop(loop)) {
    // Support must sit inside one wall arc, endpoints included.
    const double lo = center - 0.5 * width;
    const int arc = domain.arc_at(loop, c.param_at_arclength(center));
    for (int i = 0; i <= 64; ++i) {
      const double s = lo + width * i / 64.0;
      const double u = c.param_at_arclength(s);
      if (domain.label_at(loop, u) != BoundaryLabel::Wall || domain.arc_at(loop, u) != arc) {
        std::ostringstream os;
        os << "bump support [" << lo << ", " << lo + width << "] overlaps an inflow arc at arclength " << s;
        throw GeometryError(os.str());
      }
    }
  }
  return std::make_shared<BumpMode>(loop, L, center, width);
}

WallModePtr sampled_mode(const Domain& domain, int loop, int arc, std::vector<double> s, std::vector<double> values) {
  require_loop(domain, loop);
  if (s.size() != values.size() || s.size() < 4) throw GeometryError("sampled mode needs >= 4 (s, value) pairs");
  for (std::size_t i = 1; i < s.size(); ++i)
    if (!(s[i] > s[i - 1])) throw GeometryError("sampled mode arclengths must be increasing");
  const double L = domain.curve(loop).length();
  if (domain.is_full_wall_loop(loop)) {
    if (s.back() - s.front() >= L) throw GeometryError("sampled mode spans more than one loop length");
    return std::make_shared<SplineMode>(loop, L, true, 0.0, std::move(s), std::move(values));
  }
  require_wall_arc(domain, loop, arc);
  const double s0 = domain.arc_start_arclength(loop, arc);
  const double len = domain.arc_length(loop, arc);
  if (s.front() < s0 - 1e-12 || s.back() > s0 + len + 1e-12)
    throw GeometryError("sampled mode support leaves its wall arc");
  if (std::abs(values.front()) > 0 || std::abs(values.back()) > 0)
    throw GeometryError("sampled mode on a partial wall arc must vanish at both ends");
  return std::make_shared<SplineMode>(loop, L, false, s0, std::move(s), std::move(values));
}

// --- WallFunction ------------------------------------------------------------

WallFunction::WallFunction(DomainPtr domain, std::vector<Term> terms)
    : domain_(std::move(domain)), terms_(std::move(terms)) {
  for (const auto& t : terms_) {
    if (!t.mode) throw GeometryError("wall function term without mode");
    require_loop(*domain_, t.mode->loop());
  }
}

double WallFunction::value(int loop, double u) const {
  if (terms_.empty() || domain_->label_at(loop, u) != BoundaryLabel::Wall) return 0.0;
  double s = -1.0, v = 0.0;
  for (const auto& t : terms_) {
    if (t.mode->loop() != loop) continue;
    if (s < 0) s = domain_->curve(loop).arclength(u);
    v += t.coefficient * t.mode->value(s);
  }
  return v;
}

double WallFunction::derivative_arclength(int loop, double u) const {
  if (terms_.empty() || domain_->label_at(loop, u) != BoundaryLabel::Wall) return 0.0;
  double s = -1.0, v = 0.0;
  for (const auto& t : terms_) {
    if (t.mode->loop() != loop) continue;
    if (s < 0) s = domain_->curve(loop).arclength(u);
    v += t.coefficient * t.mode->derivative(s);
  }
  return v;
}

bool WallFunction::is_zero() const {
  for (const auto& t : terms_)
    if (t.coefficient != 0.0) return false;
  return true;
}

WallFunction WallFunction::operator+(const WallFunction& other) const {
  if (domain_ && other.domain_ && domain_ != other.domain_)
    throw GeometryError("cannot add wall functions on different domains");
  std::vector<Term> t = terms_;
  t.insert(t.end(), other.terms_.begin(), other.terms_.end());
  return WallFunction(domain_ ? domain_ : other.domain_, std::move(t));
}

WallFunction WallFunction::operator*(double factor) const {
  std::vector<Term> t = terms_;
  for (auto& term : t) term.coefficient *= factor;
  WallFunction out;
  out.domain_ = domain_;
  out.terms_ = std::move(t);
  return out;
}

Vec2 DeformationField::displacement(int loop, double u) const {
  const double vn = vn_.value(loop, u);
  if (vn == 0.0) return Vec2::Zero();
  return vn * vn_.domain()->curve(loop).normal(u);
}

DeformationField make_deformation(const DomainPtr& domain, const WallModePtr& mode, double scale) {
  return DeformationField(WallFunction(domain, {{scale, mode}}));
}

DeformationField zero_deformation(const DomainPtr& domain) { return DeformationField(WallFunction(domain, {})); }

}  // namespace shapecalc::geometry
