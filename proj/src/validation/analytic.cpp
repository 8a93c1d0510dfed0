#include "shapecalc/validation.hpp"

#include <cmath>
#include <sstream>

namespace shapecalc::validation {

ScalarFunction constant_function(double c) {
  return {[c](const Vec2&) { return c; }, [](const Vec2&) { return Vec2::Zero().eval(); },
          [](const Vec2&) { return Mat2::Zero().eval(); }};
}

ScalarFunction polynomial_function(const std::array<double, 8>& k) {
  ScalarFunction f;
  f.value = [k](const Vec2& p) {
    const double x = p.x(), y = p.y();
    return k[0] + k[1] * x + k[2] * y + k[3] * x * x + k[4] * x * y + k[5] * y * y + k[6] * x * x * x + k[7] * y * y * y;
  };
  f.gradient = [k](const Vec2& p) {
    const double x = p.x(), y = p.y();
    return Vec2(k[1] + 2 * k[3] * x + k[4] * y + 3 * k[6] * x * x, k[2] + k[4] * x + 2 * k[5] * y + 3 * k[7] * y * y);
  };
  f.hessian = [k](const Vec2& p) {
    Mat2 h;
    h << 2 * k[3] + 6 * k[6] * p.x(), k[4], k[4], 2 * k[5] + 6 * k[7] * p.y();
    return h;
  };
  return f;
}

ScalarFunction sum(const ScalarFunction& a, const ScalarFunction& b) {
  return {[a, b](const Vec2& x) { return a.value(x) + b.value(x); },
          [a, b](const Vec2& x) { return (a.gradient(x) + b.gradient(x)).eval(); },
          [a, b](const Vec2& x) { return (a.hessian(x) + b.hessian(x)).eval(); }};
}

namespace {

class ZeroField final : public AnalyticField {
 public:
  Vec2 value(const Vec2&) const override { return Vec2::Zero(); }
  Mat2 jacobian(const Vec2&) const override { return Mat2::Zero(); }
  Mat2 hessian(const Vec2&, int) const override { return Mat2::Zero(); }
  std::string describe() const override { return "zero"; }
};

class RotationField final : public AnalyticField {
 public:
  RotationField(double eps, Vec2 c) : eps_(eps), c_(c) {}
  Vec2 value(const Vec2& x) const override { return eps_ * Vec2(-(x.y() - c_.y()), x.x() - c_.x()); }
  Mat2 jacobian(const Vec2&) const override {
    Mat2 j;
    j << 0, -eps_, eps_, 0;
    return j;
  }
  Mat2 hessian(const Vec2&, int) const override { return Mat2::Zero(); }
  std::string describe() const override {
    std::ostringstream os;
    os << "rotation(eps=" << eps_ << ")";
    return os.str();
  }

 private:
  double eps_;
  Vec2 c_;
};

class RadialStretch final : public AnalyticField {
 public:
  explicit RadialStretch(double r0) : r0_(r0) {}
  Vec2 value(const Vec2& x) const override { return x * (1.0 - r0_ / x.norm()); }
  Mat2 jacobian(const Vec2& x) const override {
    const double r = x.norm();
    return Mat2::Identity() - r0_ * (Mat2::Identity() / r - x * x.transpose() / (r * r * r));
  }
  Mat2 hessian(const Vec2& x, int k) const override {
    // Hessian of x_k / r, scaled by -r0.
    const double r = x.norm(), r3 = r * r * r, r5 = r3 * r * r;
    Mat2 h;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        h(i, j) = -((k == i) * x(j) + (k == j) * x(i) + (i == j) * x(k)) / r3 + 3 * x(i) * x(j) * x(k) / r5;
    return -r0_ * h;
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "radial_stretch(r0=" << r0_ << ")";
    return os.str();
  }

 private:
  double r0_;
};

class WaveField final : public AnalyticField {
 public:
  WaveField(double eps, Vec2 a, Vec2 b) : eps_(eps), a_(a), b_(b) {}
  Vec2 value(const Vec2& x) const override { return eps_ * Vec2(std::sin(a_.dot(x)), std::cos(b_.dot(x))); }
  Mat2 jacobian(const Vec2& x) const override {
    Mat2 j;
    j.row(0) = eps_ * std::cos(a_.dot(x)) * a_.transpose();
    j.row(1) = -eps_ * std::sin(b_.dot(x)) * b_.transpose();
    return j;
  }
  Mat2 hessian(const Vec2& x, int k) const override {
    if (k == 0) return -eps_ * std::sin(a_.dot(x)) * a_ * a_.transpose();
    return -eps_ * std::cos(b_.dot(x)) * b_ * b_.transpose();
  }
  std::string describe() const override {
    std::ostringstream os;
    os << "wave(eps=" << eps_ << ")";
    return os.str();
  }

 private:
  double eps_;
  Vec2 a_, b_;
};

}  // namespace

AnalyticFieldPtr zero_field() { return std::make_shared<ZeroField>(); }
AnalyticFieldPtr rotation_field(double eps, Vec2 centre) { return std::make_shared<RotationField>(eps, centre); }
AnalyticFieldPtr radial_stretch_field(double r_fixed) { return std::make_shared<RadialStretch>(r_fixed); }
AnalyticFieldPtr wave_field(double eps, Vec2 a, Vec2 b) { return std::make_shared<WaveField>(eps, a, b); }

}  // namespace shapecalc::validation
