#pragma once

#include <Eigen/Dense>

#include <functional>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace shapecalc {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Raised for invalid geometric input (bad curves, partitions, deformation supports).
class GeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shapecalc

namespace shapecalc::geometry {

/// A closed, periodic, regular parametric curve u -> gamma(u), u in [0, period()).
///
/// The parameter is not required to be arclength; arclength is tabulated on
/// demand. Orientation convention: the domain lies to the left of the
/// direction of travel, so the outward normal is (gamma2', -gamma1')/|gamma'|
/// and the unit tangent tau = (-n2, n1) is the direction of travel. Curvature
/// is signed w.r.t. the outward normal (positive where the domain is convex).
class Curve {
 public:
  virtual ~Curve() = default;

  virtual double period() const = 0;
  virtual Vec2 point(double u) const = 0;
  virtual Vec2 d1(double u) const = 0;
  virtual Vec2 d2(double u) const = 0;
  virtual std::string describe() const = 0;

  double wrap(double u) const;
  double speed(double u) const { return d1(u).norm(); }
  Vec2 tangent(double u) const;
  Vec2 normal(double u) const;
  double curvature(double u) const;

  /// Arclength from u = 0 to u (u is wrapped into [0, period)).
  double arclength(double u) const;
  double length() const;
  /// Inverse of arclength(); s is wrapped into [0, length()).
  double param_at_arclength(double s) const;

  /// Signed area enclosed by the curve (positive for counterclockwise).
  double signed_area() const;

  /// True if a polygon sampled with `samples` points has no crossing segments.
  bool is_simple(int samples = 512) const;

 protected:
  /// Parameter breakpoints used for the arclength table; overridden by
  /// piecewise curves so that table cells never straddle a knot.
  virtual std::vector<double> table_breakpoints() const;

 private:
  void ensure_table() const;
  double segment_length(double a, double b) const;

  mutable std::once_flag table_once_;
  mutable std::vector<double> table_u_;
  mutable std::vector<double> table_s_;
};

using CurvePtr = std::shared_ptr<const Curve>;

class Circle final : public Curve {
 public:
  Circle(Vec2 center, double radius, bool counterclockwise = true);
  double period() const override;
  Vec2 point(double u) const override;
  Vec2 d1(double u) const override;
  Vec2 d2(double u) const override;
  std::string describe() const override;

  double radius() const { return radius_; }

 private:
  Vec2 center_;
  double radius_;
  double sign_;
};

class Ellipse final : public Curve {
 public:
  Ellipse(Vec2 center, double a, double b, bool counterclockwise = true);
  double period() const override;
  Vec2 point(double u) const override;
  Vec2 d1(double u) const override;
  Vec2 d2(double u) const override;
  std::string describe() const override;

 private:
  Vec2 center_;
  double a_, b_;
  double sign_;
};

/// Star-shaped curve r(phi) = r0 + sum_k (a_k cos k phi + b_k sin k phi).
class StarCurve final : public Curve {
 public:
  struct Mode {
    int k;
    double a;
    double b;
  };
  StarCurve(Vec2 center, double r0, std::vector<Mode> modes, bool counterclockwise = true);
  double period() const override;
  Vec2 point(double u) const override;
  Vec2 d1(double u) const override;
  Vec2 d2(double u) const override;
  std::string describe() const override;

 private:
  void radius(double phi, double& r, double& dr, double& ddr) const;
  Vec2 center_;
  double r0_;
  std::vector<Mode> modes_;
  double sign_;
};

/// Closed interpolating cubic spline (C2 at every knot) through control
/// points, parameterized by cumulative chord length.
class PeriodicSpline final : public Curve {
 public:
  explicit PeriodicSpline(std::vector<Vec2> control_points);
  double period() const override;
  Vec2 point(double u) const override;
  Vec2 d1(double u) const override;
  Vec2 d2(double u) const override;
  std::string describe() const override;

  const std::vector<Vec2>& control_points() const { return points_; }
  const std::vector<double>& knots() const { return knots_; }

  /// Largest one-sided mismatch of first and second derivatives over knots.
  double knot_continuity_defect() const;

 protected:
  std::vector<double> table_breakpoints() const override;

 private:
  int segment(double u) const;
  Vec2 eval(int seg, double u, int derivative) const;
  Vec2 eval_side(int seg, double u, int derivative) const;

  std::vector<Vec2> points_;
  std::vector<double> knots_;  // size n+1, knots_[n] == period
  std::vector<Vec2> second_;   // spline second derivatives at knots
};

enum class BoundaryLabel { Inflow, Wall };

std::string to_string(BoundaryLabel label);
BoundaryLabel parse_label(const std::string& text);

/// A labeled parameter interval [u_begin, u_begin + extent) on one loop.
/// u_begin may be anywhere on the loop; the interval may wrap past period.
struct Arc {
  double u_begin = 0.0;
  double extent = 0.0;
  BoundaryLabel label = BoundaryLabel::Wall;
};

struct BoundaryLoop {
  CurvePtr curve;
  std::vector<Arc> arcs;  // consecutive, covering the full parameter range
};

/// Reference domain: the first loop is the outer boundary (counterclockwise),
/// any further loops are holes (clockwise). Immutable after construction.
class Domain {
 public:
  explicit Domain(std::vector<BoundaryLoop> loops);

  int num_loops() const { return static_cast<int>(loops_.size()); }
  const BoundaryLoop& loop(int i) const { return loops_.at(static_cast<std::size_t>(i)); }
  const Curve& curve(int i) const { return *loop(i).curve; }

  /// Index of the arc of `loop` containing parameter u.
  int arc_at(int loop, double u) const;
  BoundaryLabel label_at(int loop, double u) const;
  /// Offset of u from the start of its arc, in parameter units.
  double offset_in_arc(int loop, int arc, double u) const;
  /// True if the loop consists of a single wall arc (no junctions).
  bool is_full_wall_loop(int loop) const;
  bool has_label(BoundaryLabel label) const;
  double wall_length() const;
  /// Arclength from the start of the loop at which `arc` begins, and its length.
  double arc_start_arclength(int loop, int arc) const;
  double arc_length(int loop, int arc) const;

 private:
  std::vector<BoundaryLoop> loops_;
};

using DomainPtr = std::shared_ptr<const Domain>;

DomainPtr make_annulus(double inner_radius, double outer_radius,
                       BoundaryLabel inner = BoundaryLabel::Inflow,
                       BoundaryLabel outer = BoundaryLabel::Wall);

/// Single-loop domain with arcs given by breakpoints in normalized parameter
/// t in [0,1): arc i spans [breaks[i], breaks[i+1]) (the last one wraps).
DomainPtr make_single_loop(CurvePtr curve, const std::vector<double>& breaks,
                           const std::vector<BoundaryLabel>& labels);

/// Dirichlet data g on the boundary, given arc by arc. Wall arcs must carry a
/// constant (zero tangential derivative); inflow arcs may be constant, a C2
/// smoothstep ramp between two values, or an arbitrary function of u.
class BoundaryData {
 public:
  struct ArcData {
    enum class Kind { Constant, Ramp, Function } kind = Kind::Constant;
    double a = 0.0;
    double b = 0.0;
    std::function<double(double u)> fn;
  };

  BoundaryData() = default;
  BoundaryData(DomainPtr domain, std::vector<std::vector<ArcData>> per_loop);

  /// Same constant on every arc of every loop.
  static BoundaryData uniform(DomainPtr domain, double value);
  static ArcData constant(double c);
  static ArcData ramp(double from, double to);
  static ArcData function(std::function<double(double)> fn);

  double value(int loop, double u) const;
  BoundaryData scaled(double factor) const;
  const DomainPtr& domain() const { return domain_; }

 private:
  void validate() const;
  DomainPtr domain_;
  std::vector<std::vector<ArcData>> arcs_;
  double scale_ = 1.0;
};

/// A scalar profile shape on the wall, as a function of loop arclength s.
class WallMode {
 public:
  virtual ~WallMode() = default;
  virtual int loop() const = 0;
  virtual double value(double s) const = 0;
  virtual double derivative(double s) const = 0;
  virtual std::string describe() const = 0;
};

using WallModePtr = std::shared_ptr<const WallMode>;

/// Linear combination of wall modes; zero on inflow arcs and on loops that
/// carry no modes. Used both for normal speeds v_n and adjoint multipliers mu.
class WallFunction {
 public:
  struct Term {
    double coefficient;
    WallModePtr mode;
  };

  WallFunction() = default;
  WallFunction(DomainPtr domain, std::vector<Term> terms);

  double value(int loop, double u) const;
  double derivative_arclength(int loop, double u) const;
  bool is_zero() const;
  const std::vector<Term>& terms() const { return terms_; }
  const DomainPtr& domain() const { return domain_; }

  WallFunction operator+(const WallFunction& other) const;
  WallFunction operator*(double factor) const;

 private:
  DomainPtr domain_;
  std::vector<Term> terms_;
};

inline WallFunction operator*(double factor, const WallFunction& f) { return f * factor; }

// Mode factories. All of them check that the support lies inside a wall arc
// and throw GeometryError otherwise.
WallModePtr uniform_mode(const Domain& domain, int loop);
/// cos / sin (2 pi k s / L) on a loop that is entirely wall.
WallModePtr fourier_mode(const Domain& domain, int loop, int k, bool sine);
/// sin^2(pi x) cos(k pi x), x in [0,1] the normalized arclength on a wall arc.
WallModePtr windowed_mode(const Domain& domain, int loop, int arc, int k);
/// C2 bump (1 - xi^2)^3 of total width `width` centred at arclength `center`.
WallModePtr bump_mode(const Domain& domain, int loop, double center, double width);
/// Cubic spline through samples (arclength, value); periodic on a full wall
/// loop, clamped with zero end slope on a partial arc (end values must vanish).
WallModePtr sampled_mode(const Domain& domain, int loop, int arc,
                         std::vector<double> s, std::vector<double> values);

/// Normal deformation direction V = v_n n on the wall, V = 0 on inflow.
class DeformationField {
 public:
  DeformationField() = default;
  explicit DeformationField(WallFunction normal_speed) : vn_(std::move(normal_speed)) {}

  double normal_speed(int loop, double u) const { return vn_.value(loop, u); }
  Vec2 displacement(int loop, double u) const;
  bool is_zero() const { return vn_.is_zero(); }
  const WallFunction& normal_speed_function() const { return vn_; }

  DeformationField operator+(const DeformationField& o) const { return DeformationField(vn_ + o.vn_); }
  DeformationField operator*(double f) const { return DeformationField(vn_ * f); }

 private:
  WallFunction vn_;
};

inline DeformationField operator*(double f, const DeformationField& v) { return v * f; }

DeformationField make_deformation(const DomainPtr& domain, const WallModePtr& mode, double scale = 1.0);
DeformationField zero_deformation(const DomainPtr& domain);

}  // namespace shapecalc::geometry
