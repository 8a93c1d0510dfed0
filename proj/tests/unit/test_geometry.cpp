#include "doctest.h"

#include "shapecalc/geometry.hpp"

#include <cmath>
#include <numbers>

using namespace shapecalc;
using namespace shapecalc::geometry;

TEST_CASE("circle: normal, curvature and length") {
  Circle c(Vec2(1.0, -0.5), 2.0);
  for (double u : {0.0, 0.7, 2.5, 5.9}) {
    const Vec2 radial = (c.point(u) - Vec2(1.0, -0.5)).normalized();
    CHECK((c.normal(u) - radial).norm() < 1e-14);
    CHECK(c.curvature(u) == doctest::Approx(0.5).epsilon(1e-12));
  }
  CHECK(c.length() == doctest::Approx(4 * std::numbers::pi).epsilon(1e-10));
  CHECK(c.signed_area() == doctest::Approx(4 * std::numbers::pi).epsilon(1e-6));

  Circle hole(Vec2::Zero(), 1.0, false);
  CHECK(hole.signed_area() < 0);
  CHECK(hole.curvature(0.3) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("ellipse: arclength matches a fine polygon") {
  Ellipse e(Vec2::Zero(), 2.0, 1.0);
  double poly = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i)
    poly += (e.point(e.period() * (i + 1) / n) - e.point(e.period() * i / n)).norm();
  CHECK(e.length() == doctest::Approx(poly).epsilon(1e-8));
  const double s = 0.37 * e.length();
  CHECK(e.arclength(e.param_at_arclength(s)) == doctest::Approx(s).epsilon(1e-10));
}

TEST_CASE("star curve: derivatives agree with central differences") {
  StarCurve sc(Vec2::Zero(), 1.5, {{2, 0.15, 0.0}, {3, 0.0, 0.1}});
  CHECK(sc.is_simple());
  const double h = 1e-5;
  for (double u : {0.1, 1.3, 4.0}) {
    const Vec2 d1 = (sc.point(u + h) - sc.point(u - h)) / (2 * h);
    const Vec2 d2 = (sc.d1(u + h) - sc.d1(u - h)) / (2 * h);
    CHECK((d1 - sc.d1(u)).norm() < 1e-8);
    CHECK((d2 - sc.d2(u)).norm() < 1e-7);
  }
  CHECK_THROWS_AS(StarCurve(Vec2::Zero(), 0.1, {{2, 0.5, 0.0}}), GeometryError);
}

TEST_CASE("periodic spline: C2 at knots and interpolating") {
  std::vector<Vec2> pts;
  for (int i = 0; i < 9; ++i) {
    const double a = 2 * std::numbers::pi * i / 9;
    pts.emplace_back((1.2 + 0.2 * std::cos(3 * a)) * std::cos(a), (1.0 + 0.1 * std::sin(2 * a)) * std::sin(a));
  }
  PeriodicSpline sp(pts);
  CHECK(sp.knot_continuity_defect() < 1e-10);
  for (std::size_t i = 0; i < pts.size(); ++i) CHECK((sp.point(sp.knots()[i]) - pts[i]).norm() < 1e-12);
  CHECK(sp.signed_area() > 0);
  CHECK_THROWS_AS(PeriodicSpline({Vec2(0, 0), Vec2(1, 0), Vec2(1, 1)}), GeometryError);
}

TEST_CASE("domain: annulus partition and arc lookup") {
  auto d = make_annulus(1.0, 2.0);
  REQUIRE(d->num_loops() == 2);
  CHECK(d->label_at(0, 1.0) == BoundaryLabel::Wall);
  CHECK(d->label_at(1, 1.0) == BoundaryLabel::Inflow);
  CHECK(d->is_full_wall_loop(0));
  CHECK(d->wall_length() == doctest::Approx(4 * std::numbers::pi).epsilon(1e-10));
  CHECK_THROWS_AS(make_annulus(2.0, 1.0), GeometryError);
}

TEST_CASE("domain: single loop with mixed labels") {
  auto curve = std::make_shared<Circle>(Vec2::Zero(), 1.0);
  auto d = make_single_loop(curve, {0.0, 0.25, 0.5, 0.75},
                            {BoundaryLabel::Inflow, BoundaryLabel::Wall, BoundaryLabel::Inflow, BoundaryLabel::Wall});
  CHECK(d->loop(0).arcs.size() == 4);
  const double q = 2 * std::numbers::pi / 4;
  CHECK(d->arc_at(0, 0.1) == 0);
  CHECK(d->arc_at(0, q + 0.1) == 1);
  CHECK(d->offset_in_arc(0, 1, q + 0.1) == doctest::Approx(0.1));
  CHECK(d->arc_length(0, 1) == doctest::Approx(q).epsilon(1e-10));
  CHECK_FALSE(d->is_full_wall_loop(0));
  CHECK_THROWS_AS(make_single_loop(curve, {0.0}, {BoundaryLabel::Wall}), GeometryError);
}

TEST_CASE("boundary data: ramps are C2 smoothsteps, walls must be constant") {
  auto curve = std::make_shared<Circle>(Vec2::Zero(), 1.0);
  auto d = make_single_loop(curve, {0.0, 0.5}, {BoundaryLabel::Inflow, BoundaryLabel::Wall});
  BoundaryData g(d, {{BoundaryData::ramp(0.0, 2.0), BoundaryData::constant(2.0)}});
  CHECK(g.value(0, 0.0) == doctest::Approx(0.0));
  CHECK(g.value(0, 0.5 * std::numbers::pi) == doctest::Approx(1.0));
  CHECK(g.value(0, 4.0) == doctest::Approx(2.0));
  CHECK(g.scaled(3.0).value(0, 4.0) == doctest::Approx(6.0));
  CHECK_THROWS_AS(BoundaryData(d, {{BoundaryData::constant(0.0), BoundaryData::ramp(0.0, 1.0)}}), GeometryError);
}

TEST_CASE("wall functions: support checks and arclength derivatives") {
  auto d = make_annulus(1.0, 2.0);
  CHECK_THROWS_AS(uniform_mode(*d, 1), GeometryError);
  WallFunction f(d, {{0.5, fourier_mode(*d, 0, 2, false)}, {1.0, uniform_mode(*d, 0)}});
  // s = 2u on the outer circle.
  const double u = 0.4;
  CHECK(f.value(0, u) == doctest::Approx(1.0 + 0.5 * std::cos(2 * 2 * std::numbers::pi * 2 * u / (4 * std::numbers::pi))));
  const double h = 1e-6;
  CHECK(f.derivative_arclength(0, u) == doctest::Approx((f.value(0, u + h) - f.value(0, u - h)) / (4 * h)).epsilon(1e-6));
  CHECK(f.value(1, 0.3) == 0.0);
  CHECK((2.0 * f).value(0, u) == doctest::Approx(2 * f.value(0, u)));

  auto curve = std::make_shared<Circle>(Vec2::Zero(), 1.0);
  auto part = make_single_loop(curve, {0.0, 0.5}, {BoundaryLabel::Inflow, BoundaryLabel::Wall});
  auto w = windowed_mode(*part, 0, 1, 2);
  const double a = part->arc_start_arclength(0, 1), len = part->arc_length(0, 1);
  CHECK(w->value(a) == doctest::Approx(0.0));
  CHECK(w->value(a + len) == doctest::Approx(0.0));
  CHECK(w->value(a + 0.5 * len) == doctest::Approx(-1.0));
  CHECK_THROWS_AS(fourier_mode(*part, 0, 1, false), GeometryError);
  CHECK_THROWS_AS(bump_mode(*part, 0, 0.2, 0.5), GeometryError);
}

TEST_CASE("deformation field: displacement is v_n times the outward normal") {
  auto d = make_annulus(1.0, 2.0);
  auto V = make_deformation(d, uniform_mode(*d, 0), 0.3);
  const Vec2 x = V.displacement(0, 1.1);
  CHECK((x - 0.3 * Vec2(std::cos(1.1), std::sin(1.1))).norm() < 1e-14);
  CHECK(V.displacement(1, 0.5).norm() == 0.0);
  CHECK(zero_deformation(d).is_zero());
}
