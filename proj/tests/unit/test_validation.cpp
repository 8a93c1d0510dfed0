#include "doctest.h"

#include "shapecalc/validation.hpp"

#include <cmath>
#include <numbers>

using namespace shapecalc;
using namespace shapecalc::validation;

TEST_CASE("radial potential oracle: dS is the radius derivative of S") {
  const double h = 1e-5;
  RadialPotential o(1.0, 2.0, 0.0, 1.0);
  CHECK(o.S() == doctest::Approx(-1.0 / (2 * std::log(2.0))).epsilon(1e-14));
  const double fd = (RadialPotential(1.0, 2.0 + h, 0.0, 1.0).S() - RadialPotential(1.0, 2.0 - h, 0.0, 1.0).S()) / (2 * h);
  CHECK(o.dS() == doctest::Approx(fd).epsilon(1e-8));
  CHECK(o.psi(1.0) == doctest::Approx(0.0));
  CHECK(o.psi(2.0) == doctest::Approx(1.0));
}

TEST_CASE("radial biharmonic oracle: boundary conditions, vorticity, radius derivative") {
  RadialBiharmonic o(1.0, 2.0, 0.0, 1.0, 0.0, 0.0);
  CHECK(o.psi(1.0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(o.psi(2.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(o.dpsi(1.0)) < 1e-12);
  CHECK(std::abs(o.dpsi(2.0)) < 1e-12);
  const double h = 1e-4;
  for (double r : {1.2, 1.5, 1.9}) {
    const double d2 = (o.psi(r + h) - 2 * o.psi(r) + o.psi(r - h)) / (h * h);
    CHECK(o.omega(r) == doctest::Approx(-(d2 + o.dpsi(r) / r)).epsilon(1e-6));
    CHECK(o.domega(r) == doctest::Approx((o.omega(r + h) - o.omega(r - h)) / (2 * h)).epsilon(1e-7));
  }
  const double R = 2.0, dR = 1e-5;
  const double fd = (RadialBiharmonic(1.0, R + dR, 0.0, 1.0, 0.0, 0.0).omega(R + dR) -
                     RadialBiharmonic(1.0, R - dR, 0.0, 1.0, 0.0, 0.0).omega(R - dR)) /
                    (2 * dR);
  CHECK(o.domega_outer_dR() == doctest::Approx(fd).epsilon(1e-7));
  CHECK_THROWS(RadialBiharmonic(2.0, 1.0, 0, 1, 0, 0));
}

TEST_CASE("loglog slope") {
  const std::vector<double> t{0.1, 0.05, 0.025, 0.0125};
  std::vector<double> sq, lin;
  for (double x : t) {
    sq.push_back(3 * x * x);
    lin.push_back(0.5 * x);
  }
  CHECK(loglog_slope(t, sq) == doctest::Approx(2.0));
  CHECK(loglog_slope(t, lin) == doctest::Approx(1.0));
  CHECK(std::isnan(loglog_slope({0.1}, {1.0})));
}

TEST_CASE("analytic fields: Jacobians and Hessians match differences") {
  const double h = 1e-5;
  const Vec2 x(1.3, -0.4);
  for (const auto& f : {wave_field(0.05, Vec2(0.7, 0.4), Vec2(-0.3, 0.9)), radial_stretch_field(1.0),
                        rotation_field(0.2, Vec2(0.1, 0.2))}) {
    Mat2 J;
    for (int j = 0; j < 2; ++j) {
      const Vec2 e = Vec2::Unit(j) * h;
      J.col(j) = (f->value(x + e) - f->value(x - e)) / (2 * h);
    }
    CHECK((J - f->jacobian(x)).norm() < 1e-8);
    for (int k = 0; k < 2; ++k) {
      Mat2 H;
      for (int j = 0; j < 2; ++j) {
        const Vec2 e = Vec2::Unit(j) * h;
        H.col(j) = (f->jacobian(x + e).row(k) - f->jacobian(x - e).row(k)).transpose() / (2 * h);
      }
      CHECK((H - f->hessian(x, k)).norm() < 1e-7);
    }
  }
  CHECK(radial_stretch_field(1.0)->value(Vec2(0.6, 0.8)).norm() < 1e-15);
}

TEST_CASE("Hadamard checks on the annulus") {
  auto m = mesh::build_mesh(geometry::make_annulus(1.0, 2.0), 0.25, 1);
  // d/dt area = wall integral of the normal speed, which is 1 on r = 2 and 0 on r = 1.
  const auto area = hadamard_domain_check(*m, *radial_stretch_field(1.0), constant_function(1.0),
                                          constant_function(0.0), constant_function(1.0));
  CHECK(area.formula == doctest::Approx(4 * std::numbers::pi).epsilon(1e-8));

  const auto theta = wave_field(0.05, Vec2(0.7, 0.4), Vec2(-0.3, 0.9));
  const auto y0 = polynomial_function({1.0, 0.2, -0.1, 0.3, 0.1, -0.2, 0.05, 0.02});
  const auto y1 = polynomial_function({0.5, -0.3, 0.2, 0.0, 0.4, 0.1, 0.0, -0.03});
  const auto f = polynomial_function({0.8, 0.1, 0.3, -0.2, 0.0, 0.25, 0.01, 0.0});
  const auto dom = hadamard_domain_check(*m, *theta, y0, y1, f);
  const auto bnd = hadamard_boundary_check(*m, *theta, y0, y1, f);
  CHECK(dom.order > 1.9);
  CHECK(bnd.order > 1.9);
  CHECK(dom.residual.size() == 4);
  CHECK(pulled_back_laplacian_check(*m, *theta, y0).max_residual < 1e-10);
  CHECK(pulled_back_laplacian_check(*m, *rotation_field(0.3), f).max_residual < 1e-10);
}
