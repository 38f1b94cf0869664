#include <doctest.h>

#include <cmath>
#include <numbers>

#include "neckflow/error.hpp"
#include "neckflow/geometry.hpp"

using namespace neckflow;
constexpr double pi = std::numbers::pi;

TEST_CASE("unit sphere profile has unit curvatures") {
  const auto c = cassini_profile(CassiniShape::from_lambda(0.0), 400);
  const auto f = curvatures(c);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c.S[i] * c.S[i] + c.R[i] * c.R[i] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.kappa_u[i] == doctest::Approx(1.0).epsilon(1e-4));
    CHECK(f.kappa_phi[i] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(f.H[i] == doctest::Approx(2.0).epsilon(1e-4));
  }
  CHECK(is_convex(f));
}

TEST_CASE("sphere integrals and extinction bounds") {
  const auto c = cassini_profile(CassiniShape::from_lambda(0.0), 800);
  const auto q = integral_quantities(c);
  CHECK(q.area == doctest::Approx(4.0 * pi).epsilon(1e-5));
  CHECK(q.volume == doctest::Approx(4.0 * pi / 3.0).epsilon(1e-5));
  CHECK(q.diameter == doctest::Approx(2.0).epsilon(1e-5));
  const auto b = extinction_bounds(c);
  // 2 V^2 / A^2 = 2/9 and diam^2 / 16 = 1/4 for the unit sphere.
  CHECK(b.t_lower == doctest::Approx(2.0 / 9.0).epsilon(1e-5));
  CHECK(b.t_upper == doctest::Approx(0.25).epsilon(1e-5));
}

TEST_CASE("Cassini waist curvatures match the implicit-curve formula") {
  // At x = 0 the implicit curvature F_xx / F_y gives
  // kappa_u = (b^2 - 2 a^2) / (y0 b^2), y0 = sqrt(b^2 - a^2).
  for (double lambda : {0.3, 0.6, 0.8, 0.9, 0.96}) {
    const auto shape = CassiniShape::from_lambda(lambda);
    const std::size_t n = 2000;
    const auto c = cassini_profile(shape, n);
    const auto f = curvatures(c);
    const double a = shape.a, b = shape.b;
    const double y0 = std::sqrt(b * b - a * a);
    // The waist lies between the two middle nodes; average them.
    const double ku = 0.5 * (f.kappa_u[n / 2 - 1] + f.kappa_u[n / 2]);
    const double kp = 0.5 * (f.kappa_phi[n / 2 - 1] + f.kappa_phi[n / 2]);
    const double r = 0.5 * (c.R[n / 2 - 1] + c.R[n / 2]);
    CAPTURE(lambda);
    CHECK(r == doctest::Approx(y0).epsilon(1e-4));
    CHECK(ku == doctest::Approx((b * b - 2.0 * a * a) / (y0 * b * b)).epsilon(2e-3));
    CHECK(kp == doctest::Approx(1.0 / y0).epsilon(1e-4));
  }
}

TEST_CASE("convexity threshold at lambda = 1/sqrt(2)") {
  CHECK(is_convex(curvatures(cassini_profile(CassiniShape::from_lambda(0.70), 400))));
  CHECK_FALSE(is_convex(curvatures(cassini_profile(CassiniShape::from_lambda(0.72), 400))));
}

TEST_CASE("Cassini volume matches the closed-form integral") {
  // y^2 = sqrt(b^4 + 4 a^2 x^2) - x^2 - a^2, integrated in closed form.
  for (double lambda : {0.5, 0.9, 0.96}) {
    const auto shape = CassiniShape::from_lambda(lambda);
    const double a = shape.a, b = shape.b, xm = shape.x_max();
    auto prim = [&](double x) {
      const double q = std::sqrt(b * b * b * b + 4.0 * a * a * x * x);
      return 0.5 * x * q + b * b * b * b / (4.0 * a) * std::asinh(2.0 * a * x / (b * b)) -
             x * x * x / 3.0 - a * a * x;
    };
    const double v_exact = pi * (prim(xm) - prim(-xm));
    const auto q = integral_quantities(cassini_profile(shape, 2000));
    CAPTURE(lambda);
    CHECK(q.volume == doctest::Approx(v_exact).epsilon(1e-5));
  }
}

TEST_CASE("Cassini profile lies on the quartic") {
  const auto shape = CassiniShape::from_lambda(0.9);
  for (double r : cassini_residual(shape, cassini_profile(shape, 300))) CHECK(std::abs(r) < 1e-12);
}

TEST_CASE("profile is reflection symmetric") {
  const auto c = cassini_profile(CassiniShape::from_lambda(0.93), 501);
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(c.S[i] == doctest::Approx(-c.S[c.size() - 1 - i]).epsilon(1e-14));
    CHECK(c.R[i] == doctest::Approx(c.R[c.size() - 1 - i]).epsilon(1e-14));
  }
}

TEST_CASE("scaling multiplies curvature by 1/s and time by s^2") {
  const auto c = cassini_profile(CassiniShape::from_lambda(0.8), 200);
  const auto s = scaled(c, 2.0);
  const auto f = curvatures(c), g = curvatures(s);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(g.H[i] == doctest::Approx(0.5 * f.H[i]));
  const auto big = cassini_profile(CassiniShape::from_lambda(0.8, 2.0), 200);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(big.R[i] == doctest::Approx(s.R[i]));
}

TEST_CASE("invalid shapes and singular curves are rejected") {
  auto kind_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::Usage;
  };
  CHECK(kind_of([] { CassiniShape::from_lambda(1.0); }) == ErrorKind::InvalidShape);
  CHECK(kind_of([] { CassiniShape::from_lambda(-0.1); }) == ErrorKind::InvalidShape);
  CHECK(kind_of([] { CassiniShape::from_lambda(0.5, 0.0); }) == ErrorKind::InvalidShape);
  auto c = cassini_profile(CassiniShape::from_lambda(0.5), 50);
  c.R[10] = -1e-3;
  CHECK(kind_of([&] { require_regular(c); }) == ErrorKind::SingularCurve);
}
