#include <doctest.h>

#include <cmath>
#include <numbers>

#include "neckflow/error.hpp"
#include "neckflow/soliton.hpp"

using namespace neckflow;

TEST_CASE("soliton satisfies its graph ODE") {
  for (double c : {0.5, 1.0, 3.0}) {
    const auto sol = solve_soliton(c, 4.0 / c);
    const auto res = soliton_residual(sol);
    std::size_t checked = 0;
    for (double r : res) {
      if (std::isnan(r)) continue;
      CHECK(std::abs(r) < 1e-8);
      ++checked;
    }
    CAPTURE(c);
    CHECK(checked > res.size() / 2);
  }
}

TEST_CASE("tip mean curvature equals the speed") {
  for (double c : {0.25, 1.0, 4.0}) {
    const auto sol = solve_soliton(c, 2.0 / c);
    const auto& p = sol.samples;
    CHECK(p.front().x == 0.0);
    CHECK(p.front().y == 0.0);
    CHECK(p.front().H == c);
    CHECK(soliton_mean_curvature(std::numbers::pi / 2.0, c) == c);

    // Fourth-order differences across the tip with the mirror image
    // x(-s) = x(s), y(-s) = -y(s). Both principal curvatures equal the
    // meridian curvature there, so H = 2 x''(0) y'(0).
    const double h = sol.spacing;
    const double xpp = (32.0 * p[1].x - 2.0 * p[2].x) / (12.0 * h * h);
    const double yp = (16.0 * p[1].y - 2.0 * p[2].y) / (12.0 * h);
    CAPTURE(c);
    CHECK(std::abs(2.0 * xpp * yp - c) < 1e-4 * c);
  }
}

TEST_CASE("mean curvature along the curve is c sin(beta)") {
  const auto sol = solve_soliton(1.5, 3.0);
  for (const auto& s : sol.samples) CHECK(s.H == doctest::Approx(1.5 * std::sin(s.beta)).epsilon(1e-15));
}

TEST_CASE("speed c is the unit soliton scaled by 1/c") {
  const auto unit = solve_soliton(1.0, 6.0);
  for (double c : {0.5, 2.0, 5.0}) {
    const auto sol = solve_soliton(c, 6.0 / c);
    const std::size_t m = std::min(unit.samples.size(), sol.samples.size());
    REQUIRE(m > 100);
    for (std::size_t k = 0; k < m; ++k) {
      CHECK(std::abs(c * sol.samples[k].x - unit.samples[k].x) < 1e-7);
      CHECK(std::abs(c * sol.samples[k].y - unit.samples[k].y) < 1e-7);
    }
  }
}

TEST_CASE("arclength parametrisation and tip series") {
  const auto sol = solve_soliton(1.0, 3.0);
  for (std::size_t k = 1; k < sol.samples.size(); ++k) {
    const auto& a = sol.samples[k - 1];
    const auto& b = sol.samples[k];
    CHECK(b.s - a.s == doctest::Approx(sol.spacing).epsilon(1e-12));
    CHECK(std::hypot(b.x - a.x, b.y - a.y) <= sol.spacing * (1.0 + 1e-12));
    CHECK(b.y > a.y);
  }
  for (std::size_t k = 1; k < 6; ++k) {
    const auto& p = sol.samples[k];
    CHECK(p.x == doctest::Approx(soliton_tip_series(1.0, p.y)).epsilon(1e-6));
  }
  CHECK(sol.samples.back().x >= 3.0);
}

TEST_CASE("translated soliton moves its tip with speed c") {
  const auto sol = solve_soliton(2.0, 1.0);
  const auto snap = translate_snapshot(sol, 0.3);
  CHECK(snap.x.front() == doctest::Approx(0.6));
  CHECK(snap.y.front() == 0.0);
}

TEST_CASE("bad soliton arguments are domain errors") {
  CHECK_THROWS_AS(solve_soliton(0.0, 1.0), Error);
  CHECK_THROWS_AS(solve_soliton(1.0, -1.0), Error);
  CHECK_THROWS_AS(solve_soliton(1.0, 1.0, 0.0), Error);
}
