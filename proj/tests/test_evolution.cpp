#include <doctest.h>

#include <cmath>
#include <cstring>

#include "neckflow/error.hpp"
#include "neckflow/evolution.hpp"
#include "neckflow/geometry.hpp"

using namespace neckflow;

namespace {

StepControl quick() {
  StepControl c;
  c.safety = 0.4;
  return c;
}

// Full runs of subcritical dumbbells are slow (nodes crowd at the poles),
// so most cases stop once the outcome is certain.
StepControl early() {
  StepControl c = quick();
  c.stop_when_convex = true;
  c.stop_when_neck_opens = true;
  return c;
}

double symmetry_defect(const ProfileCurve& c) {
  double d = 0.0;
  const std::size_t n = c.size();
  for (std::size_t i = 0; i < n; ++i) {
    d = std::max(d, std::abs(c.S[i] + c.S[n - 1 - i]));
    d = std::max(d, std::abs(c.R[i] - c.R[n - 1 - i]));
  }
  return d;
}

}  // namespace

TEST_CASE("one step of the unit sphere follows dr/dt = -2/r") {
  const auto c = cassini_profile(CassiniShape::from_lambda(0.0), 200);
  const auto r = step(c, StepControl{});
  const double h = c.dtheta();
  // dt = safety * min(g_min h^2, 1/|A|^2, R_neck^2) with g = 1, |A|^2 = 2.
  CHECK(r.dt_used == doctest::Approx(0.1 * std::min(h * h, 0.5)).epsilon(1e-6));
  CHECK(r.curve.t == r.dt_used);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double rad = std::hypot(r.curve.S[i], r.curve.R[i]);
    CHECK(rad == doctest::Approx(1.0 - 2.0 * r.dt_used).epsilon(1e-8));
  }
}

TEST_CASE("sphere shrinks to a point at t = 1/4") {
  StepControl c;
  c.snapshot_dt = 0.01;
  const auto res = evolve(CassiniShape::from_lambda(0.0), 100, c);
  CHECK(res.report.outcome == Outcome::ShrinksRound);
  CHECK(res.report.T_est == doctest::Approx(0.25).epsilon(0.01));
  double dev = 0.0;
  for (const auto& s : res.snapshots) {
    if (s.t > 0.2) continue;
    for (std::size_t i = 0; i < s.size(); ++i) {
      dev = std::max(dev, std::abs(s.S[i] * s.S[i] + s.R[i] * s.R[i] - (1.0 - 4.0 * s.t)));
    }
  }
  CHECK(dev < 5e-3);
}

TEST_CASE("flow preserves reflection symmetry and decreases area") {
  for (auto [lambda, c] : {std::pair{0.5, quick()}, {0.85, early()}, {0.96, quick()}}) {
    c.snapshot_dt = 0.002;
    const auto res = evolve(CassiniShape::from_lambda(lambda), 120, c);
    CAPTURE(lambda);
    REQUIRE(res.snapshots.size() > 5);
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& s : res.snapshots) {
      CHECK(symmetry_defect(s) < 1e-9);
      const double area = integral_quantities(s).area;
      CHECK(area < prev);
      prev = area;
    }
  }
}

TEST_CASE("convex and dumbbell data classify as expected") {
  CHECK(evolve(CassiniShape::from_lambda(0.5), 100, quick()).report.outcome == Outcome::ShrinksRound);
  CHECK(evolve(CassiniShape::from_lambda(0.7071), 100, quick()).report.outcome ==
        Outcome::ShrinksRound);
  const auto pinch = evolve(CassiniShape::from_lambda(0.96), 200, quick());
  CHECK(pinch.report.outcome == Outcome::CentralNeckpinch);
  REQUIRE(pinch.report.pinch_location.has_value());
  CHECK(std::abs(*pinch.report.pinch_location) < 0.05);
}

TEST_CASE("trace records are ordered and consistent") {
  const auto res = evolve(CassiniShape::from_lambda(0.9), 100, early());
  const auto& r = res.trace.records;
  REQUIRE(r.size() > 2);
  for (std::size_t k = 1; k < r.size(); ++k) CHECK(r[k].t > r[k - 1].t);
  for (const auto& x : r) {
    CHECK(x.R_min <= x.R_max);
    CHECK(x.dt > 0.0);
  }
}

TEST_CASE("early stops agree with full runs on the outcome") {
  for (double lambda : {0.6, 0.75, 0.96}) {
    const auto a = evolve(CassiniShape::from_lambda(lambda), 100, early());
    const auto b = evolve(CassiniShape::from_lambda(lambda), 100, quick());
    CAPTURE(lambda);
    CHECK(a.report.outcome == b.report.outcome);
    CHECK(a.report.steps <= b.report.steps);
  }
}

TEST_CASE("identical runs are bitwise identical") {
  const auto a = evolve(CassiniShape::from_lambda(0.9), 80, early());
  const auto b = evolve(CassiniShape::from_lambda(0.9), 80, early());
  REQUIRE(a.trace.records.size() == b.trace.records.size());
  CHECK(std::memcmp(a.final_curve.S.data(), b.final_curve.S.data(), 80 * sizeof(double)) == 0);
  CHECK(std::memcmp(a.final_curve.R.data(), b.final_curve.R.data(), 80 * sizeof(double)) == 0);
  CHECK(a.report.T_est == b.report.T_est);
}

TEST_CASE("serial backend reproduces the OpenMP run") {
  StepControl s = quick();
  s.backend = kernels::Backend::Serial;
  const auto a = evolve(CassiniShape::from_lambda(0.95), 80, quick());
  const auto b = evolve(CassiniShape::from_lambda(0.95), 80, s);
  CHECK(a.report.steps == b.report.steps);
  CHECK(std::memcmp(a.final_curve.R.data(), b.final_curve.R.data(), 80 * sizeof(double)) == 0);
}

TEST_CASE("termination limits") {
  StepControl c = quick();
  c.max_steps = 10;
  CHECK(evolve(CassiniShape::from_lambda(0.9), 80, c).report.outcome == Outcome::StepLimit);
  c = quick();
  c.dt_min = 1.0;
  CHECK(evolve(CassiniShape::from_lambda(0.9), 80, c).report.outcome == Outcome::NumericalFailure);
  c = quick();
  c.a2_cap = 10.0;
  CHECK(evolve(CassiniShape::from_lambda(0.0), 80, c).report.outcome == Outcome::CurvatureBlowup);

  auto curve = cassini_profile(CassiniShape::from_lambda(0.5), 40);
  c = quick();
  c.dt_min = 1.0;
  CHECK_THROWS_AS(step(curve, c), Error);
}

TEST_CASE("invalid controls name the field") {
  StepControl c;
  c.safety = 0.0;
  try {
    c.validate();
    FAIL("expected a Domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
    CHECK(std::string(e.what()).find("safety") != std::string::npos);
  }
  const auto s = StepControl::for_scale(2.0);
  CHECK(s.eps_pinch == doctest::Approx(2e-3));
  CHECK(s.a2_cap == doctest::Approx(1e8 / 4.0));
}

TEST_CASE("pole curvature extrapolation on the sphere") {
  const auto c = cassini_profile(CassiniShape::from_lambda(0.0), 400);
  CHECK(pole_mean_curvature(c, Pole::Left) == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(pole_mean_curvature(c, Pole::Right) == doctest::Approx(2.0).epsilon(1e-4));
}

TEST_CASE("neck sits at the waist of a dumbbell") {
  const auto c = cassini_profile(CassiniShape::from_lambda(0.9), 200);
  const auto neck = find_neck(c);
  CHECK((neck.index == 99 || neck.index == 100));
  CHECK(neck.radius == doctest::Approx(std::sqrt(1.0 - 0.81)).epsilon(1e-3));
}

TEST_CASE("outcome names round trip") {
  for (auto o : {Outcome::ShrinksRound, Outcome::CentralNeckpinch, Outcome::CurvatureBlowup,
                 Outcome::StepLimit, Outcome::NumericalFailure}) {
    CHECK(outcome_from_string(to_string(o)) == o);
  }
}
