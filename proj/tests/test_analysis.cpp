#include <doctest.h>

#include <cmath>
#include <numbers>

#include "neckflow/analysis.hpp"
#include "neckflow/error.hpp"
#include "neckflow/geometry.hpp"
#include "neckflow/soliton.hpp"

using namespace neckflow;

namespace {

// H_m / 2^m from the explicit sum m! sum_k (-1)^k (2x)^(m-2k) / (k! (m-2k)!).
std::vector<double> hermite_explicit(int m) {
  std::vector<double> c(static_cast<std::size_t>(m) + 1, 0.0);
  auto fact = [](int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
  };
  for (int k = 0; 2 * k <= m; ++k) {
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    c[static_cast<std::size_t>(m - 2 * k)] =
        sign * fact(m) / (fact(k) * fact(m - 2 * k)) / std::pow(4.0, k);
  }
  return c;
}

}  // namespace

TEST_CASE("Hermite coefficients are exact") {
  CHECK(hermite(2) == std::vector<double>{-0.5, 0.0, 1.0});
  CHECK(hermite(4) == std::vector<double>{0.75, 0.0, -3.0, 0.0, 1.0});
  for (int m = 0; m <= 12; ++m) {
    const auto h = hermite(m);
    CAPTURE(m);
    CHECK(h.back() == 1.0);
    CHECK(h == hermite_explicit(m));
  }
  CHECK(hermite_eval(4, 2.0) == doctest::Approx(16.0 - 12.0 + 0.75));
  CHECK_THROWS_AS(hermite(-1), Error);
}

TEST_CASE("log-log fit recovers an exact power law") {
  std::vector<double> x, y;
  for (int i = 1; i <= 20; ++i) {
    x.push_back(0.001 * i * i);
    y.push_back(2.5 * std::pow(x.back(), -0.75));
  }
  const auto f = fit_loglog(x, y);
  CHECK(f.exponent == doctest::Approx(-0.75).epsilon(1e-12));
  CHECK(f.prefactor == doctest::Approx(2.5).epsilon(1e-12));
  CHECK(f.residual < 1e-12);
}

TEST_CASE("power-law fit in time recovers exponent and singular time") {
  const double T = 0.3, A = 0.7, p = -0.5;
  std::vector<double> t, q;
  for (int i = 0; i < 200; ++i) {
    const double tau = 1e-3 * std::pow(10.0, -3.0 * i / 199.0);
    t.push_back(T - tau);
    q.push_back(A * std::pow(tau, p));
  }
  const auto given = fit_power_law(t, q, T);
  CHECK(given.exponent == doctest::Approx(p).epsilon(1e-3));
  CHECK(given.prefactor == doctest::Approx(A).epsilon(1e-3));
  const auto refined = fit_power_law(t, q, std::nullopt);
  CHECK(refined.exponent == doctest::Approx(p).epsilon(1e-3));
  CHECK(refined.T == doctest::Approx(T).epsilon(1e-6));

  FlowTrace trace;
  for (std::size_t i = 0; i < t.size(); ++i) {
    trace.records.push_back({t[i], q[i], q[i], 0.1, 1.0, false, 1e-9, q[i]});
  }
  PowerFitWindow w;
  w.decades = 2.0;
  const auto f = fit_power(trace, TraceQuantity::H_center, T, w);
  CHECK(f.exponent == doctest::Approx(p).epsilon(1e-3));
}

TEST_CASE("profile model fits recover their amplitude") {
  std::vector<double> x;
  for (int i = 1; i <= 40; ++i) x.push_back((i % 2 ? -1.0 : 1.0) * 0.0025 * i);
  const auto y = generic_pinch_profile(0.63, x);
  CHECK(fit_generic_pinch(x, y) == doctest::Approx(0.63).epsilon(1e-12));

  AsymptoteParams p{0.2, 4, 1.0};
  std::vector<double> xt;
  for (int i = -20; i <= 20; ++i) xt.push_back(0.1 * i);
  const auto yt = degenerate_profile(p, 0.99, xt);
  AsymptoteParams q = p;
  q.K = 0.0;
  CHECK(fit_degenerate(q, 0.99, xt, yt) == doctest::Approx(0.2).epsilon(1e-10));
  for (double v : degenerate_profile(q, 0.5, xt)) CHECK(v == std::numbers::sqrt2);
  CHECK_THROWS_AS(degenerate_profile({1.0, 3, 1.0}, 0.5, xt), Error);
  CHECK_THROWS_AS(generic_pinch_profile(1.0, std::vector<double>{0.0}), Error);
}

TEST_CASE("monotone resampling reproduces lines and keeps monotonicity") {
  std::vector<double> x{0.0, 0.5, 1.5, 2.0, 4.0}, y;
  for (double v : x) y.push_back(3.0 * v - 1.0);
  const std::vector<double> q{0.0, 0.25, 1.0, 3.3, 4.0};
  const auto r = monotone_resample(x, y, q);
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(r[i] == doctest::Approx(3.0 * q[i] - 1.0));

  const std::vector<double> step{0.0, 0.0, 1.0, 1.0, 1.0};
  std::vector<double> fine;
  for (int i = 0; i <= 400; ++i) fine.push_back(0.01 * i);
  const auto s = monotone_resample(x, step, fine);
  for (std::size_t i = 1; i < s.size(); ++i) CHECK(s[i] >= s[i - 1] - 1e-15);
}

TEST_CASE("pole blow-up of the unit sphere is the circle of radius 2") {
  const auto c = cassini_profile(CassiniShape::from_lambda(0.0), 400);
  const auto rc = pole_blowup(c, Pole::Left);
  CHECK(rc.scale == doctest::Approx(2.0).epsilon(1e-4));
  CHECK(rc.x.front() == 0.0);
  for (std::size_t i = 1; i < rc.x.size(); ++i) {
    const double e = rc.scale;
    CHECK(std::hypot(rc.x[i] - e, rc.y[i]) == doctest::Approx(e).epsilon(1e-6));
  }
  const auto right = pole_blowup(c, Pole::Right);
  for (std::size_t i = 0; i < rc.x.size(); ++i) CHECK(right.x[i] == doctest::Approx(rc.x[i]));
}

TEST_CASE("soliton compared with itself has zero distance") {
  const auto sol = solve_soliton(1.0, 5.0);
  RescaledCurve rc;
  for (const auto& s : sol.samples) {
    rc.x.push_back(s.x);
    rc.y.push_back(s.y);
  }
  const auto d = compare_to_soliton(rc, sol, 2.0);
  CHECK(d.linf < 1e-12);
  CHECK(d.l2 < 1e-12);

  // A dilated copy is a fixed distance away.
  for (auto& v : rc.y) v *= 1.01;
  CHECK(compare_to_soliton(rc, sol, 2.0).linf > 1e-3);
}

TEST_CASE("cylinder rescaling divides by sqrt(T - t)") {
  auto c = cassini_profile(CassiniShape::from_lambda(0.9), 200);
  c.t = 0.1;
  const auto rc = cylinder_rescale(c, 0.14);
  CHECK(rc.scale == doctest::Approx(5.0));
  CHECK(rc.y[100] == doctest::Approx(5.0 * c.R[100]));
  CHECK_THROWS_AS(cylinder_rescale(c, 0.05), Error);
}

TEST_CASE("cusp fit of an exact generic profile") {
  // Curve whose radius follows K|x|/sqrt(log 1/|x|) near x = 0, slightly
  // lifted so it stays regular.
  auto c = cassini_profile(CassiniShape::from_lambda(0.5), 2000);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double ax = std::max(std::abs(c.S[i]), 1e-9);
    if (ax < 0.2) c.R[i] = 0.5 * ax / std::sqrt(std::log(1.0 / ax)) + 1e-12;
  }
  const auto f = fit_cusp(c, 0.1);
  CHECK(f.K == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(f.misfit < 1e-3);
}
