#include "neckflow/soliton.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "neckflow/error.hpp"

namespace neckflow {

namespace {

struct State {
  double x, y, beta;
};

State rhs(const State& u, double c) {
  const double cb = std::cos(u.beta);
  const double sb = std::sin(u.beta);
  // Meridian curvature is -dbeta/ds and H = curvature + cos(beta)/y = c sin(beta).
  return {cb, sb, cb / u.y - c * sb};
}

State axpy(const State& u, double h, const State& k) {
  return {u.x + h * k.x, u.y + h * k.y, u.beta + h * k.beta};
}

State rk4(const State& u, double h, double c) {
  const State k1 = rhs(u, c);
  const State k2 = rhs(axpy(u, 0.5 * h, k1), c);
  const State k3 = rhs(axpy(u, 0.5 * h, k2), c);
  const State k4 = rhs(axpy(u, h, k3), c);
  return {u.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
          u.y + h / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y),
          u.beta + h / 6.0 * (k1.beta + 2.0 * k2.beta + 2.0 * k3.beta + k4.beta)};
}

State integrate(State u, double length, int steps, double c) {
  const double h = length / steps;
  for (int k = 0; k < steps; ++k) u = rk4(u, h, c);
  return u;
}

constexpr int kSubsteps = 20;         // RK4 steps per output interval
constexpr double kSpacingScale = 0.02;  // output spacing in units of 1/c

// Eighth-order central difference weights, offsets -4..4.
constexpr std::array<double, 9> kD1 = {1.0 / 280, -4.0 / 105, 1.0 / 5,  -4.0 / 5, 0.0,
                                       4.0 / 5,   -1.0 / 5,   4.0 / 105, -1.0 / 280};
constexpr std::array<double, 9> kD2 = {-1.0 / 560, 8.0 / 315, -1.0 / 5,  8.0 / 5,   -205.0 / 72,
                                       8.0 / 5,    -1.0 / 5,  8.0 / 315, -1.0 / 560};

}  // namespace

double soliton_tip_series(double c, double y) {
  const double y2 = y * y;
  return 0.25 * c * y2 + c * c * c / 128.0 * y2 * y2;
}

double soliton_mean_curvature(double beta, double c) { return c * std::sin(beta); }

SolitonCurve solve_soliton(double c, double x_extent, double tol) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw Error(ErrorKind::Domain, "soliton speed must be positive");
  }
  if (!(x_extent > 0.0)) throw Error(ErrorKind::Domain, "soliton extent must be positive");
  if (!(tol >= 1e-12 && tol <= 1e-6)) {
    throw Error(ErrorKind::Domain, "soliton tolerance must lie in [1e-12, 1e-6]");
  }

  SolitonCurve out;
  out.c = c;
  const double spacing = kSpacingScale / c;
  out.spacing = spacing;

  // The first omitted series term is (c^5/4608) y^6; keep it and its slope
  // contribution below tol/10.
  const double c5 = std::pow(c, 5);
  const double delta = std::min({0.5 * spacing, std::pow(tol * 4608.0 / (10.0 * c5), 1.0 / 6.0),
                                 std::pow(tol * 4608.0 / (60.0 * c5), 1.0 / 5.0)});
  const double alpha = 0.25 * c;
  const double slope = 2.0 * alpha * delta + c * c * c / 32.0 * delta * delta * delta;
  State u{soliton_tip_series(c, delta), delta, std::atan2(1.0, slope)};
  double s = delta + 2.0 / 3.0 * alpha * alpha * std::pow(delta, 3) +
             0.4 * std::pow(alpha, 4) * std::pow(delta, 5);

  out.samples.push_back({0.0, 0.0, 0.0, std::numbers::pi / 2, c});
  const double max_length = 10.0 * (x_extent + 10.0 / c);
  for (std::size_t k = 1;; ++k) {
    const double target = static_cast<double>(k) * spacing;
    const double len = target - s;
    const State fine = integrate(u, len, kSubsteps, c);
    const State coarse = integrate(u, len, kSubsteps / 2, c);
    const double err = std::max({std::abs(fine.x - coarse.x), std::abs(fine.y - coarse.y),
                                 std::abs(fine.beta - coarse.beta)}) / 15.0;
    if (!(err <= tol) || !std::isfinite(fine.y) || !(fine.y > 0.0)) {
      throw Error(ErrorKind::SolverFailure,
                  "soliton step error " + std::to_string(err) + " exceeds tolerance at s=" +
                      std::to_string(target));
    }
    u = fine;
    s = target;
    out.samples.push_back({s, u.x, u.y, u.beta, soliton_mean_curvature(u.beta, c)});
    if (u.x >= x_extent) break;
    if (s > max_length) {
      throw Error(ErrorKind::SolverFailure, "soliton never reached the requested extent");
    }
  }
  return out;
}

PlanarCurve translate_snapshot(const SolitonCurve& curve, double t) {
  PlanarCurve p;
  p.x.reserve(curve.samples.size());
  p.y.reserve(curve.samples.size());
  for (const auto& smp : curve.samples) {
    p.x.push_back(smp.x + curve.c * t);
    p.y.push_back(smp.y);
  }
  return p;
}

std::vector<double> soliton_residual(const SolitonCurve& curve) {
  const auto& smp = curve.samples;
  const auto m = static_cast<std::ptrdiff_t>(smp.size());
  const double h = curve.spacing;
  const double c = curve.c;
  std::vector<double> res(smp.size(), std::numeric_limits<double>::quiet_NaN());
  // Mirror image through the tip: x(-s) = x(s), y(-s) = -y(s).
  auto x_at = [&](std::ptrdiff_t k) { return smp[static_cast<std::size_t>(std::abs(k))].x; };
  auto y_at = [&](std::ptrdiff_t k) {
    const double y = smp[static_cast<std::size_t>(std::abs(k))].y;
    return k < 0 ? -y : y;
  };
  for (std::ptrdiff_t k = 1; k + 4 < m; ++k) {
    double xs = 0, ys = 0, xss = 0, yss = 0;
    for (std::ptrdiff_t j = -4; j <= 4; ++j) {
      const auto w = static_cast<std::size_t>(j + 4);
      xs += kD1[w] * x_at(k + j);
      ys += kD1[w] * y_at(k + j);
      xss += kD2[w] * x_at(k + j);
      yss += kD2[w] * y_at(k + j);
    }
    xs /= h;
    ys /= h;
    xss /= h * h;
    yss /= h * h;
    const double y = smp[static_cast<std::size_t>(k)].y;
    const double speed2 = xs * xs + ys * ys;
    // phi phi'' - (1 + phi'^2)(1 - c phi phi'), multiplied through by x_s^3.
    res[static_cast<std::size_t>(k)] =
        y * (xs * yss - ys * xss) - xs * speed2 + c * y * ys * speed2;
  }
  return res;
}

}  // namespace neckflow
