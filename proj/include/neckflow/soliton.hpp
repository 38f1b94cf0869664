#pragma once

// The rotationally symmetric translating ("bowl") soliton. Its generator
// y = phi(x) has its tip at the origin, opens toward +x and, as a mean
// curvature flow, moves rigidly toward +x with speed c.

#include <vector>

namespace neckflow {

struct SolitonSample {
  double s;     // arclength from the tip
  double x;
  double y;
  double beta;  // tangent angle to the x-axis, pi/2 at the tip
  double H;     // c * sin(beta)
};

struct SolitonCurve {
  double c = 1.0;
  std::vector<SolitonSample> samples;  // uniform in arclength, tip first
  double spacing = 0.0;                // arclength between samples
};

/// Integrates the arclength system x' = cos b, y' = sin b,
/// b' = cos b / y - c sin b from a series start near the tip, until
/// x >= x_extent. Throws Domain for bad arguments and SolverFailure when
/// the step-doubling error estimate exceeds tol.
SolitonCurve solve_soliton(double c, double x_extent, double tol = 1e-10);

/// H of the bowl soliton at tangent angle beta: c sin(beta).
double soliton_mean_curvature(double beta, double c);

struct PlanarCurve {
  std::vector<double> x;
  std::vector<double> y;
};

/// Samples at time t of the rigidly moving soliton, tip at x = c t.
PlanarCurve translate_snapshot(const SolitonCurve& curve, double t);

/// Residual phi phi'' - (1 + phi'^2)(1 - c phi phi') at every sample with a
/// full stencil, using high-order differences of x(s), y(s) only (the
/// integrated angle is not consulted). Tip-side stencils use the mirror
/// image y(-s) = -y(s). Entries without a full stencil are NaN.
std::vector<double> soliton_residual(const SolitonCurve& curve);

/// Tip series x = (c/4) y^2 + (c^3/128) y^4.
double soliton_tip_series(double c, double y);

}  // namespace neckflow
