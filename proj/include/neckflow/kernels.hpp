#pragma once

// Per-node finite-difference kernels shared by the geometry and evolution
// modules. Every kernel exists twice: a plain serial loop kept as the
// reference and an OpenMP loop. Both evaluate the same per-node expression
// and use only exact reductions (min/max), so their outputs are bitwise
// identical for any thread count.

#include <cmath>
#include <cstddef>
#include <span>

namespace neckflow::kernels {

enum class Backend { Serial, OpenMP };

/// Centred first and second derivatives at node i, with pole ghosts
/// S_{-1} = S_0, R_{-1} = -R_0 and S_n = S_{n-1}, R_n = -R_{n-1}.
struct NodeDerivatives {
  double dS, dR, d2S, d2R;
};

inline NodeDerivatives node_derivatives(std::span<const double> S, std::span<const double> R,
                                        std::size_t i, double dtheta) {
  const std::size_t n = S.size();
  const double s0 = S[i];
  const double r0 = R[i];
  const double sm = i == 0 ? S[0] : S[i - 1];
  const double rm = i == 0 ? -R[0] : R[i - 1];
  const double sp = i + 1 == n ? S[n - 1] : S[i + 1];
  const double rp = i + 1 == n ? -R[n - 1] : R[i + 1];
  const double inv2h = 0.5 / dtheta;
  const double invh2 = 1.0 / (dtheta * dtheta);
  return {(sp - sm) * inv2h, (rp - rm) * inv2h, ((sp + sm) - 2.0 * s0) * invh2,
          ((rp + rm) - 2.0 * r0) * invh2};
}

struct NodeCurvature {
  double g_uu, kappa_u, kappa_phi;
};

inline NodeCurvature node_curvature(const NodeDerivatives& d, double r) {
  const double g = d.dS * d.dS + d.dR * d.dR;
  const double inv_sqrt_g = 1.0 / std::sqrt(g);
  const double cross = d.dS * d.d2R - d.dR * d.d2S;
  return {g, -cross * (inv_sqrt_g * inv_sqrt_g * inv_sqrt_g), d.dS / r * inv_sqrt_g};
}

/// Reduced flow law for (R, S) written term by term: returns (dS/dt, dR/dt).
/// The sweep in flow_velocity evaluates the same law in factored form.
struct NodeVelocity {
  double dS_dt, dR_dt;
};

inline NodeVelocity node_velocity(const NodeDerivatives& d, double r) {
  const double g = d.dS * d.dS + d.dR * d.dR;
  const double g2 = g * g;
  const double dR_dt = d.dS / g2 * (d.dS * d.d2R - d.dR * d.d2S) - d.dS * d.dS / (r * g);
  const double dS_dt = d.dR / g2 * (d.dR * d.d2S - d.dS * d.d2R) + d.dR * d.dS / (r * g);
  return {dS_dt, dR_dt};
}

/// Reductions gathered during one velocity sweep.
struct FlowSummary {
  double g_min;
  double a2_max;
  double r_min;
  double r_max;
  bool finite;
};

/// Fills the velocities (dS/dt, dR/dt) and returns the reductions.
FlowSummary flow_velocity(std::span<const double> S, std::span<const double> R, double dtheta,
                          std::span<double> vS, std::span<double> vR, Backend backend);

/// Pointwise mean curvature H = kappa_u + kappa_phi.
void mean_curvature(std::span<const double> S, std::span<const double> R, double dtheta,
                    std::span<double> H, Backend backend);

/// Explicit Euler update S += dt * vS, R += dt * vR, in place.
void euler_update(std::span<double> S, std::span<double> R, std::span<const double> vS,
                  std::span<const double> vR, double dt, Backend backend);

/// Pointwise curvature field; output spans must have the size of S.
void curvature_field(std::span<const double> S, std::span<const double> R, double dtheta,
                     std::span<double> kappa_u, std::span<double> kappa_phi, std::span<double> H,
                     std::span<double> A2, std::span<double> Rsc, Backend backend);

/// Number of OpenMP threads available (1 without OpenMP).
int max_threads();

}  // namespace neckflow::kernels
