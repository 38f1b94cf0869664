#include "neckflow/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace neckflow::kernels {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Per-node body shared by both loops. The two flow equations share the
// factor w = (S'R'' - R'S'')/g^2 - S'/(R g), so dR/dt = S' w and
// dS/dt = -R' w. A single division q = 1/(R g) gives everything, and no
// square root is needed. Non-finite values are caught through `poison`,
// which stays exactly 0 unless some term is inf or NaN.
#pragma omp declare simd
inline void visit(const NodeDerivatives& d, double r, double& vS, double& vR, double& g_out,
                  double& a2_out, double& poison) {
  const double g = d.dS * d.dS + d.dR * d.dR;
  const double q = 1.0 / (r * g);
  const double cross = d.dS * d.d2R - d.dR * d.d2S;
  const double w = (r * q * q) * (cross * r - d.dS * g);
  vS = -d.dR * w;
  vR = d.dS * w;
  g_out = g;
  // |A|^2 = cross^2 / g^3 + S'^2 / (R^2 g)
  a2_out = (q * q) * ((cross * cross) * (r * r * r * q) + (d.dS * d.dS) * g);
  poison = w * 0.0 + a2_out * 0.0;
}

inline NodeDerivatives interior_derivatives(const double* S, const double* R, std::size_t i,
                                            double inv2h, double invh2) {
  const double sp = S[i + 1], sm = S[i - 1], rp = R[i + 1], rm = R[i - 1];
  return {(sp - sm) * inv2h, (rp - rm) * inv2h, ((sp + sm) - 2.0 * S[i]) * invh2,
          ((rp + rm) - 2.0 * R[i]) * invh2};
}

// Reference loop: every node through the ghost-aware stencil.
FlowSummary flow_velocity_serial(std::span<const double> S, std::span<const double> R,
                                 double dtheta, std::span<double> vS, std::span<double> vR) {
  double g_min = kInf, a2_max = 0.0, r_min = kInf, r_max = 0.0, bad = 0.0;
  for (std::size_t i = 0; i < S.size(); ++i) {
    double g, a2, p;
    visit(node_derivatives(S, R, i, dtheta), R[i], vS[i], vR[i], g, a2, p);
    g_min = std::min(g_min, g);
    a2_max = std::max(a2_max, a2);
    r_min = std::min(r_min, R[i]);
    r_max = std::max(r_max, R[i]);
    bad += p;
  }
  return {g_min, a2_max, r_min, r_max, bad == 0.0};
}

// Pole nodes through the ghost-aware stencil, interior nodes branch-free,
// vectorised and split across threads.
FlowSummary flow_velocity_omp(std::span<const double> S, std::span<const double> R,
                              double dtheta, std::span<double> vS, std::span<double> vR) {
  double g_min = kInf, a2_max = 0.0, r_min = kInf, r_max = 0.0, bad = 0.0;
  const std::size_t n = S.size();
  const double inv2h = 0.5 / dtheta;
  const double invh2 = 1.0 / (dtheta * dtheta);
  const double* s = S.data();
  const double* r = R.data();
  double* vs = vS.data();
  double* vr = vR.data();
  for (std::size_t i : {std::size_t{0}, n - 1}) {
    double g, a2, p;
    visit(node_derivatives(S, R, i, dtheta), R[i], vS[i], vR[i], g, a2, p);
    g_min = std::min(g_min, g);
    a2_max = std::max(a2_max, a2);
    r_min = std::min(r_min, R[i]);
    r_max = std::max(r_max, R[i]);
    bad += p;
  }
  const auto last = static_cast<std::ptrdiff_t>(n) - 1;
#pragma omp parallel for simd schedule(static) reduction(min : g_min, r_min) \
    reduction(max : a2_max, r_max) reduction(+ : bad)
  for (std::ptrdiff_t i = 1; i < last; ++i) {
    double g, a2, p;
    visit(interior_derivatives(s, r, static_cast<std::size_t>(i), inv2h, invh2), r[i], vs[i],
          vr[i], g, a2, p);
    g_min = std::min(g_min, g);
    a2_max = std::max(a2_max, a2);
    r_min = std::min(r_min, r[i]);
    r_max = std::max(r_max, r[i]);
    bad += p;
  }
  return {g_min, a2_max, r_min, r_max, bad == 0.0};
}

}  // namespace

FlowSummary flow_velocity(std::span<const double> S, std::span<const double> R, double dtheta,
                          std::span<double> vS, std::span<double> vR, Backend backend) {
  if (backend == Backend::OpenMP) return flow_velocity_omp(S, R, dtheta, vS, vR);
  return flow_velocity_serial(S, R, dtheta, vS, vR);
}

void euler_update(std::span<double> S, std::span<double> R, std::span<const double> vS,
                  std::span<const double> vR, double dt, Backend backend) {
  const auto n = static_cast<std::ptrdiff_t>(S.size());
  double* s = S.data();
  double* r = R.data();
  const double* vs = vS.data();
  const double* vr = vR.data();
  if (backend == Backend::OpenMP) {
#pragma omp parallel for simd schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      s[i] += dt * vs[i];
      r[i] += dt * vr[i];
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      s[i] += dt * vs[i];
      r[i] += dt * vr[i];
    }
  }
}

void curvature_field(std::span<const double> S, std::span<const double> R, double dtheta,
                     std::span<double> kappa_u, std::span<double> kappa_phi, std::span<double> H,
                     std::span<double> A2, std::span<double> Rsc, Backend backend) {
  const auto n = static_cast<std::ptrdiff_t>(S.size());
  auto body = [&](std::ptrdiff_t j) {
    const auto i = static_cast<std::size_t>(j);
    const auto k = node_curvature(node_derivatives(S, R, i, dtheta), R[i]);
    kappa_u[i] = k.kappa_u;
    kappa_phi[i] = k.kappa_phi;
    H[i] = k.kappa_u + k.kappa_phi;
    A2[i] = k.kappa_u * k.kappa_u + k.kappa_phi * k.kappa_phi;
    Rsc[i] = 2.0 * k.kappa_u * k.kappa_phi;
  };
  if (backend == Backend::OpenMP) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) body(j);
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) body(j);
  }
}

void mean_curvature(std::span<const double> S, std::span<const double> R, double dtheta,
                    std::span<double> H, Backend backend) {
  const auto n = static_cast<std::ptrdiff_t>(S.size());
  auto body = [&](std::ptrdiff_t j) {
    const auto i = static_cast<std::size_t>(j);
    const auto k = node_curvature(node_derivatives(S, R, i, dtheta), R[i]);
    H[i] = k.kappa_u + k.kappa_phi;
  };
  if (backend == Backend::OpenMP) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) body(j);
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) body(j);
  }
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace neckflow::kernels
