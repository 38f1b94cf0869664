#include "neckflow/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "neckflow/error.hpp"
#include "neckflow/kernels.hpp"

namespace neckflow {

namespace {

constexpr std::size_t kMinNodes = 16;
constexpr std::size_t kDiameterSamples = 512;

}  // namespace

CassiniShape CassiniShape::from_lambda(double lambda, double b) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    throw Error(ErrorKind::InvalidShape, "Cassini b must be positive, got " + std::to_string(b));
  }
  if (!(lambda >= 0.0 && lambda < 1.0)) {
    throw Error(ErrorKind::InvalidShape,
                "Cassini lambda must lie in [0, 1) for a single loop, got " +
                    std::to_string(lambda));
  }
  return {lambda * b, b, lambda};
}

double CassiniShape::x_max() const { return std::sqrt(a * a + b * b); }

ProfileCurve cassini_profile(const CassiniShape& shape, std::size_t n) {
  if (!(shape.lambda >= 0.0 && shape.lambda < 1.0) || !(shape.b > 0.0)) {
    throw Error(ErrorKind::InvalidShape, "Cassini shape outside the single-loop regime");
  }
  if (n < kMinNodes) {
    throw Error(ErrorKind::Domain, "profile needs at least 16 nodes");
  }
  const double a2 = shape.a * shape.a;
  const double b2 = shape.b * shape.b;
  const double xm = shape.x_max();

  ProfileCurve curve;
  curve.S.resize(n);
  curve.R.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double th = curve.theta(i);
    // Mirror-paired nodes get bitwise-opposite S.
    const std::size_t j = n - 1 - i;
    const double c = i <= j ? std::cos(th) : -std::cos(curve.theta(j));
    const double s = std::sin(i <= j ? th : curve.theta(j));
    const double x = -xm * c;
    // y^2 = sqrt(b^4 + 4a^2x^2) - x^2 - a^2, rewritten without cancellation
    // at the poles: numerator b^4 - (x^2 - a^2)^2 factors through
    // (x_max^2 - x^2) = x_max^2 sin^2(theta).
    const double x2 = x * x;
    const double root = std::sqrt(b2 * b2 + 4.0 * a2 * x2);
    const double y2 = xm * xm * s * s * (b2 - a2 + x2) / (root + x2 + a2);
    curve.S[i] = x;
    curve.R[i] = std::sqrt(y2);
    if (!std::isfinite(curve.S[i]) || !std::isfinite(curve.R[i]) || !(curve.R[i] > 0.0)) {
      throw Error(ErrorKind::Construction, "non-finite Cassini sample at node " + std::to_string(i));
    }
  }
  return curve;
}

void require_regular(const ProfileCurve& curve) {
  if (curve.S.size() != curve.R.size() || curve.S.empty()) {
    throw Error(ErrorKind::SingularCurve, "profile arrays empty or mismatched");
  }
  for (std::size_t i = 0; i < curve.size(); ++i) {
    if (!(curve.R[i] > 0.0) || !std::isfinite(curve.R[i]) || !std::isfinite(curve.S[i])) {
      throw Error(ErrorKind::SingularCurve, "profile not regular at node " + std::to_string(i));
    }
  }
}

CurvatureField curvatures(const ProfileCurve& curve) {
  CurvatureField f;
  curvatures(curve, f);
  return f;
}

void curvatures(const ProfileCurve& curve, CurvatureField& f) {
  require_regular(curve);
  const std::size_t n = curve.size();
  f.kappa_u.resize(n);
  f.kappa_phi.resize(n);
  f.H.resize(n);
  f.A2.resize(n);
  f.Rsc.resize(n);
  kernels::curvature_field(curve.S, curve.R, curve.dtheta(), f.kappa_u, f.kappa_phi, f.H, f.A2,
                           f.Rsc, kernels::Backend::Serial);
}

IntegralQuantities integral_quantities(const ProfileCurve& curve) {
  require_regular(curve);
  const std::size_t n = curve.size();
  const double h = curve.dtheta();
  IntegralQuantities q;
  for (std::size_t i = 0; i < n; ++i) {
    const auto d = kernels::node_derivatives(curve.S, curve.R, i, h);
    const double r = curve.R[i];
    q.area += r * std::sqrt(d.dS * d.dS + d.dR * d.dR);
    q.volume += r * r * d.dS;
  }
  q.area *= 2.0 * std::numbers::pi * h;
  q.volume *= std::numbers::pi * h;

  // Rotating two profile points to opposite azimuths gives their largest
  // separation, sqrt(dS^2 + (R1 + R2)^2).
  const std::size_t stride = std::max<std::size_t>(1, (n + kDiameterSamples - 1) / kDiameterSamples);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < n; i += stride) idx.push_back(i);
  if (idx.back() != n - 1) idx.push_back(n - 1);
  double d2 = 0.0;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    for (std::size_t b = a; b < idx.size(); ++b) {
      const double ds = curve.S[idx[a]] - curve.S[idx[b]];
      const double rr = curve.R[idx[a]] + curve.R[idx[b]];
      d2 = std::max(d2, ds * ds + rr * rr);
    }
  }
  q.diameter = std::sqrt(d2);
  return q;
}

ExtinctionBounds extinction_bounds(const ProfileCurve& curve) {
  const auto q = integral_quantities(curve);
  return {2.0 * q.volume * q.volume / (q.area * q.area), q.diameter * q.diameter / 16.0};
}

double default_convex_tolerance(const CurvatureField& field) {
  double hmax = 0.0;
  for (double h : field.H) hmax = std::max(hmax, std::abs(h));
  return 1e-10 * hmax;
}

bool is_convex(const CurvatureField& field) {
  return is_convex(field, default_convex_tolerance(field));
}

bool is_convex(const CurvatureField& field, double tol) {
  for (std::size_t i = 0; i < field.kappa_u.size(); ++i) {
    if (field.kappa_u[i] < -tol || field.kappa_phi[i] < -tol) return false;
  }
  return true;
}

ProfileCurve scaled(const ProfileCurve& curve, double s) {
  ProfileCurve out = curve;
  for (auto& v : out.S) v *= s;
  for (auto& v : out.R) v *= s;
  out.t *= s * s;
  return out;
}

std::vector<double> cassini_residual(const CassiniShape& shape, const ProfileCurve& curve) {
  std::vector<double> res(curve.size());
  const double a2 = shape.a * shape.a;
  const double b4 = shape.b * shape.b * shape.b * shape.b;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double x2 = curve.S[i] * curve.S[i];
    const double q = x2 + curve.R[i] * curve.R[i] + a2;
    res[i] = q * q - 4.0 * a2 * x2 - b4;
  }
  return res;
}

}  // namespace neckflow
