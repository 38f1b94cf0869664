#pragma once

// Profile curves of rotationally symmetric surfaces and their curvatures.
//
// The generator curve lies in the upper half of the (x, y) = (S, R) plane and
// is revolved about the x-axis. It is sampled on a cell-centred angular grid
// theta_i = (i + 1/2) * pi / n, i = 0..n-1, so that the two poles (theta = 0
// and theta = pi) sit half a cell outside the first and last node. Ghost
// values across a pole are S_ghost = S_mirror and R_ghost = -R_mirror.

#include <cstddef>
#include <numbers>
#include <span>
#include <vector>

namespace neckflow {

/// Single-loop Cassini oval (x^2 + y^2 + a^2)^2 - 4 a^2 x^2 = b^4.
struct CassiniShape {
  double a = 0.0;
  double b = 1.0;
  double lambda = 0.0;

  /// Throws ErrorKind::InvalidShape unless 0 <= lambda < 1 and b > 0.
  static CassiniShape from_lambda(double lambda, double b = 1.0);

  double x_max() const;  // half axial extent, sqrt(a^2 + b^2)
};

struct ProfileCurve {
  std::vector<double> S;  // axial coordinate
  std::vector<double> R;  // radius
  double t = 0.0;         // flow time

  std::size_t size() const { return S.size(); }
  double dtheta() const { return std::numbers::pi / static_cast<double>(S.size()); }
  double theta(std::size_t i) const { return (static_cast<double>(i) + 0.5) * dtheta(); }
};

struct CurvatureField {
  std::vector<double> kappa_u;    // meridian curvature
  std::vector<double> kappa_phi;  // parallel curvature
  std::vector<double> H;
  std::vector<double> A2;
  std::vector<double> Rsc;
};

struct IntegralQuantities {
  double area = 0.0;
  double volume = 0.0;
  double diameter = 0.0;
};

struct ExtinctionBounds {
  double t_lower = 0.0;  // 2 V^2 / A^2
  double t_upper = 0.0;  // diam^2 / 16
};

ProfileCurve cassini_profile(const CassiniShape& shape, std::size_t n);

/// Pointwise curvatures from centred differences with pole reflection ghosts.
/// Sign convention: the round sphere has positive H.
CurvatureField curvatures(const ProfileCurve& curve);

/// Same, reusing the storage of `out`.
void curvatures(const ProfileCurve& curve, CurvatureField& out);

IntegralQuantities integral_quantities(const ProfileCurve& curve);

ExtinctionBounds extinction_bounds(const ProfileCurve& curve);

double default_convex_tolerance(const CurvatureField& field);
bool is_convex(const CurvatureField& field);
bool is_convex(const CurvatureField& field, double tol);

/// Throws ErrorKind::SingularCurve if any R_i <= 0 or a value is non-finite.
void require_regular(const ProfileCurve& curve);

/// Uniformly scaled copy: S, R multiplied by s, time by s^2.
ProfileCurve scaled(const ProfileCurve& curve, double s);

/// Quartic residual (S^2 + R^2 + a^2)^2 - 4 a^2 S^2 - b^4 at every node.
std::vector<double> cassini_residual(const CassiniShape& shape, const ProfileCurve& curve);

}  // namespace neckflow
