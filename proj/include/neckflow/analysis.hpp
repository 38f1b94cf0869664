#pragma once

// Rescalings of singular profiles, the asymptotic model curves they are
// compared against, and log-log power-law fits.

#include <optional>
#include <span>
#include <vector>

#include "neckflow/evolution.hpp"
#include "neckflow/geometry.hpp"
#include "neckflow/soliton.hpp"

namespace neckflow {

struct RescaledCurve {
  std::vector<double> x;  // ordered away from the blow-up point
  std::vector<double> y;
  double scale = 1.0;
  double source_time = 0.0;
};

struct AsymptoteParams {
  double K = 0.0;
  int m = 4;
  double T = 0.0;
};

struct FitResult {
  double exponent = 0.0;
  double prefactor = 0.0;
  double residual = 0.0;  // RMS of the log-log fit
  double t_lo = 0.0;      // times spanned by the fitted records
  double t_hi = 0.0;
  double T = 0.0;         // singular time used (refined when requested)
  std::size_t points = 0;
};

/// Monomial coefficients (constant term first) of the Hermite polynomial of
/// degree m scaled to unit leading coefficient: H_m(x) / 2^m.
std::vector<double> hermite(int m);

double hermite_eval(int m, double x);

/// Axial position of a pole by even extrapolation of S(theta).
double pole_position(const ProfileCurve& curve, Pole pole);

/// Curvature-normalised blow-up at a pole: (x, y) = eps (S - S_pole, R) with
/// eps the pole mean curvature; the right pole is mirrored so the cap opens
/// toward +x. The pole itself is the first point, at (0, 0).
RescaledCurve pole_blowup(const ProfileCurve& curve, Pole pole);

/// Parabolic rescaling about the neck: ((S - S_neck), R) / sqrt(T - t).
RescaledCurve cylinder_rescale(const ProfileCurve& curve, double T);

/// sqrt(2) + K Hm_m(x~) (T - t)^(m/2 - 1), with x~ the parabolically
/// rescaled axial coordinate (as produced by cylinder_rescale).
std::vector<double> degenerate_profile(const AsymptoteParams& params, double t,
                                       std::span<const double> x_tilde);

/// K |x| / sqrt(log(1/|x|)), 0 < |x| < 1.
std::vector<double> generic_pinch_profile(double K, std::span<const double> x);

/// Least-squares K for the generic pinch profile through (x, y) samples.
double fit_generic_pinch(std::span<const double> x, std::span<const double> y);

/// Least-squares K for the degenerate profile with the other parameters fixed.
double fit_degenerate(const AsymptoteParams& params, double t, std::span<const double> x_tilde,
                      std::span<const double> y_tilde);

struct ProfileFit {
  double K = 0.0;
  double misfit = 0.0;  // RMS error, relative as documented per fit
  std::vector<double> x, y, model;
};

/// Generic pinch fit of a terminal profile about its neck over
/// 2 dx <= |x| <= x_max, dx the axial spacing at the neck. The misfit is
/// the RMS of (y - model) / model.
ProfileFit fit_cusp(const ProfileCurve& curve, double x_max = 0.1);

/// Degenerate profile fit of the cylinder rescaling of a snapshot over
/// |x~| <= x_window, K free and m, T from params. The misfit is the RMS of
/// y~ - model divided by sqrt(2).
ProfileFit fit_degenerate_snapshot(const ProfileCurve& curve, const AsymptoteParams& params,
                                   double x_window = 2.0);

/// Straight-line fit of log y against log x: y = prefactor * x^exponent.
FitResult fit_loglog(std::span<const double> x, std::span<const double> y);

/// Fit q = A (T - t)^p. With T given the fit is direct; otherwise T is
/// chosen beyond t.back() by golden-section minimisation of the residual.
FitResult fit_power_law(std::span<const double> t, std::span<const double> q,
                        std::optional<double> T);

enum class TraceQuantity { H_max, H_pole, H_center };

struct PowerFitWindow {
  // Records with tau_lo <= T - t <= tau_lo * 10^decades are used. When
  // tau_lo is unset it is T - t of the last record.
  std::optional<double> tau_lo;
  double decades = 1.0;
  bool refine_T = true;
};

FitResult fit_power(const FlowTrace& trace, TraceQuantity quantity, double T_est,
                    const PowerFitWindow& window = {});

struct CurveDistance {
  double linf = 0.0;
  double l2 = 0.0;
};

/// Distance of the graph parts of a rescaled curve and a soliton over
/// [0, x_window], via monotone cubic resampling on a common grid.
CurveDistance compare_to_soliton(const RescaledCurve& rc, const SolitonCurve& sol,
                                 double x_window);

struct CurvatureProfile {
  double t = 0.0;
  std::vector<double> x;
  std::vector<double> H;
};

/// H against x for each rescaled snapshot, followed by the soliton
/// reference (t = NaN) as the last entry.
std::vector<CurvatureProfile> mean_curvature_comparison(const std::vector<RescaledCurve>& snapshots,
                                                        const SolitonCurve& sol);

/// Pointwise mean curvature of a rescaled curve whose ends are poles.
std::vector<double> rescaled_mean_curvature(const RescaledCurve& rc);

/// Monotone cubic (PCHIP) interpolation of y(x) at the query points; x must
/// be strictly increasing and the queries inside [x.front(), x.back()].
std::vector<double> monotone_resample(std::span<const double> x, std::span<const double> y,
                                      std::span<const double> query);

}  // namespace neckflow
