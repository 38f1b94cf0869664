#include "neckflow/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "neckflow/error.hpp"
#include "neckflow/kernels.hpp"

namespace neckflow {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr std::size_t kCompareGrid = 401;

double golden_section(auto&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Leading run of strictly increasing x, optionally cut after the first point
// reaching x_stop.
std::size_t graph_prefix(std::span<const double> x, double x_stop) {
  std::size_t k = 1;
  while (k < x.size() && x[k] > x[k - 1]) {
    if (x[k] >= x_stop) return k + 1;
    ++k;
  }
  return k;
}

}  // namespace

std::vector<double> hermite(int m) {
  if (m < 0) throw Error(ErrorKind::Domain, "Hermite order must be non-negative");
  // Monic form of H_{k+1} = 2x H_k - 2k H_{k-1}: h_{k+1} = x h_k - (k/2) h_{k-1}.
  std::vector<double> prev{1.0};
  if (m == 0) return prev;
  std::vector<double> cur{0.0, 1.0};
  for (int k = 1; k < m; ++k) {
    std::vector<double> next(static_cast<std::size_t>(k) + 2, 0.0);
    for (std::size_t j = 0; j < cur.size(); ++j) next[j + 1] += cur[j];
    for (std::size_t j = 0; j < prev.size(); ++j) next[j] -= 0.5 * k * prev[j];
    prev = std::move(cur);
    cur = std::move(next);
  }
  return cur;
}

double hermite_eval(int m, double x) {
  const auto c = hermite(m);
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double pole_position(const ProfileCurve& curve, Pole pole) {
  return pole_extrapolate(curve.S, pole);
}

RescaledCurve pole_blowup(const ProfileCurve& curve, Pole pole) {
  const double eps = pole_mean_curvature(curve, pole);
  if (!(eps > 0.0)) {
    throw Error(ErrorKind::Domain, "pole mean curvature must be positive for a blow-up");
  }
  const double s_pole = pole_position(curve, pole);
  const std::size_t n = curve.size();
  RescaledCurve rc;
  rc.scale = eps;
  rc.source_time = curve.t;
  rc.x.reserve(n + 1);
  rc.y.reserve(n + 1);
  rc.x.push_back(0.0);
  rc.y.push_back(0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = pole == Pole::Left ? k : n - 1 - k;
    const double dx = pole == Pole::Left ? curve.S[i] - s_pole : s_pole - curve.S[i];
    rc.x.push_back(eps * dx);
    rc.y.push_back(eps * curve.R[i]);
  }
  return rc;
}

RescaledCurve cylinder_rescale(const ProfileCurve& curve, double T) {
  if (!(T > curve.t)) {
    throw Error(ErrorKind::Domain, "cylinder rescaling needs T > t");
  }
  const double scale = 1.0 / std::sqrt(T - curve.t);
  const auto neck = find_neck(curve);
  const double s_neck = curve.S[neck.index];
  RescaledCurve rc;
  rc.scale = scale;
  rc.source_time = curve.t;
  rc.x.reserve(curve.size());
  rc.y.reserve(curve.size());
  for (std::size_t i = 0; i < curve.size(); ++i) {
    rc.x.push_back((curve.S[i] - s_neck) * scale);
    rc.y.push_back(curve.R[i] * scale);
  }
  return rc;
}

std::vector<double> degenerate_profile(const AsymptoteParams& params, double t,
                                       std::span<const double> x_tilde) {
  if (params.m % 2 != 0 || params.m < 4) {
    throw Error(ErrorKind::Domain, "degenerate profile needs even m >= 4");
  }
  if (!(t < params.T)) throw Error(ErrorKind::Domain, "degenerate profile needs t < T");
  const double amp = params.K * std::pow(params.T - t, 0.5 * params.m - 1.0);
  const auto coeff = hermite(params.m);
  std::vector<double> y(x_tilde.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    double acc = 0.0;
    for (auto it = coeff.rbegin(); it != coeff.rend(); ++it) acc = acc * x_tilde[i] + *it;
    y[i] = kSqrt2 + amp * acc;
  }
  return y;
}

std::vector<double> generic_pinch_profile(double K, std::span<const double> x) {
  std::vector<double> y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ax = std::abs(x[i]);
    if (!(ax > 0.0 && ax < 1.0)) {
      throw Error(ErrorKind::Domain, "generic pinch profile needs 0 < |x| < 1");
    }
    y[i] = K * ax / std::sqrt(std::log(1.0 / ax));
  }
  return y;
}

double fit_generic_pinch(std::span<const double> x, std::span<const double> y) {
  const auto shape = generic_pinch_profile(1.0, x);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    num += shape[i] * y[i];
    den += shape[i] * shape[i];
  }
  if (!(den > 0.0)) throw Error(ErrorKind::InsufficientData, "empty generic pinch fit");
  return num / den;
}

double fit_degenerate(const AsymptoteParams& params, double t, std::span<const double> x_tilde,
                      std::span<const double> y_tilde) {
  AsymptoteParams unit = params;
  unit.K = 1.0;
  const auto base = degenerate_profile(unit, t, x_tilde);
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    const double shape = base[i] - kSqrt2;
    num += shape * (y_tilde[i] - kSqrt2);
    den += shape * shape;
  }
  if (!(den > 0.0)) throw Error(ErrorKind::InsufficientData, "empty degenerate fit");
  return num / den;
}

ProfileFit fit_cusp(const ProfileCurve& curve, double x_max) {
  if (!(x_max > 0.0 && x_max < 1.0)) throw Error(ErrorKind::Domain, "cusp window must lie in (0, 1)");
  const auto neck = find_neck(curve);
  const std::size_t j = std::clamp<std::size_t>(neck.index, 1, curve.size() - 2);
  // Pinch point: vertex of the parabola through the three lowest nodes.
  const double xa = curve.S[j - 1], xb = curve.S[j], xc = curve.S[j + 1];
  const double ya = curve.R[j - 1], yb = curve.R[j], yc = curve.R[j + 1];
  const double num = (xb - xa) * (xb - xa) * (yb - yc) - (xb - xc) * (xb - xc) * (yb - ya);
  const double den = (xb - xa) * (yb - yc) - (xb - xc) * (yb - ya);
  const double s0 = den != 0.0 ? xb - 0.5 * num / den : xb;
  const double dx = 0.5 * (xc - xa);
  ProfileFit fit;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    const double x = curve.S[i] - s0;
    if (std::abs(x) >= 2.0 * std::abs(dx) && std::abs(x) <= x_max) {
      fit.x.push_back(x);
      fit.y.push_back(curve.R[i]);
    }
  }
  if (fit.x.size() < 4) throw Error(ErrorKind::InsufficientData, "too few nodes in the cusp window");
  fit.K = fit_generic_pinch(fit.x, fit.y);
  fit.model = generic_pinch_profile(fit.K, fit.x);
  double ss = 0.0;
  for (std::size_t i = 0; i < fit.x.size(); ++i) {
    const double r = (fit.y[i] - fit.model[i]) / fit.model[i];
    ss += r * r;
  }
  fit.misfit = std::sqrt(ss / static_cast<double>(fit.x.size()));
  return fit;
}

ProfileFit fit_degenerate_snapshot(const ProfileCurve& curve, const AsymptoteParams& params,
                                   double x_window) {
  const auto rc = cylinder_rescale(curve, params.T);
  ProfileFit fit;
  for (std::size_t i = 0; i < rc.x.size(); ++i) {
    if (std::abs(rc.x[i]) <= x_window) {
      fit.x.push_back(rc.x[i]);
      fit.y.push_back(rc.y[i]);
    }
  }
  if (fit.x.size() < 4) throw Error(ErrorKind::InsufficientData, "too few nodes in the central window");
  AsymptoteParams p = params;
  p.K = fit_degenerate(params, curve.t, fit.x, fit.y);
  fit.K = p.K;
  fit.model = degenerate_profile(p, curve.t, fit.x);
  double ss = 0.0;
  for (std::size_t i = 0; i < fit.x.size(); ++i) {
    const double r = fit.y[i] - fit.model[i];
    ss += r * r;
  }
  fit.misfit = std::sqrt(ss / static_cast<double>(fit.x.size())) / kSqrt2;
  return fit;
}

FitResult fit_loglog(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw Error(ErrorKind::InsufficientData, "log-log fit needs 2 points");
  double mx = 0.0, my = 0.0;
  std::vector<double> lx(n), ly(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) {
      throw Error(ErrorKind::Domain, "log-log fit needs positive data");
    }
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
    mx += lx[i];
    my += ly[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  if (!(sxx > 0.0)) throw Error(ErrorKind::InsufficientData, "log-log fit needs distinct abscissae");
  FitResult r;
  r.exponent = sxy / sxx;
  const double intercept = my - r.exponent * mx;
  r.prefactor = std::exp(intercept);
  double ss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ly[i] - (intercept + r.exponent * lx[i]);
    ss += e * e;
  }
  r.residual = std::sqrt(ss / static_cast<double>(n));
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  r.t_lo = *lo;
  r.t_hi = *hi;
  r.points = n;
  return r;
}

FitResult fit_power_law(std::span<const double> t, std::span<const double> q,
                        std::optional<double> T) {
  const std::size_t n = t.size();
  if (n < 3 || q.size() != n) throw Error(ErrorKind::InsufficientData, "power fit needs 3 points");
  const double t_first = *std::min_element(t.begin(), t.end());
  const double t_last = *std::max_element(t.begin(), t.end());
  std::vector<double> tau(n);
  auto fit_at = [&](double TT) {
    for (std::size_t i = 0; i < n; ++i) tau[i] = TT - t[i];
    return fit_loglog(tau, q);
  };
  double T_used;
  if (T) {
    if (!(*T > t_last)) throw Error(ErrorKind::Domain, "power fit needs T beyond the data");
    T_used = *T;
  } else {
    // Search the offset T - t_last on a log scale.
    const double width = t_last - t_first;
    if (!(width > 0.0)) throw Error(ErrorKind::InsufficientData, "power fit needs a time span");
    const double lo = std::log(1e-6 * width);
    const double hi = std::log(2.0 * width);
    const double best = golden_section(
        [&](double u) { return fit_at(t_last + std::exp(u)).residual; }, lo, hi, 1e-3 * (hi - lo));
    T_used = t_last + std::exp(best);
  }
  FitResult r = fit_at(T_used);
  r.T = T_used;
  r.t_lo = t_first;
  r.t_hi = t_last;
  return r;
}

FitResult fit_power(const FlowTrace& trace, TraceQuantity quantity, double T_est,
                    const PowerFitWindow& window) {
  const auto& rec = trace.records;
  if (rec.empty()) throw Error(ErrorKind::InsufficientData, "empty trace");
  auto value = [&](const TraceRecord& r) {
    switch (quantity) {
      case TraceQuantity::H_max: return r.H_max;
      case TraceQuantity::H_pole: return r.H_pole;
      case TraceQuantity::H_center: return r.H_center;
    }
    return r.H_max;
  };
  double tau_lo = window.tau_lo.value_or(T_est - rec.back().t);
  if (!(tau_lo > 0.0)) {
    throw Error(ErrorKind::Domain, "power fit needs T_est beyond the last record");
  }
  const double tau_hi = tau_lo * std::pow(10.0, window.decades);
  std::vector<double> t, q;
  for (const auto& r : rec) {
    const double tau = T_est - r.t;
    if (tau >= tau_lo * (1.0 - 1e-12) && tau <= tau_hi) {
      const double v = value(r);
      if (!(v > 0.0)) throw Error(ErrorKind::Domain, "power fit quantity must be positive");
      t.push_back(r.t);
      q.push_back(v);
    }
  }
  if (t.size() < 10) {
    throw Error(ErrorKind::InsufficientData,
                "power fit window holds " + std::to_string(t.size()) + " records, need 10");
  }
  FitResult r = fit_power_law(t, q, window.refine_T ? std::nullopt : std::optional<double>(T_est));
  return r;
}

std::vector<double> monotone_resample(std::span<const double> x, std::span<const double> y,
                                      std::span<const double> query) {
  const std::size_t n = x.size();
  if (n < 4 || y.size() != n) throw Error(ErrorKind::InsufficientData, "resampling needs 4 points");
  // Fritsch-Carlson slopes: harmonic-type mean of neighbouring secants, zero
  // at local extrema, one-sided three-point formula at the ends.
  std::vector<double> h(n - 1), delta(n - 1), d(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    if (!(h[i] > 0.0)) throw Error(ErrorKind::Domain, "resampling needs increasing abscissae");
    delta[i] = (y[i + 1] - y[i]) / h[i];
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (delta[i - 1] * delta[i] <= 0.0) {
      d[i] = 0.0;
    } else {
      const double w1 = 2.0 * h[i] + h[i - 1];
      const double w2 = h[i] + 2.0 * h[i - 1];
      d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
    }
  }
  auto end_slope = [](double h0, double h1, double d0, double d1) {
    double s = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if (s * d0 <= 0.0) {
      s = 0.0;
    } else if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3.0 * d0)) {
      s = 3.0 * d0;
    }
    return s;
  };
  d[0] = end_slope(h[0], h[1], delta[0], delta[1]);
  d[n - 1] = end_slope(h[n - 2], h[n - 3], delta[n - 2], delta[n - 3]);

  std::vector<double> out(query.size());
  for (std::size_t q = 0; q < query.size(); ++q) {
    const double xq = query[q];
    if (!(xq >= x[0] && xq <= x[n - 1])) {
      throw Error(ErrorKind::Domain, "resampling query outside the data range");
    }
    const auto it = std::upper_bound(x.begin(), x.end(), xq);
    std::size_t i = static_cast<std::size_t>(it - x.begin());
    i = i == 0 ? 0 : std::min(i - 1, n - 2);
    const double s = (xq - x[i]) / h[i];
    const double s2 = s * s, s3 = s2 * s;
    out[q] = (2 * s3 - 3 * s2 + 1) * y[i] + (s3 - 2 * s2 + s) * h[i] * d[i] +
             (-2 * s3 + 3 * s2) * y[i + 1] + (s3 - s2) * h[i] * d[i + 1];
  }
  return out;
}

CurveDistance compare_to_soliton(const RescaledCurve& rc, const SolitonCurve& sol,
                                 double x_window) {
  if (!(x_window > 0.0)) throw Error(ErrorKind::Domain, "comparison window must be positive");
  const std::size_t nr = graph_prefix(rc.x, x_window);
  if (nr < 4 || rc.x[nr - 1] < x_window || rc.x.front() > 0.0) {
    throw Error(ErrorKind::InsufficientData, "rescaled curve does not cover the window as a graph");
  }
  std::vector<double> sx, sy;
  for (const auto& s : sol.samples) {
    if (!sx.empty() && !(s.x > sx.back())) break;
    sx.push_back(s.x);
    sy.push_back(s.y);
    if (s.x >= x_window) break;
  }
  if (sx.size() < 4 || sx.back() < x_window) {
    throw Error(ErrorKind::InsufficientData, "soliton does not cover the window");
  }
  std::vector<double> grid(kCompareGrid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    grid[i] = x_window * static_cast<double>(i) / static_cast<double>(grid.size() - 1);
  }
  const auto yr = monotone_resample(std::span(rc.x).first(nr), std::span(rc.y).first(nr), grid);
  const auto ys = monotone_resample(sx, sy, grid);
  CurveDistance d;
  double ss = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double e = std::abs(yr[i] - ys[i]);
    d.linf = std::max(d.linf, e);
    ss += e * e;
  }
  d.l2 = std::sqrt(ss / static_cast<double>(grid.size()));
  return d;
}

std::vector<double> rescaled_mean_curvature(const RescaledCurve& rc) {
  // Index 0 is the pole itself; the remaining points are grid nodes with
  // poles half a cell beyond each end.
  if (rc.x.size() < 5) throw Error(ErrorKind::InsufficientData, "rescaled curve too short");
  const std::span<const double> S = std::span(rc.x).subspan(1);
  const std::span<const double> R = std::span(rc.y).subspan(1);
  std::vector<double> H(rc.x.size());
  for (std::size_t i = 0; i < S.size(); ++i) {
    const auto k = kernels::node_curvature(kernels::node_derivatives(S, R, i, 1.0), R[i]);
    H[i + 1] = k.kappa_u + k.kappa_phi;
  }
  H[0] = pole_extrapolate(std::span<const double>(H).subspan(1), Pole::Left);
  return H;
}

std::vector<CurvatureProfile> mean_curvature_comparison(const std::vector<RescaledCurve>& snapshots,
                                                        const SolitonCurve& sol) {
  std::vector<CurvatureProfile> out;
  for (const auto& rc : snapshots) {
    const auto H = rescaled_mean_curvature(rc);
    const std::size_t m = graph_prefix(rc.x, std::numeric_limits<double>::infinity());
    CurvatureProfile p;
    p.t = rc.source_time;
    p.x.assign(rc.x.begin(), rc.x.begin() + static_cast<std::ptrdiff_t>(m));
    p.H.assign(H.begin(), H.begin() + static_cast<std::ptrdiff_t>(m));
    out.push_back(std::move(p));
  }
  CurvatureProfile ref;
  ref.t = std::numeric_limits<double>::quiet_NaN();
  for (const auto& s : sol.samples) {
    ref.x.push_back(s.x);
    ref.H.push_back(s.H);
  }
  out.push_back(std::move(ref));
  return out;
}

}  // namespace neckflow
