#include "neckflow/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "neckflow/analysis.hpp"
#include "neckflow/error.hpp"

namespace neckflow {

namespace {

/// Scratch buffers reused across steps of one run.
class Stepper {
 public:
  explicit Stepper(std::size_t n) : vS_(n), vR_(n), H_(n) {}

  kernels::FlowSummary evaluate(const ProfileCurve& c, kernels::Backend backend) {
    return kernels::flow_velocity(c.S, c.R, c.dtheta(), vS_, vR_, backend);
  }

  // Mean curvature is only needed for records and snapshots.
  std::span<const double> mean_curvature(const ProfileCurve& c, kernels::Backend backend) {
    kernels::mean_curvature(c.S, c.R, c.dtheta(), H_, backend);
    return H_;
  }

  // The radius limit uses the neck: near the poles R is small but the
  // parallel-curvature term is not stiff there.
  static double time_step(const kernels::FlowSummary& s, double dtheta, double safety,
                          double r_neck) {
    const double grid = s.g_min * dtheta * dtheta;
    const double curv = s.a2_max > 0.0 ? 1.0 / s.a2_max : grid;
    return safety * std::min({grid, curv, r_neck * r_neck});
  }

  void advance(ProfileCurve& c, double dt, kernels::Backend backend) const {
    kernels::euler_update(c.S, c.R, vS_, vR_, dt, backend);
    c.t += dt;
  }

 private:
  std::vector<double> vS_, vR_, H_;
};

// Even least-squares fit a + c u, u = theta^2, through nodes at theta/h =
// 1/2, 3/2, 5/2; returns the weights producing a.
struct PoleWeights {
  double w[3];
};

constexpr PoleWeights pole_weights() {
  const double u[3] = {0.25, 2.25, 6.25};
  const double mean = (u[0] + u[1] + u[2]) / 3.0;
  double suu = 0.0;
  for (double v : u) suu += (v - mean) * (v - mean);
  PoleWeights p{};
  for (int k = 0; k < 3; ++k) p.w[k] = 1.0 / 3.0 - mean * (u[k] - mean) / suu;
  return p;
}

}  // namespace

const char* to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::ShrinksRound: return "ShrinksRound";
    case Outcome::CentralNeckpinch: return "CentralNeckpinch";
    case Outcome::CurvatureBlowup: return "CurvatureBlowup";
    case Outcome::StepLimit: return "StepLimit";
    case Outcome::NumericalFailure: return "NumericalFailure";
  }
  return "unknown";
}

Outcome outcome_from_string(const std::string& name) {
  for (auto o : {Outcome::ShrinksRound, Outcome::CentralNeckpinch, Outcome::CurvatureBlowup,
                 Outcome::StepLimit, Outcome::NumericalFailure}) {
    if (name == to_string(o)) return o;
  }
  throw Error(ErrorKind::Io, "unknown outcome '" + name + "'");
}

StepControl StepControl::for_scale(double b) {
  StepControl c;
  c.eps_pinch *= b;
  c.eps_extinct *= b;
  c.a2_cap /= b * b;
  c.dt_min *= b * b;
  return c;
}

void StepControl::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorKind::Domain, "StepControl." + field + ": " + why);
  };
  if (!(safety > 0.0 && safety <= 1.0)) fail("safety", "must lie in (0, 1]");
  if (!(dt_min > 0.0)) fail("dt_min", "must be positive");
  if (!(eps_pinch > 0.0)) fail("eps_pinch", "must be positive");
  if (!(eps_extinct > 0.0)) fail("eps_extinct", "must be positive");
  if (!(a2_cap > 0.0)) fail("a2_cap", "must be positive");
  if (max_steps <= 0) fail("max_steps", "must be positive");
  if (convex_check_every <= 0) fail("convex_check_every", "must be positive");
  if (trace_every <= 0) fail("trace_every", "must be positive");
  if (!(trace_h_growth > 1.0)) fail("trace_h_growth", "must exceed 1");
  if (snapshot_dt < 0.0) fail("snapshot_dt", "must be non-negative");
  if (snapshot_h_growth != 0.0 && !(snapshot_h_growth > 1.0)) {
    fail("snapshot_h_growth", "must be 0 or exceed 1");
  }
}

double pole_extrapolate(std::span<const double> H, Pole pole) {
  const std::size_t n = H.size();
  if (n < 3) throw Error(ErrorKind::Domain, "pole extrapolation needs three nodes");
  constexpr PoleWeights p = pole_weights();
  if (pole == Pole::Left) return p.w[0] * H[0] + p.w[1] * H[1] + p.w[2] * H[2];
  return p.w[0] * H[n - 1] + p.w[1] * H[n - 2] + p.w[2] * H[n - 3];
}

double pole_mean_curvature(const ProfileCurve& curve, Pole pole) {
  require_regular(curve);
  const std::size_t n = curve.size();
  double h[3];
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t i = pole == Pole::Left ? k : n - 1 - k;
    const auto c =
        kernels::node_curvature(kernels::node_derivatives(curve.S, curve.R, i, curve.dtheta()),
                                curve.R[i]);
    h[k] = c.kappa_u + c.kappa_phi;
  }
  return pole_extrapolate(h, Pole::Left);
}

namespace {

// Value reductions vectorise; the index searches after them exit early.
double max_over(const double* r, std::size_t lo, std::size_t hi) {
  double m = r[lo];
#pragma omp simd reduction(max : m)
  for (std::size_t i = lo; i < hi; ++i) m = std::max(m, r[i]);
  return m;
}

double min_over(const double* r, std::size_t lo, std::size_t hi) {
  double m = r[lo];
#pragma omp simd reduction(min : m)
  for (std::size_t i = lo; i < hi; ++i) m = std::min(m, r[i]);
  return m;
}

// Between full searches the two bulge maxima are followed uphill and the
// neck downhill between them, starting from the previous positions.
struct NeckTrack {
  std::size_t left = 0, right = 0;
  NeckLocation neck{};
};

NeckTrack full_neck_search(const ProfileCurve& curve);

NeckTrack follow_neck(const ProfileCurve& curve, NeckTrack t) {
  const double* r = curve.R.data();
  const std::size_t n = curve.size();
  const std::size_t half = n / 2;
  std::size_t l = t.left, rt = t.right, i = t.neck.index;
  while (l + 1 < half && r[l + 1] > r[l]) ++l;
  while (l > 0 && r[l - 1] > r[l]) --l;
  while (rt > half && r[rt - 1] > r[rt]) --rt;
  while (rt + 1 < n && r[rt + 1] > r[rt]) ++rt;
  i = std::clamp(i, l, rt);
  while (i > l && r[i - 1] < r[i]) --i;
  while (i < rt && r[i + 1] < r[i]) ++i;
  return {l, rt, {i, r[i]}};
}

}  // namespace

namespace {

NeckTrack full_neck_search(const ProfileCurve& curve) {
  const std::size_t n = curve.size();
  const std::size_t half = n / 2;
  const double* r = curve.R.data();
  const double left_max = max_over(r, 0, half);
  std::size_t left = 0;
  while (left + 1 < half && r[left] != left_max) ++left;
  // Last maximum of the right half so ties resolve symmetrically.
  const double right_max = max_over(r, half, n);
  std::size_t right = n - 1;
  while (right > half && r[right] != right_max) --right;
  const double neck_r = min_over(r, left, right + 1);
  std::size_t neck = left;
  while (neck < right && r[neck] != neck_r) ++neck;
  return {left, right, {neck, neck_r}};
}

}  // namespace

NeckLocation find_neck(const ProfileCurve& curve) { return full_neck_search(curve).neck; }

StepResult step(const ProfileCurve& curve, const StepControl& control) {
  require_regular(curve);
  Stepper st(curve.size());
  const auto s = st.evaluate(curve, control.backend);
  if (!s.finite) throw Error(ErrorKind::NumericalFailure, "non-finite flow velocity");
  const double dt =
      Stepper::time_step(s, curve.dtheta(), control.safety, find_neck(curve).radius);
  if (!(dt >= control.dt_min)) {
    throw Error(ErrorKind::StepCollapse, "time step " + std::to_string(dt) + " below dt_min");
  }
  StepResult out{curve, dt};
  st.advance(out.curve, dt, control.backend);
  for (std::size_t i = 0; i < out.curve.size(); ++i) {
    if (!std::isfinite(out.curve.S[i]) || !std::isfinite(out.curve.R[i])) {
      throw Error(ErrorKind::NumericalFailure, "non-finite state after step");
    }
  }
  return out;
}

EvolveResult evolve(const CassiniShape& shape, std::size_t n, const StepControl& control) {
  return evolve_curve(cassini_profile(shape, n), control);
}

EvolveResult evolve_curve(ProfileCurve curve, const StepControl& control) {
  control.validate();
  require_regular(curve);

  EvolveResult out;
  auto& records = out.trace.records;
  auto& report = out.report;
  Stepper st(curve.size());
  const double dtheta = curve.dtheta();

  std::vector<double> pending_times = control.snapshot_times;
  std::sort(pending_times.begin(), pending_times.end(), std::greater<>());
  double next_snapshot_t = control.snapshot_dt > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  // Growth triggers watch max|A|^2, which needs no square roots per step.
  const double record_growth = control.trace_h_growth * control.trace_h_growth;
  const double snapshot_growth = control.snapshot_h_growth * control.snapshot_h_growth;
  double last_snapshot_a2 = 0.0;
  double last_record_a2 = 0.0;
  bool convex = false;
  bool convex_seen = false;
  CurvatureField field;
  NeckTrack track;

  for (std::int64_t k = 0;; ++k) {
    const auto s = st.evaluate(curve, control.backend);
    if (!s.finite) {
      report.outcome = Outcome::NumericalFailure;
      report.detail = "non-finite flow velocity at t=" + std::to_string(curve.t);
      break;
    }
    if (k % control.convex_check_every == 0) {
      curvatures(curve, field);
      convex = is_convex(field);
      convex_seen = convex_seen || convex;
      track = full_neck_search(curve);
    } else {
      track = follow_neck(curve, track);
    }
    const NeckLocation neck = track.neck;
    const bool neck_open = neck.radius >= s.r_max;
    const double dt = Stepper::time_step(s, dtheta, control.safety, neck.radius);

    Outcome outcome = Outcome::StepLimit;
    bool done = false;
    if (convex_seen && (s.r_max < control.eps_extinct || control.stop_when_convex)) {
      outcome = Outcome::ShrinksRound;
      done = true;
    } else if (control.stop_when_neck_opens && neck_open) {
      outcome = Outcome::ShrinksRound;
      report.detail = "neck opened at t=" + std::to_string(curve.t);
      done = true;
    } else if (neck.radius < control.eps_pinch && s.r_max > 10.0 * control.eps_pinch) {
      outcome = Outcome::CentralNeckpinch;
      done = true;
    } else if (s.a2_max > control.a2_cap) {
      outcome = Outcome::CurvatureBlowup;
      done = true;
    } else if (k >= control.max_steps) {
      outcome = Outcome::StepLimit;
      done = true;
    } else if (!(dt >= control.dt_min)) {
      outcome = Outcome::NumericalFailure;
      report.detail = "time step collapsed below dt_min at t=" + std::to_string(curve.t);
      done = true;
    }

    const bool record_due =
        done || k % control.trace_every == 0 || s.a2_max > last_record_a2 * record_growth;
    bool snap = done;
    if (curve.t >= next_snapshot_t) {
      snap = true;
      while (next_snapshot_t <= curve.t) next_snapshot_t += control.snapshot_dt;
    }
    if (control.snapshot_h_growth > 0.0 && s.a2_max > last_snapshot_a2 * snapshot_growth) {
      snap = true;
    }
    while (!pending_times.empty() && curve.t >= pending_times.back()) {
      pending_times.pop_back();
      snap = true;
    }

    if (record_due && (records.empty() || curve.t > records.back().t)) {
      const auto H = st.mean_curvature(curve, control.backend);
      const double h_max = *std::max_element(H.begin(), H.end());
      const double h_pole =
          std::max(pole_extrapolate(H, Pole::Left), pole_extrapolate(H, Pole::Right));
      records.push_back({curve.t, h_max, h_pole, neck.radius, s.r_max, convex, dt, H[neck.index]});
      last_record_a2 = s.a2_max;
    }
    if (snap) {
      const bool fresh = out.snapshots.empty() || out.snapshots.back().t < curve.t;
      if (fresh && out.snapshots.size() < control.max_snapshots) out.snapshots.push_back(curve);
      last_snapshot_a2 = s.a2_max;
    }

    if (done) {
      report.outcome = outcome;
      report.steps = k;
      if (outcome == Outcome::CentralNeckpinch) report.pinch_location = curve.S[neck.index];
      break;
    }
    st.advance(curve, dt, control.backend);
  }

  report.T_est = estimate_singular_time(out.trace);
  out.final_curve = std::move(curve);
  return out;
}

double estimate_singular_time(const FlowTrace& trace) {
  const auto& r = trace.records;
  if (r.empty()) return 0.0;
  const double t_last = r.back().t;
  const double h_last = r.back().H_max;
  std::vector<double> t, q;
  for (const auto& rec : r) {
    if (rec.H_max > 0.0 && rec.H_max >= h_last / 10.0) {
      t.push_back(rec.t);
      q.push_back(rec.H_max);
    }
  }
  // Short traces: fall back to the last records whatever their range.
  if (t.size() < 10) {
    t.clear();
    q.clear();
    for (std::size_t i = r.size() > 20 ? r.size() - 20 : 0; i < r.size(); ++i) {
      if (r[i].H_max > 0.0) {
        t.push_back(r[i].t);
        q.push_back(r[i].H_max);
      }
    }
  }
  if (t.size() < 10 || !(t.back() > t.front())) return t_last;
  try {
    return fit_power_law(t, q, std::nullopt).T;
  } catch (const Error&) {
    return t_last;
  }
}

}  // namespace neckflow
