#pragma once

// Explicit time stepping of the reduced mean curvature flow for (R, S) and
// classification of how a run terminates.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "neckflow/geometry.hpp"
#include "neckflow/kernels.hpp"

namespace neckflow {

struct StepControl {
  double safety = 0.1;        // CFL safety factor in (0, 1]
  double dt_min = 1e-20;      // abort threshold
  double eps_pinch = 1e-3;    // neck radius treated as pinched
  double eps_extinct = 1e-2;  // whole-surface radius treated as extinct
  double a2_cap = 1e8;        // |A|^2 treated as blown up
  std::int64_t max_steps = 200'000'000;

  int convex_check_every = 20;
  // Convexity is preserved by the flow and ends in a round point, so a run
  // may stop as ShrinksRound once it is seen. T_est is then a lower bound.
  bool stop_when_convex = false;
  // A reflection-symmetric profile whose radius has no interior minimum
  // cannot develop a neck again (the number of critical points of the
  // radius never increases), so the run may also stop as ShrinksRound once
  // the neck has opened.
  bool stop_when_neck_opens = false;
  // A trace record is written every `trace_every` steps, and additionally
  // whenever max|A| has grown by the factor `trace_h_growth` since the
  // previous record.
  int trace_every = 200;
  double trace_h_growth = 1.01;
  // Snapshots: at multiples of snapshot_dt (0 disables), whenever max|A|
  // grows by snapshot_h_growth (0 disables), and at each listed time.
  double snapshot_dt = 0.0;
  double snapshot_h_growth = 0.0;
  std::vector<double> snapshot_times;
  std::size_t max_snapshots = 2000;

  kernels::Backend backend = kernels::Backend::OpenMP;

  /// Thresholds scaled to a Cassini b other than 1.
  static StepControl for_scale(double b);

  /// Throws ErrorKind::Domain naming the offending field.
  void validate() const;
};

struct TraceRecord {
  double t;
  double H_max;
  double H_pole;          // larger of the two pole values
  double R_min;           // neck radius: min R between the two bulges
  double R_max;
  bool convex;
  double dt;
  double H_center;        // mean curvature at the neck node
};

struct FlowTrace {
  std::vector<TraceRecord> records;
};

enum class Outcome { ShrinksRound, CentralNeckpinch, CurvatureBlowup, StepLimit, NumericalFailure };

const char* to_string(Outcome outcome);
Outcome outcome_from_string(const std::string& name);

struct TerminationReport {
  Outcome outcome = Outcome::StepLimit;
  double T_est = 0.0;
  std::optional<double> pinch_location;
  std::int64_t steps = 0;
  std::string detail;
};

struct EvolveResult {
  FlowTrace trace;
  TerminationReport report;
  ProfileCurve final_curve;
  std::vector<ProfileCurve> snapshots;
};

struct StepResult {
  ProfileCurve curve;
  double dt_used;
};

/// One forward-Euler step with the adaptive time step
/// dt = safety * min(min g_uu dtheta^2, 1 / max|A|^2, R_neck^2).
/// Throws NumericalFailure on non-finite state and StepCollapse when
/// dt < dt_min.
StepResult step(const ProfileCurve& curve, const StepControl& control);

/// Runs the flow from a Cassini profile until a termination condition holds.
EvolveResult evolve(const CassiniShape& shape, std::size_t n, const StepControl& control);

/// Same, from an arbitrary regular starting curve.
EvolveResult evolve_curve(ProfileCurve curve, const StepControl& control);

enum class Pole { Left, Right };

/// H at the pole by an even quadratic fit a + c*theta^2 through the three
/// nodes nearest the pole.
double pole_mean_curvature(const ProfileCurve& curve, Pole pole = Pole::Left);

/// Same extrapolation applied to an already computed H array.
double pole_extrapolate(std::span<const double> H, Pole pole);

struct NeckLocation {
  std::size_t index;   // argmin R between the two bulges
  double radius;
};

/// The neck is the smallest radius between the largest-R node of each half.
NeckLocation find_neck(const ProfileCurve& curve);

/// T_est for a finished trace: power-law fit of H_max over its last decade
/// of curvature growth, refining T. Falls back to the last time.
double estimate_singular_time(const FlowTrace& trace);

}  // namespace neckflow
