#pragma once

// Classification of the Cassini family into subcritical (shrinks round) and
// supercritical (central neckpinch) initial data, bisection for the critical
// shape parameter, and the critical-exponent fit of the maximal pole
// curvature on the supercritical branch.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "neckflow/analysis.hpp"
#include "neckflow/evolution.hpp"

namespace neckflow {

struct ClassifiedRun {
  double lambda = 0.0;
  Outcome outcome = Outcome::StepLimit;
  double H_pole_max = 0.0;
  double T_est = 0.0;
  std::string error;  // non-empty when the run itself threw
};

struct CriticalEstimate {
  double lambda_lo = 0.0;
  double lambda_hi = 0.0;
  int iterations = 0;
  std::size_t n_grid = 0;
  std::vector<ClassifiedRun> runs;  // in evaluation order

  double midpoint() const { return 0.5 * (lambda_lo + lambda_hi); }
};

inline bool is_subcritical(Outcome o) { return o == Outcome::ShrinksRound; }
inline bool is_supercritical(Outcome o) { return o == Outcome::CentralNeckpinch; }

ClassifiedRun classify(double lambda, std::size_t n, const StepControl& control);

/// Independent classifications, output in input order. With jobs > 1 runs
/// are distributed over an OpenMP pool; per-run failures are stored in
/// ClassifiedRun::error rather than thrown.
std::vector<ClassifiedRun> sweep(std::span<const double> lambdas, std::size_t n,
                                 const StepControl& control, int jobs = 1);

/// Bisection on the shape parameter until hi - lo <= tol_lambda.
/// Throws Bracket when the endpoints do not straddle the transition and
/// Monotonicity when a probe contradicts the bracket.
CriticalEstimate bisect_critical(double lo, double hi, double tol_lambda, std::size_t n,
                                 const StepControl& control, int jobs = 1);

using Classifier = std::function<ClassifiedRun(double lambda)>;

/// The same search over an arbitrary classifier. Endpoint and probe pairs
/// run concurrently when jobs > 1; n_grid is left at zero.
CriticalEstimate bisect_with(double lo, double hi, double tol_lambda, const Classifier& classifier,
                             int jobs = 1);

/// Throws Monotonicity, naming the offending pair, if a supercritical run
/// has smaller lambda than a subcritical one.
void check_monotone(std::span<const ClassifiedRun> runs);

/// H_pole_max = prefactor * (lambda - lambda_c)^(-exponent) over the
/// supercritical runs with lambda > lambda_c; exponent is reported positive.
FitResult critical_exponent(std::span<const ClassifiedRun> runs, double lambda_c);

struct ExponentSensitivity {
  double lambda_c;
  FitResult fit;
};

/// critical_exponent at lambda_c - delta, lambda_c, lambda_c + delta.
std::vector<ExponentSensitivity> exponent_sensitivity(std::span<const ClassifiedRun> runs,
                                                      double lambda_c, double delta = 0.002);

}  // namespace neckflow
