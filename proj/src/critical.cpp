#include "neckflow/critical.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "neckflow/error.hpp"

namespace neckflow {

namespace {

// Outer parallelism over runs; each run then steps serially.
StepControl worker_control(StepControl control, int jobs) {
  if (jobs > 1) control.backend = kernels::Backend::Serial;
  return control;
}

std::string describe(const ClassifiedRun& r) {
  std::ostringstream os;
  os.precision(17);
  os << "lambda=" << r.lambda << " (" << to_string(r.outcome) << ")";
  return os.str();
}

}  // namespace

ClassifiedRun classify(double lambda, std::size_t n, const StepControl& control) {
  const auto result = evolve(CassiniShape::from_lambda(lambda), n, control);
  ClassifiedRun run;
  run.lambda = lambda;
  run.outcome = result.report.outcome;
  run.T_est = result.report.T_est;
  for (const auto& r : result.trace.records) run.H_pole_max = std::max(run.H_pole_max, r.H_pole);
  if (run.outcome == Outcome::NumericalFailure) {
    throw Error(ErrorKind::NumericalFailure,
                "classification failed at " + describe(run) + ": " + result.report.detail);
  }
  return run;
}

std::vector<ClassifiedRun> sweep(std::span<const double> lambdas, std::size_t n,
                                 const StepControl& control, int jobs) {
  std::vector<ClassifiedRun> out(lambdas.size());
  const StepControl worker = worker_control(control, jobs);
  const auto count = static_cast<std::ptrdiff_t>(lambdas.size());
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, jobs)) if (jobs > 1)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto i = static_cast<std::size_t>(k);
    try {
      out[i] = classify(lambdas[i], n, worker);
    } catch (const std::exception& e) {
      out[i].lambda = lambdas[i];
      out[i].outcome = Outcome::NumericalFailure;
      out[i].error = e.what();
    }
  }
  return out;
}

void check_monotone(std::span<const ClassifiedRun> runs) {
  for (const auto& sup : runs) {
    if (!is_supercritical(sup.outcome)) continue;
    for (const auto& sub : runs) {
      if (is_subcritical(sub.outcome) && sup.lambda < sub.lambda) {
        throw Error(ErrorKind::Monotonicity, "supercritical " + describe(sup) +
                                                 " lies below subcritical " + describe(sub));
      }
    }
  }
}

namespace {

// Both members of a pair, concurrently when allowed; failures are stored in
// the run rather than thrown.
std::array<ClassifiedRun, 2> classify_pair(const Classifier& f, double a, double b, int jobs) {
  std::array<ClassifiedRun, 2> out;
  const double at[2] = {a, b};
#pragma omp parallel for num_threads(2) if (jobs > 1)
  for (int k = 0; k < 2; ++k) {
    try {
      out[k] = f(at[k]);
    } catch (const std::exception& e) {
      out[k].lambda = at[k];
      out[k].outcome = Outcome::NumericalFailure;
      out[k].error = e.what();
    }
  }
  for (const auto& r : out) {
    if (!r.error.empty()) throw Error(ErrorKind::NumericalFailure, r.error);
  }
  return out;
}

}  // namespace

CriticalEstimate bisect_with(double lo, double hi, double tol_lambda, const Classifier& classifier,
                             int jobs) {
  if (!(lo < hi)) throw Error(ErrorKind::Domain, "bisection needs lo < hi");
  if (!(tol_lambda >= 1e-5)) throw Error(ErrorKind::Domain, "bisection tolerance must be >= 1e-5");
  CriticalEstimate est;

  const auto first = classify_pair(classifier, lo, hi, jobs);
  est.runs.assign(first.begin(), first.end());
  if (!is_subcritical(first[0].outcome) || !is_supercritical(first[1].outcome)) {
    throw Error(ErrorKind::Bracket, "endpoints do not bracket the transition: " +
                                        describe(first[0]) + ", " + describe(first[1]));
  }

  while (hi - lo > tol_lambda) {
    const double mid = 0.5 * (lo + hi);
    ++est.iterations;
    const ClassifiedRun r = classifier(mid);
    est.runs.push_back(r);
    if (is_subcritical(r.outcome)) {
      lo = mid;
    } else if (is_supercritical(r.outcome)) {
      hi = mid;
    } else {
      // Neither clean outcome: probe both sides a quarter tolerance away
      // and move the bounds to whichever probes classify cleanly.
      const double d = 0.25 * tol_lambda;
      const auto nb = classify_pair(classifier, mid - d, mid + d, jobs);
      est.runs.insert(est.runs.end(), nb.begin(), nb.end());
      bool moved = false;
      for (const auto& x : nb) {
        if (is_subcritical(x.outcome) && x.lambda > lo) {
          lo = x.lambda;
          moved = true;
        } else if (is_supercritical(x.outcome) && x.lambda < hi) {
          hi = x.lambda;
          moved = true;
        }
      }
      if (!moved) {
        throw Error(ErrorKind::Monotonicity, "no clean classification around " + describe(r) +
                                                 ": " + describe(nb[0]) + ", " + describe(nb[1]));
      }
    }
    check_monotone(est.runs);
  }
  est.lambda_lo = lo;
  est.lambda_hi = hi;
  return est;
}

CriticalEstimate bisect_critical(double lo, double hi, double tol_lambda, std::size_t n,
                                 const StepControl& control, int jobs) {
  const StepControl worker = worker_control(control, jobs);
  auto est = bisect_with(
      lo, hi, tol_lambda, [&](double lambda) { return classify(lambda, n, worker); }, jobs);
  est.n_grid = n;
  return est;
}

FitResult critical_exponent(std::span<const ClassifiedRun> runs, double lambda_c) {
  std::vector<double> dl, h;
  for (const auto& r : runs) {
    if (is_supercritical(r.outcome) && r.lambda > lambda_c && r.H_pole_max > 0.0) {
      dl.push_back(r.lambda - lambda_c);
      h.push_back(r.H_pole_max);
    }
  }
  if (dl.size() < 5) {
    throw Error(ErrorKind::InsufficientData,
                "critical exponent needs 5 supercritical runs above lambda_c, got " +
                    std::to_string(dl.size()));
  }
  FitResult fit = fit_loglog(dl, h);
  fit.exponent = -fit.exponent;
  return fit;
}

std::vector<ExponentSensitivity> exponent_sensitivity(std::span<const ClassifiedRun> runs,
                                                      double lambda_c, double delta) {
  std::vector<ExponentSensitivity> out;
  for (double lc : {lambda_c - delta, lambda_c, lambda_c + delta}) {
    out.push_back({lc, critical_exponent(runs, lc)});
  }
  return out;
}

}  // namespace neckflow
