#pragma once

#include <stdexcept>
#include <string>

namespace neckflow {

enum class ErrorKind {
  InvalidShape,      // Cassini parameter outside the single-loop regime
  Construction,      // non-finite values while building a curve
  SingularCurve,     // R <= 0 at an interior node
  Domain,            // argument outside an operation's domain
  NumericalFailure,  // non-finite state during time stepping
  StepCollapse,      // adaptive dt fell below dt_min
  SolverFailure,     // ODE tolerance could not be met
  InsufficientData,  // too few samples for a fit or comparison
  Bracket,           // bisection endpoints classify identically
  Monotonicity,      // classification not monotone inside a bracket
  Io,
  Usage,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace neckflow
