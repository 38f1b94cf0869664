#include "neckflow/error.hpp"

namespace neckflow {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidShape: return "invalid-shape";
    case ErrorKind::Construction: return "construction";
    case ErrorKind::SingularCurve: return "singular-curve";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::NumericalFailure: return "numerical-failure";
    case ErrorKind::StepCollapse: return "step-collapse";
    case ErrorKind::SolverFailure: return "solver-failure";
    case ErrorKind::InsufficientData: return "insufficient-data";
    case ErrorKind::Bracket: return "bracket";
    case ErrorKind::Monotonicity: return "monotonicity-violation";
    case ErrorKind::Io: return "io";
    case ErrorKind::Usage: return "usage";
  }
  return "unknown";
}

}  // namespace neckflow
