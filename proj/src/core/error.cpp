#include "landau/core/error.hpp"

namespace landau {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::GridTooSmall: return "GridTooSmall";
    case ErrorKind::MomentBoundViolated: return "MomentBoundViolated";
    case ErrorKind::ZeroRelativeVelocity: return "ZeroRelativeVelocity";
    case ErrorKind::SingularPair: return "SingularPair";
    case ErrorKind::StepDiverged: return "StepDiverged";
    case ErrorKind::Infeasible: return "Infeasible";
    case ErrorKind::NotConverged: return "NotConverged";
    case ErrorKind::ProblemTooLarge: return "ProblemTooLarge";
    case ErrorKind::TimeTooLarge: return "TimeTooLarge";
    case ErrorKind::InvalidExponent: return "InvalidExponent";
    case ErrorKind::IncompatibleRuns: return "IncompatibleRuns";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, std::string where, const std::string& message)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      where_(std::move(where)) {}

void raise(ErrorKind kind, std::string where, const std::string& message) {
  throw Error(kind, std::move(where), message);
}

}  // namespace landau
