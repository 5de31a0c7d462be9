#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace landau {

enum class ErrorKind {
  InvalidArgument,
  GridTooSmall,
  MomentBoundViolated,
  ZeroRelativeVelocity,
  SingularPair,
  StepDiverged,
  Infeasible,
  NotConverged,
  ProblemTooLarge,
  TimeTooLarge,
  InvalidExponent,
  IncompatibleRuns,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a failure category and the `<module>.<op>` that raised it.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, std::string where, const std::string& message);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& where() const noexcept { return where_; }

 private:
  ErrorKind kind_;
  std::string where_;
};

[[noreturn]] void raise(ErrorKind kind, std::string where, const std::string& message);

inline void require(bool condition, std::string_view where, const std::string& message) {
  if (!condition) raise(ErrorKind::InvalidArgument, std::string(where), message);
}

}  // namespace landau
