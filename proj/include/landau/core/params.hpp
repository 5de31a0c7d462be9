#pragma once

namespace landau {

/// Model selection shared by all solvers.
struct ModelParams {
  int d = 3;
  double gamma = 0.0;
  double epsilon = 0.5;
  double s = 1.0;

  /// Throws InvalidArgument unless d in {1,2,3}, gamma in [-4,0], epsilon > 0, s > 0.
  void validate(const char* where = "core.ModelParams") const;
};

}  // namespace landau
