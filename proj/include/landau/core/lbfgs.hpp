#pragma once

#include <Eigen/Dense>
#include <functional>

namespace landau {

struct LbfgsOptions {
  int max_iter = 5000;
  int memory = 12;
  double gtol = 1e-10;  ///< stop when |grad|_inf <= gtol * scale
  double fscale = 0.0;  ///< scale of the gradient test; 0 selects max(1, |f|)
  double ftol = 1e-15;  ///< relative decrease counted as a stall
  int stall_iters = 25;
  double initial_step = 1e-2;  ///< max-norm of the first trial step
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double grad_inf = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Objective callback: returns f(x) and writes the gradient; returns +inf when x is
/// outside the admissible region, which the backtracking line search then avoids.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

/// Limited-memory BFGS with Armijo backtracking. Converged when the gradient test
/// passes or the objective stalls at rounding level for stall_iters iterations.
LbfgsResult lbfgs_minimize(const Objective& fg, Eigen::VectorXd x0, const LbfgsOptions& opts = {});

}  // namespace landau
