#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "landau/core/measures.hpp"
#include "landau/metric/grazing.hpp"

namespace landau {

struct DistanceOptions {
  int K = 8;
  double floor = 1e-10;
  double r_max = 0.0;  ///< 0: every pair for n <= 16, otherwise half the box width
  int max_iter = 4000;
  double gtol = 1e-10;
  bool floor_check = true;  ///< re-solve at floor 1e-12 and report the change

  void validate(const char* where = "grazing_metric.DistanceOptions") const;
};

struct DistanceResult {
  double distance = 0.0;
  double squared = 0.0;
  GCEPath path;
  std::vector<double> interval_actions;  ///< A_n per interval
  double floor_sensitivity = 0.0;        ///< |d(floor) - d(1e-12)|, NaN when skipped
  int iterations = 0;
};

/// Guardrail: d = 3 needs n <= 8, d = 2 n <= 24, d = 1 n <= 256. Throws ProblemTooLarge.
void check_problem_size(const GridSpec& grid, const char* where);

std::shared_ptr<const TildeGradient> make_tilde_gradient(const GridSpec& grid, double gamma, double r_max = 0.0);

/// Time-discrete action of a density path f^0..f^K on uniform steps dt. Interval n
/// carries the optimal field for Delta f = f^{n+1} - f^n at the midpoint weights
/// g_p = fbar_k fbar_l, and costs Delta f^T L(g)^+ Delta f / dt = A_n dt.
class PathAction {
 public:
  PathAction(std::shared_ptr<const TildeGradient> op, double floor);

  const TildeGradient& op() const { return *op_; }
  std::shared_ptr<const TildeGradient> op_ptr() const { return op_; }

  /// Columns of F are the K+1 densities. Returns the summed cost, +inf when an entry
  /// is not positive. grad (same shape) receives the derivative in every column.
  double evaluate(const Eigen::MatrixXd& F, double dt, Eigen::MatrixXd* grad = nullptr,
                  std::vector<double>* interval_actions = nullptr) const;

  /// Optimal field for one interval.
  GrazingField optimal_field(const Eigen::VectorXd& f0, const Eigen::VectorXd& f1, double dt) const;

  /// Removes the null(B) component: (I - N N^T) v.
  Eigen::VectorXd project(const Eigen::VectorXd& v) const;

 private:
  double interval(const Eigen::VectorXd& f0, const Eigen::VectorXd& f1, double dt, Eigen::VectorXd* g0,
                  Eigen::VectorXd* g1, Eigen::VectorXd* phi_out) const;

  std::shared_ptr<const TildeGradient> op_;
  double floor_;
};

/// d_L(f0, f1) with T = 1. Throws Infeasible when f1 - f0 has a component in the
/// conserved directions, NotConverged when the optimiser stops early.
DistanceResult landau_distance(const GridDensity& f0, const GridDensity& f1, double gamma,
                               const DistanceOptions& opts = {});
DistanceResult landau_distance(const GridDensity& f0, const GridDensity& f1,
                               std::shared_ptr<const TildeGradient> op, const DistanceOptions& opts = {});

/// Per-interval A(fbar_n, M_n) along a grid trajectory with one field per interval.
std::vector<double> metric_derivative(const Trajectory& traj, const std::vector<GrazingField>& fields);

/// Tangent-optimal field of each trajectory interval (minimal action for the observed change).
std::vector<GrazingField> tangent_fields(const Trajectory& traj, std::shared_ptr<const TildeGradient> op);

/// f - N N^T (f - reference): same conserved quantities as the reference.
GridDensity project_to_moments(const TildeGradient& op, const GridDensity& f, const GridDensity& reference);

}  // namespace landau
