#pragma once

#include <optional>
#include <vector>

#include "landau/aux/aux_flow.hpp"
#include "landau/core/measures.hpp"
#include "landau/core/params.hpp"
#include "landau/kernels/kernel.hpp"
#include "landau/metric/distance.hpp"

namespace landau {

struct JkoConfig {
  double tau = 0.05;
  int steps = 3;
  DistanceOptions inner{};
  ModelParams model{};

  void validate(const char* where = "jko.JkoConfig") const;
};

/// One proximal step: argmin over lambda of H_eps(lambda) + d_L^2(prev, lambda) / (2 tau).
/// The path interior and lambda are optimised jointly; distance_sq is the action of the
/// returned path, an upper bound for the discrete d_L^2.
struct JkoStep {
  GridDensity next;
  double entropy_prev = 0.0;
  double entropy_next = 0.0;
  double distance_sq = 0.0;
  int iterations = 0;
  double tau = 0.0;

  /// H_eps(next) + distance_sq / (2 tau).
  double objective() const;
};

JkoStep jko_step(const GridDensity& prev, const JkoConfig& cfg);
JkoStep jko_step(const GridDensity& prev, const JkoConfig& cfg, std::shared_ptr<const TildeGradient> op);

/// Piecewise-constant interpolant of cfg.steps proximal steps with per-node diagnostics.
struct JkoCurve {
  Trajectory trajectory;
  std::vector<JkoStep> steps;
};
JkoCurve jko_curve(const GridDensity& mu0, const JkoConfig& cfg);

/// D_eps^{R1,R2}(f) = sum_p phi_k phi_l psi_kl f_k f_l |(B psi0)_p|^2 h^{2d}.
double reduced_dissipation(const GridDensity& f, const Kernel& kernel, double gamma, const CutoffSpec& cutoffs);

struct SlopeBound {
  double sqrtD_reduced = 0.0;
  double slope_est = 0.0;
  double budget = 0.0;  ///< allowed shortfall of slope_est
  double t = 0.0;
  double T_max = 0.0;
  double distance = 0.0;
  double entropy_drop = 0.0;

  bool holds() const { return sqrtD_reduced <= slope_est + budget; }
};

/// Runs the cutoff flow with frozen first variation for time t = min(T_max / 2, 0.01)
/// and returns (H(f0) - H(f_t)) / d_L(f0, f_t) next to sqrt(D_eps^{R1,R2}(f0)).
SlopeBound slope_lower_bound(const GridDensity& mu0, double R1, double R2, const JkoConfig& cfg);

/// H(r) - H(s) + 1/2 int_s^r D + 1/2 int_s^r |mu'|^2 over all node pairs s < r.
struct EdiReport {
  std::vector<double> times;
  std::vector<double> residuals;  ///< upper-triangular pairs in row order
  double max_residual = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};

/// speed_sq holds |mu'|^2 per interval. Without it the trajectory is treated as
/// a gradient-flow solution with |mu'|^2 = D (trapezoid). tol < 0 selects the
/// default trapezoid budget sum_n dt_n^2 |dD_n| / 2 + 64 eps |H|.
EdiReport edi_certificate(const Trajectory& traj, const std::optional<std::vector<double>>& speed_sq = std::nullopt,
                          double tol = -1.0);

}  // namespace landau
