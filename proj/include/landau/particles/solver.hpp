#pragma once

#include <string_view>
#include <vector>

#include "landau/collision/collision.hpp"
#include "landau/core/measures.hpp"
#include "landau/kernels/kernel.hpp"

namespace landau {

enum class Integrator { ExplicitEuler, Rk4 };

std::string_view to_string(Integrator integrator);
Integrator parse_integrator(std::string_view name);

struct SolverConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  Integrator integrator = Integrator::Rk4;
  int record_every = 1;
  double delta_sing = 0.0;
  int n_aux = 0;  ///< auxiliary grid cells per axis; 0 picks the default

  void validate() const;
};

/// Deterministic particle discretisation of the regularised equation. The
/// auxiliary grid is fixed at construction and reused for every force evaluation.
class ParticleSolver {
 public:
  ParticleSolver(const Kernel& kernel, double gamma, const GridSpec& aux, CollisionOptions opts = {});

  const ParticleEntropy& entropy() const { return entropy_; }
  double gamma() const { return gamma_; }

  /// Velocities, regularised entropy and dissipation at the given positions.
  struct Evaluation {
    ParticleFlow flow;
    double entropy = 0.0;
  };
  Evaluation evaluate(std::span<const Point> positions, std::span<const double> weights) const;

  ParticleEnsemble step(const ParticleEnsemble& mu, double dt, Integrator integrator) const;
  Diagnostics diagnostics(const ParticleEnsemble& mu) const;
  Diagnostics diagnostics(const ParticleEnsemble& mu, const Evaluation& e) const;

 private:

  ParticleEntropy entropy_;
  double gamma_;
  CollisionOptions opts_;
};

/// One step with the default auxiliary grid built around mu.
ParticleEnsemble step(const ParticleEnsemble& mu, const Kernel& kernel, double gamma, double dt,
                      Integrator integrator, const CollisionOptions& opts = {});

/// Integrates to t_end, recording every `record_every` steps and at the end.
/// Throws StepDiverged if a particle leaves the ball of radius 10 (max|v_i(0)| + 1).
Trajectory run(const ParticleEnsemble& mu0, const SolverConfig& config, const Kernel& kernel, double gamma);

/// H(T) - H(0) + trapezoid integral of D: lhs = H(T) - H(0), rhs = integral.
struct EdiAudit {
  double lhs = 0.0;
  double rhs = 0.0;
  double residual = 0.0;
};
EdiAudit edi_audit(const Trajectory& traj);

/// Largest increase between consecutive recorded H_eps values against a tolerance.
struct MonotonicityReport {
  double max_increase = 0.0;
  double tolerance = 0.0;
  bool pass = true;
};
MonotonicityReport check_entropy_monotone(const Trajectory& traj, double tolerance);
/// 10 dt^2 max|dD/dt| plus a rounding floor of 64 machine epsilons times max|H|.
double monotonicity_tolerance(const Trajectory& traj, double dt);

/// Relative RMS mismatch between the midpoint difference quotient of H_eps and
/// minus the averaged dissipation over consecutive records.
double chain_rule_rms(const Trajectory& traj);

}  // namespace landau
