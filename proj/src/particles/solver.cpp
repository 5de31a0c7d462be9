#include "landau/particles/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "landau/core/error.hpp"

namespace landau {

std::string_view to_string(Integrator integrator) {
  return integrator == Integrator::Rk4 ? "rk4" : "explicit-euler";
}

Integrator parse_integrator(std::string_view name) {
  if (name == "rk4") return Integrator::Rk4;
  if (name == "explicit-euler" || name == "euler") return Integrator::ExplicitEuler;
  raise(ErrorKind::InvalidArgument, "particle_solver.config", "unknown integrator '" + std::string(name) + "'");
}

void SolverConfig::validate() const {
  const char* where = "particle_solver.config";
  require(dt > 0.0 && std::isfinite(dt), where, "dt must be positive");
  require(t_end > 0.0 && std::isfinite(t_end), where, "t_end must be positive");
  require(dt <= t_end, where, "dt must not exceed t_end");
  require(record_every >= 1, where, "record_every must be at least 1");
  require(delta_sing >= 0.0, where, "delta_sing must be non-negative");
  require(n_aux == 0 || n_aux >= 3, where, "n_aux must be 0 (default) or at least 3");
}

ParticleSolver::ParticleSolver(const Kernel& kernel, double gamma, const GridSpec& aux, CollisionOptions opts)
    : entropy_(kernel, aux), gamma_(gamma), opts_(opts) {
  require(gamma >= -4.0 && gamma <= 0.0, "particle_solver.step", "gamma must lie in [-4, 0]");
}

ParticleSolver::Evaluation ParticleSolver::evaluate(std::span<const Point> positions,
                                                    std::span<const double> weights) const {
  Evaluation e;
  const auto field = entropy_.field(positions, weights);
  const auto J = entropy_.J(field, positions);
  e.flow = particle_flow(entropy_.kernel().dim(), positions, weights, J, gamma_, opts_);
  e.entropy = field.entropy;
  return e;
}

namespace {

std::vector<Point> axpy(std::span<const Point> x, double a, std::span<const Point> k) {
  std::vector<Point> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] + a * k[i];
  return out;
}

// Advances positions given the velocity at the start of the step.
std::vector<Point> advance(const ParticleSolver& solver, std::span<const Point> x, std::span<const double> w,
                           const std::vector<Point>& k1, double dt, Integrator integrator) {
  if (integrator == Integrator::ExplicitEuler) return axpy(x, dt, k1);
  const auto k2 = solver.evaluate(axpy(x, 0.5 * dt, k1), w).flow.velocity;
  const auto k3 = solver.evaluate(axpy(x, 0.5 * dt, k2), w).flow.velocity;
  const auto k4 = solver.evaluate(axpy(x, dt, k3), w).flow.velocity;
  std::vector<Point> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = x[i] + (dt / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

double max_speed(std::span<const Point> x) {
  double m = 0.0;
  for (const auto& p : x) m = std::max(m, norm(p));
  return m;
}

}  // namespace

ParticleEnsemble ParticleSolver::step(const ParticleEnsemble& mu, double dt, Integrator integrator) const {
  require(dt > 0.0, "particle_solver.step", "dt must be positive");
  const auto k1 = evaluate(mu.positions(), mu.weights()).flow.velocity;
  return mu.with_positions(advance(*this, mu.positions(), mu.weights(), k1, dt, integrator));
}

Diagnostics ParticleSolver::diagnostics(const ParticleEnsemble& mu, const Evaluation& e) const {
  Diagnostics d;
  d.mass = total_mass(mu);
  d.momentum = momentum(mu);
  d.energy = kinetic_energy(mu);
  d.entropy = std::numeric_limits<double>::quiet_NaN();
  d.regularized_entropy = e.entropy;
  d.dissipation = e.flow.dissipation;
  return d;
}

Diagnostics ParticleSolver::diagnostics(const ParticleEnsemble& mu) const {
  return diagnostics(mu, evaluate(mu.positions(), mu.weights()));
}

ParticleEnsemble step(const ParticleEnsemble& mu, const Kernel& kernel, double gamma, double dt,
                      Integrator integrator, const CollisionOptions& opts) {
  const ParticleSolver solver(kernel, gamma, default_aux_grid(mu, kernel), opts);
  return solver.step(mu, dt, integrator);
}

Trajectory run(const ParticleEnsemble& mu0, const SolverConfig& config, const Kernel& kernel, double gamma) {
  config.validate();
  require(mu0.dim() == kernel.dim(), "particle_solver.run", "ensemble and kernel dimensions differ");
  const ParticleSolver solver(kernel, gamma, default_aux_grid(mu0, kernel, config.n_aux),
                              CollisionOptions{config.delta_sing});
  const double limit = 10.0 * (max_speed(mu0.positions()) + 1.0);
  const auto steps = static_cast<long>(std::ceil(config.t_end / config.dt - 1e-9));

  Trajectory traj;
  ParticleEnsemble mu = mu0;
  double t = 0.0;
  for (long n = 0; n < steps; ++n) {
    const auto e = solver.evaluate(mu.positions(), mu.weights());
    if (n % config.record_every == 0) traj.push(t, mu, solver.diagnostics(mu, e));
    const double dt = std::min(config.dt, config.t_end - t);
    auto next = advance(solver, mu.positions(), mu.weights(), e.flow.velocity, dt, config.integrator);
    const double speed = max_speed(next);
    if (!(speed <= limit)) {
      raise(ErrorKind::StepDiverged, "particle_solver.run",
            "particle speed " + std::to_string(speed) + " exceeds " + std::to_string(limit) + " at t = " +
                std::to_string(t + dt));
    }
    mu = mu.with_positions(std::move(next));
    t = n + 1 == steps ? config.t_end : t + dt;
  }
  traj.push(t, mu, solver.diagnostics(mu));
  return traj;
}

EdiAudit edi_audit(const Trajectory& traj) {
  require(traj.size() >= 1, "particle_solver.edi_audit", "empty trajectory");
  const auto t = traj.times();
  const auto& d = traj.diagnostics();
  EdiAudit out;
  out.lhs = d.back().regularized_entropy - d.front().regularized_entropy;
  for (std::size_t k = 0; k + 1 < traj.size(); ++k) {
    out.rhs += 0.5 * (t[k + 1] - t[k]) * (d[k].dissipation + d[k + 1].dissipation);
  }
  out.residual = out.lhs + out.rhs;
  return out;
}

MonotonicityReport check_entropy_monotone(const Trajectory& traj, double tolerance) {
  MonotonicityReport r;
  r.tolerance = tolerance;
  const auto& d = traj.diagnostics();
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    r.max_increase = std::max(r.max_increase, d[k + 1].regularized_entropy - d[k].regularized_entropy);
  }
  r.pass = r.max_increase <= tolerance;
  return r;
}

double monotonicity_tolerance(const Trajectory& traj, double dt) {
  const auto t = traj.times();
  const auto& d = traj.diagnostics();
  double slope = 0.0;
  double hmax = 0.0;
  for (std::size_t k = 0; k < d.size(); ++k) {
    hmax = std::max(hmax, std::abs(d[k].regularized_entropy));
    if (k + 1 < d.size() && t[k + 1] > t[k]) {
      slope = std::max(slope, std::abs(d[k + 1].dissipation - d[k].dissipation) / (t[k + 1] - t[k]));
    }
  }
  return 10.0 * dt * dt * slope + 64.0 * std::numeric_limits<double>::epsilon() * hmax;
}

double chain_rule_rms(const Trajectory& traj) {
  const auto t = traj.times();
  const auto& d = traj.diagnostics();
  double err = 0.0;
  double ref = 0.0;
  for (std::size_t k = 0; k + 1 < d.size(); ++k) {
    const double dh = (d[k + 1].regularized_entropy - d[k].regularized_entropy) / (t[k + 1] - t[k]);
    const double dm = 0.5 * (d[k].dissipation + d[k + 1].dissipation);
    err += (dh + dm) * (dh + dm);
    ref += dm * dm;
  }
  return ref > 0.0 ? std::sqrt(err / ref) : std::sqrt(err);
}

}  // namespace landau
