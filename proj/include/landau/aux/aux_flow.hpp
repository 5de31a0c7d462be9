#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "landau/collision/collision.hpp"
#include "landau/core/measures.hpp"
#include "landau/kernels/kernel.hpp"

namespace landau {

/// Quintic smoothstep cutoffs: phi = 1 on |v| <= R1, 0 on |v| >= R1 + 1;
/// psi = 0 on |z| <= 1/R2, 1 on |z| >= 2/R2.
struct CutoffSpec {
  double R1 = 4.0;
  double R2 = 4.0;

  void validate(const char* where = "aux_flow.CutoffSpec") const;
  double phi(const Point& v) const;
  double psi(const Point& z) const;
};

/// C^2 quintic step: 0 for x <= 0, 1 for x >= 1.
double smoothstep5(double x);

/// Pair kernel F(v, w) = phi(v) phi(w) psi(v - w) |v - w|^{gamma+2} Pi[v - w](J0(v) - J0(w))
/// with J0 = grad G * log(mu0 * G) frozen at the initial measure.
class FrozenField {
 public:
  FrozenField(const Kernel& kernel, const ParticleEnsemble& mu0, double gamma, const CutoffSpec& cutoffs,
              int n_aux = 0, double scale = 1.0);

  int dim() const { return d_; }
  double gamma() const { return gamma_; }
  const CutoffSpec& cutoffs() const { return cutoffs_; }
  double scale() const { return scale_; }

  /// J0 at many points.
  std::vector<Point> J0(std::span<const Point> points) const;
  Point J0(const Point& v) const;

  /// F given J0 at both arguments.
  Point F(const Point& v, const Point& w, const Point& Jv, const Point& Jw) const;
  Point F(const Point& v, const Point& w) const { return F(v, w, J0(v), J0(w)); }

 private:
  int d_;
  double gamma_;
  CutoffSpec cutoffs_;
  double scale_;
  ParticleEntropy entropy_;
  EntropyField field0_;
};

/// U[mu](v) = -sum_j w_j F(v, v_j).
Point velocity_U(const ParticleEnsemble& mu, const FrozenField& field, const Point& v);
/// Batched form with J0 supplied at targets and sources.
std::vector<Point> velocity_U(std::span<const Point> sources, std::span<const double> weights,
                              std::span<const Point> J_sources, std::span<const Point> targets,
                              std::span<const Point> J_targets, const FrozenField& field);

/// Sampled sups of |F| and of the Frobenius norm of D_v F on the support cube
/// [-(R1+1), R1+1]^d with `per_axis` points per axis.
struct LipschitzConstants {
  double C_inf = 0.0;
  double C_lip = 0.0;
};
LipschitzConstants lipschitz_constants(const FrozenField& field, int per_axis = 0);

/// Curve of particle positions on uniform time nodes; positions are linearly
/// interpolated between nodes, weights are fixed.
struct ParticleCurve {
  int d = 3;
  std::vector<double> times;
  std::vector<std::vector<Point>> positions;
  std::vector<double> weights;

  std::vector<Point> at(double t) const;
  ParticleEnsemble ensemble(std::size_t node) const;
};

/// Constant curve at mu0 on `nodes` uniform nodes over [0, T].
ParticleCurve constant_curve(const ParticleEnsemble& mu0, double T, int nodes = 32);

/// Characteristics of dv/dt = U[mu(t)](v) from time 0 through every node of the
/// curve, `substeps` RK4 steps per node interval. Checks the growth bound
/// |v(t)| <= max(|v0|, R1 + 1) and throws StepDiverged past 1e-8.
std::vector<std::vector<Point>> transport(const ParticleCurve& mu_path, const FrozenField& field,
                                          std::span<const Point> starts, int substeps = 1);
/// Single characteristic to time t (t within the curve's range).
Point flow_map(const ParticleCurve& mu_path, const FrozenField& field, const Point& v0, double t,
               int substeps = 1);

struct FixedPointOptions {
  int nodes = 32;
  int max_iter = 100;
  double tol = 1e-8;
  double safety = 1.5;  ///< C = safety * C_lip in the admissibility test and contraction bound
  int n_aux = 0;
  int lipschitz_samples = 0;
  std::uint64_t seed = 1;
};

struct FixedPointResult {
  ParticleCurve curve;
  int iterations = 0;
  std::vector<double> changes;  ///< sup_t W2 between successive iterates
  std::vector<double> ratios;   ///< changes[i+1] / changes[i]
  double C_lip = 0.0;
  double C = 0.0;
  double T_max = 0.0;
  double contraction_bound = 0.0;  ///< e^{C T} - 1
  bool sliced = false;             ///< W2 estimated by slicing (N > 256 or unequal weights)
};

/// Picard iteration mu -> Phi_mu # mu0 on [0, T]. Throws TimeTooLarge when
/// T >= log 2 / C and NotConverged after max_iter.
FixedPointResult fixed_point_solve(const ParticleEnsemble& mu0, const CutoffSpec& cutoffs, const Kernel& kernel,
                                   double gamma, double T, const FixedPointOptions& opts = {});
FixedPointResult fixed_point_solve(const ParticleEnsemble& mu0, const FrozenField& field, double T,
                                   const FixedPointOptions& opts = {});

}  // namespace landau
