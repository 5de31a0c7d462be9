#pragma once

#include <functional>
#include <span>
#include <vector>

#include "landau/core/grid.hpp"
#include "landau/core/measures.hpp"
#include "landau/kernels/kernel.hpp"

namespace landau {

/// Pi[z] = I - z z^T / |z|^2 restricted to the first d components.
/// Throws ZeroRelativeVelocity when |z| < 1e-14.
Matrix3 projection(const Point& z, int d);

/// |z|^{1+gamma/2} Pi[z] (grad phi(v) - grad phi(v_star)), z = v - v_star.
Point tilde_grad(const std::function<Point(const Point&)>& phi_grad, const Point& v, const Point& v_star,
                 double gamma);

/// Pair exclusion radius. Particle sums skip pairs closer than delta_sing; with
/// delta_sing = 0 a coincident pair under a singular weight (gamma < -2) is an error.
struct CollisionOptions {
  double delta_sing = 0.0;
};

/// Regularised entropy of a particle ensemble evaluated on a fixed auxiliary grid.
/// With rho_k = sum_i w_i G(w_k - v_i) and c_k = (log rho_k + 1) h^d, the field
/// J_i = sum_k c_k grad G(v_i - w_k) is the exact gradient of H_h = sum rho log rho h^d
/// with respect to the particle positions, divided by the weights.
class ParticleEntropy {
 public:
  ParticleEntropy(const Kernel& kernel, const GridSpec& aux);

  const Kernel& kernel() const { return kernel_; }
  const GridSpec& grid() const { return aux_; }

  EntropyField field(std::span<const Point> positions, std::span<const double> weights) const;
  EntropyField field(const ParticleEnsemble& mu) const { return field(mu.positions(), mu.weights()); }
  std::vector<Point> J(const EntropyField& field, std::span<const Point> targets) const;

 private:
  Kernel kernel_;
  GridSpec aux_;
  simd::PointCloud nodes_;
};

/// Default auxiliary grid: cube around the particles widened by 10 eps, with n
/// cells per axis (n <= 0 selects 48 for d <= 2 and 32 for d = 3).
GridSpec default_aux_grid(const ParticleEnsemble& mu, const Kernel& kernel, int n = 0);

/// Pairwise velocities U_i = -sum_j w_j |z|^{2+gamma} Pi[z] (J_i - J_j) and the
/// dissipation 1/2 sum_ij w_i w_j |z|^{2+gamma} |Pi[z](J_i - J_j)|^2. Each unordered pair
/// is evaluated once and added with opposite signs.
struct ParticleFlow {
  std::vector<Point> velocity;
  double dissipation = 0.0;
};
ParticleFlow particle_flow(int d, std::span<const Point> positions, std::span<const double> weights,
                           std::span<const Point> J, double gamma, const CollisionOptions& opts = {});

/// U_eps(v) for a particle ensemble at an arbitrary point (self pair excluded).
Point velocity_field_eps(const ParticleEnsemble& mu, const Kernel& kernel, const Point& v, double gamma,
                         const CollisionOptions& opts = {});
double dissipation_eps(const ParticleEnsemble& mu, const Kernel& kernel, double gamma,
                       const CollisionOptions& opts = {});
/// Same, with an explicit auxiliary grid.
double dissipation_eps(const ParticleEnsemble& mu, const ParticleEntropy& entropy, double gamma,
                       const CollisionOptions& opts = {});

/// Grid versions. J is the finite-difference gradient of the discrete first
/// variation psi, so the weak form matches the discrete entropy exactly.
/// Pairs closer than delta_sing (default h/2, i.e. only the diagonal) are skipped.
std::vector<Point> first_variation_gradient(const Kernel& kernel, const GridDensity& f);
std::vector<Point> velocity_field_eps(const GridDensity& f, const Kernel& kernel, double gamma);
double dissipation_eps(const GridDensity& f, const Kernel& kernel, double gamma);

/// D(f) = 1/2 sum f_k f_l |z|^{2+gamma} |Pi (grad log f_k - grad log f_l)|^2 h^{2d}
/// with central-difference log gradients; cells below 1e-300 are excluded.
double dissipation_exact(const GridDensity& f, double gamma);

/// Generic grid dissipation for a given per-cell gradient field.
double grid_dissipation(const GridDensity& f, std::span<const Point> J, double gamma);

}  // namespace landau
