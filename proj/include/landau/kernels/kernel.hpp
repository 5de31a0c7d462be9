#pragma once

#include <array>
#include <span>
#include <vector>

#include "landau/core/grid.hpp"
#include "landau/core/measures.hpp"
#include "landau/core/params.hpp"
#include "landau/simd/kernel_sums.hpp"

namespace landau {

using Matrix3 = std::array<std::array<double, 3>, 3>;

/// G^{s,eps}(v) = eps^{-d} C_{s,d} exp(-<v/eps>^s).
class Kernel {
 public:
  explicit Kernel(const ModelParams& params);

  const ModelParams& params() const { return params_; }
  int dim() const { return params_.d; }
  double epsilon() const { return params_.epsilon; }
  double s() const { return params_.s; }
  /// C_{s,d}, normalising the unit-scale kernel.
  double normalization() const { return normalization_; }

  double eval(const Point& v) const;
  Point grad(const Point& v) const;
  Matrix3 hessian(const Point& v) const;

  /// Shape descriptor for the vectorised sums.
  simd::KernelShape shape() const;

 private:
  ModelParams params_;
  double normalization_;
  double scale_;
  double inv_eps2_;
};

/// C_{s,d} = 1 / (|S^{d-1}| * int_0^inf r^{d-1} exp(-(1+r^2)^{s/2}) dr).
double kernel_normalization(int d, double s);

/// m_q(G) = int |w|^q G^{s,1}(w) dw for the unit-scale kernel.
double kernel_moment(int d, double s, double q);

/// (mu * G)(v) and its gradient at a single point.
double convolve_particles(const Kernel& kernel, const ParticleEnsemble& mu, const Point& v);
Point convolve_particles_gradient(const Kernel& kernel, const ParticleEnsemble& mu, const Point& v);

/// Batched (mu * G) at many targets.
std::vector<double> convolve_particles(const Kernel& kernel, const ParticleEnsemble& mu, std::span<const Point> targets);

/// Node values of f * G on the grid of f: rho_k = sum_l G(v_k - v_l) f_l h^d.
std::vector<double> convolve_density(const Kernel& kernel, const GridDensity& f);

/// Regularised density rho = mu * G sampled on a grid together with the discrete
/// entropy H = sum rho log rho h^d and the coefficients c_k = (log rho_k + 1) h^d
/// whose kernel sums give the first variation of H.
struct EntropyField {
  GridSpec grid;
  std::vector<double> rho;
  std::vector<double> coeff;
  double entropy = 0.0;
};

/// Entropy field of a weighted point source set evaluated on `grid`.
EntropyField entropy_field(const Kernel& kernel, const GridSpec& grid, simd::PointsView grid_nodes,
                           simd::PointsView sources, const double* weights);

/// H_eps of a grid density, quadrature on its own grid.
double regularized_entropy(const Kernel& kernel, const GridDensity& f);
EntropyField entropy_field(const Kernel& kernel, const GridDensity& f);

/// First variation psi_l = sum_k G(v_l - v_k) c_k at the nodes of f's grid.
std::vector<double> first_variation(const Kernel& kernel, const EntropyField& field);

}  // namespace landau
