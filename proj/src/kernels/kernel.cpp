#include "landau/kernels/kernel.hpp"

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "landau/core/error.hpp"

namespace landau {

namespace {

double sphere_area(int d) {
  const double pi = boost::math::constants::pi<double>();
  switch (d) {
    case 1: return 2.0;
    case 2: return 2.0 * pi;
    default: return 4.0 * pi;
  }
}

double radial_integral(int d, double s, double q) {
  using boost::math::quadrature::gauss_kronrod;
  auto integrand = [d, s, q](double r) {
    return std::pow(r, d - 1 + q) * std::exp(-std::pow(1.0 + r * r, 0.5 * s));
  };
  double err = 0.0;
  const double inf = std::numeric_limits<double>::infinity();
  return gauss_kronrod<double, 61>::integrate(integrand, 0.0, inf, 15, 1e-12, &err);
}

}  // namespace

double kernel_normalization(int d, double s) {
  require(d >= 1 && d <= kMaxDim, "kernels.Kernel", "dimension must be 1, 2 or 3");
  require(s > 0.0, "kernels.Kernel", "tail exponent must be positive");
  return 1.0 / (sphere_area(d) * radial_integral(d, s, 0.0));
}

double kernel_moment(int d, double s, double q) {
  require(q >= 0.0, "kernels.kernel_moment", "moment order must be non-negative");
  if (q == 0.0) return 1.0;
  return kernel_normalization(d, s) * sphere_area(d) * radial_integral(d, s, q);
}

Kernel::Kernel(const ModelParams& params) : params_(params) {
  params_.validate("kernels.Kernel");
  normalization_ = kernel_normalization(params_.d, params_.s);
  scale_ = normalization_ * std::pow(params_.epsilon, -params_.d);
  inv_eps2_ = 1.0 / (params_.epsilon * params_.epsilon);
}

simd::KernelShape Kernel::shape() const { return {scale_, inv_eps2_, params_.s}; }

double Kernel::eval(const Point& v) const {
  const double r2 = 1.0 + norm2(v) * inv_eps2_;
  if (params_.s == 1.0) return scale_ * std::exp(-std::sqrt(r2));
  if (params_.s == 2.0) return scale_ * std::exp(-r2);
  return scale_ * std::exp(-std::pow(r2, 0.5 * params_.s));
}

Point Kernel::grad(const Point& v) const {
  const double r2 = 1.0 + norm2(v) * inv_eps2_;
  const double g = eval(v);
  const double slope = params_.s * inv_eps2_ * std::pow(r2, 0.5 * params_.s - 1.0);
  return (-slope * g) * v;
}

Matrix3 Kernel::hessian(const Point& v) const {
  const double s = params_.s;
  const double r2 = 1.0 + norm2(v) * inv_eps2_;
  const double g = eval(v);
  const double slope = s * inv_eps2_ * std::pow(r2, 0.5 * s - 1.0);
  const double curv = s * (s - 2.0) * inv_eps2_ * inv_eps2_ * std::pow(r2, 0.5 * s - 2.0);
  Matrix3 h{};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      h[i][j] = g * ((slope * slope - curv) * v[i] * v[j] - (i == j ? slope : 0.0));
    }
  }
  for (int a = params_.d; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) h[a][b] = h[b][a] = 0.0;
  }
  return h;
}

double convolve_particles(const Kernel& kernel, const ParticleEnsemble& mu, const Point& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) acc += mu.weight(i) * kernel.eval(v - mu.position(i));
  return acc;
}

Point convolve_particles_gradient(const Kernel& kernel, const ParticleEnsemble& mu, const Point& v) {
  Point acc{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < mu.size(); ++i) acc += mu.weight(i) * kernel.grad(v - mu.position(i));
  return acc;
}

std::vector<double> convolve_particles(const Kernel& kernel, const ParticleEnsemble& mu,
                                       std::span<const Point> targets) {
  const simd::PointCloud t(kernel.dim(), targets);
  const simd::PointCloud src(kernel.dim(), mu.positions());
  std::vector<double> out(targets.size());
  simd::density_sum(kernel.shape(), t.view(), src.view(), mu.weights().data(), out.data());
  return out;
}

std::vector<double> convolve_density(const Kernel& kernel, const GridDensity& f) {
  require(f.grid().d == kernel.dim(), "kernels.convolve_density", "kernel and grid dimensions differ");
  const auto nodes = f.grid().nodes();
  const simd::PointCloud cloud(kernel.dim(), nodes);
  std::vector<double> w(f.values().begin(), f.values().end());
  for (double& x : w) x *= f.cell_volume();
  std::vector<double> out(nodes.size());
  simd::density_sum(kernel.shape(), cloud.view(), cloud.view(), w.data(), out.data());
  return out;
}

EntropyField entropy_field(const Kernel& kernel, const GridSpec& grid, simd::PointsView grid_nodes,
                           simd::PointsView sources, const double* weights) {
  EntropyField field;
  field.grid = grid;
  field.rho.resize(grid_nodes.size);
  field.coeff.resize(grid_nodes.size);
  simd::density_sum(kernel.shape(), grid_nodes, sources, weights, field.rho.data());
  const double vol = grid.cell_volume();
  double h = 0.0;
  for (std::size_t k = 0; k < field.rho.size(); ++k) {
    const double r = field.rho[k];
    if (r >= 1e-300) {
      const double lr = std::log(r);
      h += r * lr;
      field.coeff[k] = (lr + 1.0) * vol;
    } else {
      field.coeff[k] = 0.0;
    }
  }
  field.entropy = h * vol;
  return field;
}

EntropyField entropy_field(const Kernel& kernel, const GridDensity& f) {
  require(f.grid().d == kernel.dim(), "kernels.regularized_entropy", "kernel and grid dimensions differ");
  const auto nodes = f.grid().nodes();
  const simd::PointCloud cloud(kernel.dim(), nodes);
  std::vector<double> w(f.values().begin(), f.values().end());
  for (double& x : w) x *= f.cell_volume();
  return entropy_field(kernel, f.grid(), cloud.view(), cloud.view(), w.data());
}

double regularized_entropy(const Kernel& kernel, const GridDensity& f) { return entropy_field(kernel, f).entropy; }

std::vector<double> first_variation(const Kernel& kernel, const EntropyField& field) {
  const auto nodes = field.grid.nodes();
  const simd::PointCloud cloud(kernel.dim(), nodes);
  std::vector<double> psi(nodes.size());
  simd::density_sum(kernel.shape(), cloud.view(), cloud.view(), field.coeff.data(), psi.data());
  return psi;
}

}  // namespace landau
