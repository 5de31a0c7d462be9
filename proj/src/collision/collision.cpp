#include "landau/collision/collision.hpp"

#include <algorithm>
#include <cmath>

#include "landau/core/error.hpp"
#include "landau/core/parallel.hpp"

namespace landau {

namespace {

constexpr double kCoincident = 1e-14;

inline double strong_weight(double r2, double gamma) {
  if (gamma == 0.0) return r2;
  return std::pow(r2, 1.0 + 0.5 * gamma);
}

}  // namespace

Matrix3 projection(const Point& z, int d) {
  const double r2 = norm2(z);
  if (std::sqrt(r2) < kCoincident) raise(ErrorKind::ZeroRelativeVelocity, "collision.projection", "|z| below 1e-14");
  Matrix3 p{};
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) p[i][j] = (i == j ? 1.0 : 0.0) - z[i] * z[j] / r2;
  }
  return p;
}

Point tilde_grad(const std::function<Point(const Point&)>& phi_grad, const Point& v, const Point& v_star,
                 double gamma) {
  const Point z = v - v_star;
  if (norm(z) < kCoincident) raise(ErrorKind::ZeroRelativeVelocity, "collision.tilde_grad", "v equals v_star");
  const double w = std::pow(norm(z), 1.0 + 0.5 * gamma);
  return w * project_orthogonal(z, phi_grad(v) - phi_grad(v_star));
}

ParticleEntropy::ParticleEntropy(const Kernel& kernel, const GridSpec& aux)
    : kernel_(kernel), aux_(aux), nodes_(aux.d, aux.nodes()) {
  aux_.validate("particle_solver.aux_grid");
  require(aux_.d == kernel.dim(), "particle_solver.aux_grid", "aux grid and kernel dimensions differ");
}

EntropyField ParticleEntropy::field(std::span<const Point> positions, std::span<const double> weights) const {
  const simd::PointCloud src(kernel_.dim(), positions);
  return entropy_field(kernel_, aux_, nodes_.view(), src.view(), weights.data());
}

std::vector<Point> ParticleEntropy::J(const EntropyField& field, std::span<const Point> targets) const {
  const simd::PointCloud tgt(kernel_.dim(), targets);
  std::vector<double> out[3];
  for (auto& o : out) o.assign(targets.size(), 0.0);
  simd::gradient_sum(kernel_.shape(), tgt.view(), nodes_.view(), field.coeff.data(), out[0].data(), out[1].data(),
                     out[2].data());
  std::vector<Point> J(targets.size(), Point{0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < targets.size(); ++i) {
    for (int a = 0; a < kernel_.dim(); ++a) J[i][a] = out[a][i];
  }
  return J;
}

GridSpec default_aux_grid(const ParticleEnsemble& mu, const Kernel& kernel, int n) {
  const int d = kernel.dim();
  if (n <= 0) n = d <= 2 ? 48 : 32;
  Point lo{0.0, 0.0, 0.0};
  Point hi{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) {
    lo[a] = hi[a] = mu.position(0)[a];
  }
  for (const auto& p : mu.positions()) {
    for (int a = 0; a < d; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  GridSpec g;
  g.d = d;
  g.n = n;
  double half = 0.0;
  for (int a = 0; a < d; ++a) {
    g.center[a] = 0.5 * (lo[a] + hi[a]);
    half = std::max(half, 0.5 * (hi[a] - lo[a]));
  }
  g.half_width = half + 10.0 * kernel.epsilon();
  return g;
}

ParticleFlow particle_flow(int d, std::span<const Point> positions, std::span<const double> weights,
                           std::span<const Point> J, double gamma, const CollisionOptions& opts) {
  const std::size_t n = positions.size();
  ParticleFlow out;
  out.velocity.assign(n, Point{0.0, 0.0, 0.0});
  if (d == 1) return out;  // Pi vanishes identically
  const double cut2 = opts.delta_sing * opts.delta_sing;
  double diss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point xi = positions[i];
    const Point Ji = J[i];
    Point Ui{0.0, 0.0, 0.0};
    for (std::size_t j = i + 1; j < n; ++j) {
      const Point z = xi - positions[j];
      const double r2 = norm2(z);
      if (r2 < cut2) continue;
      if (r2 < kCoincident * kCoincident) {
        if (gamma < -2.0 && opts.delta_sing == 0.0) {
          raise(ErrorKind::SingularPair, "collision.velocity_field_eps",
                "coincident particles " + std::to_string(i) + " and " + std::to_string(j) +
                    " under a singular weight; set delta_sing > 0");
        }
        continue;
      }
      const double K = strong_weight(r2, gamma);
      const Point diff = Ji - J[j];
      const Point pd = diff - (dot(z, diff) / r2) * z;
      const Point F = K * pd;
      Ui -= weights[j] * F;
      out.velocity[j] += weights[i] * F;
      diss += weights[i] * weights[j] * K * norm2(pd);
    }
    out.velocity[i] += Ui;
  }
  out.dissipation = diss;
  return out;
}

Point velocity_field_eps(const ParticleEnsemble& mu, const Kernel& kernel, const Point& v, double gamma,
                         const CollisionOptions& opts) {
  const ParticleEntropy ent(kernel, default_aux_grid(mu, kernel));
  const auto field = ent.field(mu);
  std::vector<Point> targets(mu.positions().begin(), mu.positions().end());
  targets.push_back(v);
  const auto J = ent.J(field, targets);
  const Point Jv = J.back();
  Point U{0.0, 0.0, 0.0};
  if (mu.dim() == 1) return U;
  const double cut2 = opts.delta_sing * opts.delta_sing;
  for (std::size_t j = 0; j < mu.size(); ++j) {
    const Point z = v - mu.position(j);
    const double r2 = norm2(z);
    if (r2 < kCoincident * kCoincident || r2 < cut2) continue;
    const Point diff = Jv - J[j];
    U -= (mu.weight(j) * strong_weight(r2, gamma)) * project_orthogonal(z, diff);
  }
  return U;
}

double dissipation_eps(const ParticleEnsemble& mu, const ParticleEntropy& entropy, double gamma,
                       const CollisionOptions& opts) {
  const auto field = entropy.field(mu);
  const auto J = entropy.J(field, mu.positions());
  return particle_flow(mu.dim(), mu.positions(), mu.weights(), J, gamma, opts).dissipation;
}

double dissipation_eps(const ParticleEnsemble& mu, const Kernel& kernel, double gamma, const CollisionOptions& opts) {
  return dissipation_eps(mu, ParticleEntropy(kernel, default_aux_grid(mu, kernel)), gamma, opts);
}

std::vector<Point> first_variation_gradient(const Kernel& kernel, const GridDensity& f) {
  const auto field = entropy_field(kernel, f);
  const auto psi = first_variation(kernel, field);
  return grid_gradient(f.grid(), psi);
}

std::vector<Point> velocity_field_eps(const GridDensity& f, const Kernel& kernel, double gamma) {
  const auto J = first_variation_gradient(kernel, f);
  const auto& g = f.grid();
  const auto nodes = g.nodes();
  const double vol = g.cell_volume();
  const double cut2 = 0.25 * g.spacing() * g.spacing();
  std::vector<Point> U(nodes.size(), Point{0.0, 0.0, 0.0});
  if (g.d == 1) return U;
  parallel_for(nodes.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      Point acc{0.0, 0.0, 0.0};
      for (std::size_t l = 0; l < nodes.size(); ++l) {
        const Point z = nodes[k] - nodes[l];
        const double r2 = norm2(z);
        if (r2 < cut2) continue;
        acc -= (f[l] * vol * strong_weight(r2, gamma)) * project_orthogonal(z, J[k] - J[l]);
      }
      U[k] = acc;
    }
  });
  return U;
}

double grid_dissipation(const GridDensity& f, std::span<const Point> J, double gamma) {
  const auto& g = f.grid();
  if (g.d == 1) return 0.0;
  const auto nodes = g.nodes();
  const double vol = g.cell_volume();
  const double cut2 = 0.25 * g.spacing() * g.spacing();
  std::vector<double> partial(nodes.size(), 0.0);
  parallel_for(nodes.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t k = begin; k < end; ++k) {
      if (f[k] < 1e-300) continue;
      double acc = 0.0;
      for (std::size_t l = k + 1; l < nodes.size(); ++l) {
        if (f[l] < 1e-300) continue;
        const Point z = nodes[k] - nodes[l];
        const double r2 = norm2(z);
        if (r2 < cut2) continue;
        acc += f[l] * strong_weight(r2, gamma) * norm2(project_orthogonal(z, J[k] - J[l]));
      }
      partial[k] = f[k] * acc;
    }
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total * vol * vol;
}

double dissipation_eps(const GridDensity& f, const Kernel& kernel, double gamma) {
  return grid_dissipation(f, first_variation_gradient(kernel, f), gamma);
}

double dissipation_exact(const GridDensity& f, double gamma) {
  std::vector<double> logf(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) logf[k] = std::log(std::max(f[k], 1e-300));
  return grid_dissipation(f, grid_gradient(f.grid(), logf), gamma);
}

}  // namespace landau
