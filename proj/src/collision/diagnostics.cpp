#include "landau/collision/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "landau/core/error.hpp"

namespace landau {

InequalitySides cross_identity_check(const Point& x, const Point& y) {
  require(norm2(x) > 0.0, "collision.cross_identity_check", "x must be non-zero");
  return {norm2(x) * dot(y, project_orthogonal(x, y)), norm2(cross(x, y))};
}

FisherPair weighted_fisher(const GridDensity& f, double gamma) {
  require(f.grid().d == 3, "collision.weighted_fisher", "cross Fisher information needs d = 3");
  require(gamma > -3.0 && gamma <= 0.0, "collision.weighted_fisher", "gamma must lie in (-3, 0]");
  std::vector<double> logf(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) logf[k] = std::log(std::max(f[k], 1e-300));
  const auto J = grid_gradient(f.grid(), logf);
  FisherPair out;
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f[k] < 1e-300) continue;
    const Point v = f.grid().node(k);
    const double w = f[k] * std::pow(1.0 + norm2(v), 0.5 * gamma);
    out.fisher += w * norm2(J[k]);
    out.cross_fisher += w * norm2(cross(v, J[k]));
  }
  out.fisher *= f.cell_volume();
  out.cross_fisher *= f.cell_volume();
  return out;
}

namespace {

// Mean of |u|^gamma over the unit cube centred at the origin (midpoint rule on
// a 32^3 sub-lattice, which never samples the origin).
double unit_cube_singular_mean(double gamma) {
  constexpr int m = 32;
  double acc = 0.0;
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < m; ++k) {
        const double x = (i + 0.5) / m - 0.5;
        const double y = (j + 0.5) / m - 0.5;
        const double z = (k + 0.5) / m - 0.5;
        acc += std::pow(x * x + y * y + z * z, 0.5 * gamma);
      }
    }
  }
  return acc / (m * m * m);
}

}  // namespace

SingularMomentConstants singular_moment_bound(const GridDensity& f, double gamma, double eta) {
  if (!(gamma > -3.0 && gamma <= 0.0)) {
    raise(ErrorKind::InvalidExponent, "collision.singular_moment_bound", "gamma must lie in (-3, 0]");
  }
  if (!(eta > 0.0 && eta <= gamma + 3.0)) {
    raise(ErrorKind::InvalidExponent, "collision.singular_moment_bound", "eta must lie in (0, gamma + 3]");
  }
  const auto& g = f.grid();
  require(g.d == 3, "collision.singular_moment_bound", "needs d = 3");
  const auto nodes = g.nodes();
  const double vol = g.cell_volume();
  const double diag = gamma == 0.0 ? 1.0 : std::pow(g.spacing(), gamma) * unit_cube_singular_mean(gamma);
  SingularMomentConstants out;
  for (std::size_t k = 0; k < nodes.size(); ++k) {
    double a1 = 0.0;
    double a2 = 0.0;
    for (std::size_t l = 0; l < nodes.size(); ++l) {
      const double w = l == k ? diag : std::pow(norm2(nodes[k] - nodes[l]), 0.5 * gamma);
      a1 += f[l] * w;
      a2 += f[l] * norm2(nodes[l]) * w;
    }
    const double scale = std::pow(1.0 + norm2(nodes[k]), 0.5 * gamma);
    out.C1 = std::max(out.C1, a1 * vol / scale);
    out.C2 = std::max(out.C2, a2 * vol / scale);
  }
  return out;
}

double first_variation_pair_bound(double gamma, double epsilon, const Point& v, const Point& v_star) {
  require(gamma >= -4.0 && gamma <= 0.0, "collision.first_variation_bound", "gamma must lie in [-4, 0]");
  if (gamma >= -2.0) {
    const double q = 1.0 + 0.5 * gamma;
    return std::pow(2.0, q) * (std::pow(norm(v), q) + std::pow(norm(v_star), q)) * 2.0 / epsilon;
  }
  const double r = norm(v - v_star);
  if (r >= 1.0) return 2.0 / epsilon;
  return 4.0 / (epsilon * epsilon) * std::pow(r, 2.0 + 0.5 * gamma);
}

Point twisted_ibp_residual(const GridSpec& grid, std::span<const double> f, std::span<const double> g) {
  require(grid.d == 3, "collision.twisted_ibp", "needs d = 3");
  const auto df = grid_gradient(grid, f);
  const auto dg = grid_gradient(grid, g);
  Point acc{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < f.size(); ++k) {
    const Point v = grid.node(k);
    acc += f[k] * cross(v, dg[k]);
    acc += g[k] * cross(v, df[k]);
  }
  return grid.cell_volume() * acc;
}

InequalitySides jensen_claim(const Kernel& kernel, const GridSpec& grid, std::span<const double> f, std::size_t k) {
  require(grid.d == 3, "collision.jensen_claim", "needs d = 3");
  const auto df = grid_gradient(grid, f);
  const Point v = grid.node(k);
  const double vol = grid.cell_volume();
  Point conv_grad{0.0, 0.0, 0.0};
  double conv = 0.0;
  double rhs = 0.0;
  for (std::size_t l = 0; l < f.size(); ++l) {
    const Point w = grid.node(l);
    const double a = kernel.eval(v - w) * vol;
    conv_grad += a * df[l];
    conv += a * f[l];
    if (f[l] >= 1e-300) rhs += a * norm2(cross(w, df[l])) / f[l];
  }
  return {norm2(cross(v, conv_grad)) / conv, rhs};
}

}  // namespace landau
