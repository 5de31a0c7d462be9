#include "landau/kernels/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "landau/core/error.hpp"

namespace landau {

double carlen_carvalho_constant(const Kernel& kernel, double E) {
  require(E > 0.0, "kernels.carlen_carvalho_bound", "moment bound E must be positive");
  require(kernel.s() <= 1.0, "kernels.carlen_carvalho_bound", "linear log growth needs s <= 1");
  const double eps = kernel.epsilon();
  const double peak = kernel.eval(Point{0.0, 0.0, 0.0}) * std::exp(1.0);  // eps^{-d} C_{s,d}
  const double R = std::sqrt(2.0 * E);
  const double bR = std::sqrt(1.0 + R * R / (eps * eps));
  // log(mu*G) <= log(peak) - 1 and >= log(peak/2) - sqrt2 (<v/eps> + <R/eps>); <v/eps> >= 1.
  const double upper = std::abs(std::log(peak) - 1.0);
  const double lower = std::abs(std::log(0.5 * peak)) + std::sqrt(2.0) * bR;
  return std::max(upper, lower) + std::sqrt(2.0);
}

double carlen_carvalho_bound(const ParticleEnsemble& mu, const Kernel& kernel, double E) {
  const double m2 = moment(mu, 2.0);
  if (m2 > E) {
    raise(ErrorKind::MomentBoundViolated, "kernels.carlen_carvalho_bound",
          "second moment " + std::to_string(m2) + " exceeds E = " + std::to_string(E));
  }
  return carlen_carvalho_constant(kernel, E);
}

double carlen_carvalho_bound(const GridDensity& f, const Kernel& kernel, double E) {
  const double m2 = moment(f, 2.0);
  if (m2 > E) {
    raise(ErrorKind::MomentBoundViolated, "kernels.carlen_carvalho_bound",
          "second moment " + std::to_string(m2) + " exceeds E = " + std::to_string(E));
  }
  return carlen_carvalho_constant(kernel, E);
}

double regularized_entropy_lower_bound(const Kernel& kernel, double E) {
  require(E > 0.0, "jko.entropy_lower_bound", "moment bound E must be positive");
  require(kernel.s() <= 1.0, "jko.entropy_lower_bound", "linear log growth needs s <= 1");
  const double eps = kernel.epsilon();
  const double peak = kernel.eval(Point{0.0, 0.0, 0.0}) * std::exp(1.0);
  const double R = std::sqrt(2.0 * E);
  const double bR = std::sqrt(1.0 + R * R / (eps * eps));
  // log rho >= a - sqrt2 <v/eps>, <v/eps> <= max(1, 1/eps) <v>, then Cauchy-Schwarz
  // with int <v>^2 rho = m_2(mu) + eps^2 m_2(G).
  const double a = std::log(0.5 * peak) - std::sqrt(2.0) * bR;
  const double b = std::sqrt(2.0) * std::max(1.0, 1.0 / eps);
  const double m2g = kernel_moment(kernel.dim(), kernel.s(), 2.0);
  return std::min(a, 0.0) - b * std::sqrt(E + eps * eps * m2g);
}

InequalitySides peetre_ratio(const Point& x, const Point& y, double p) {
  const double bx = bracket(x);
  const double by = bracket(y);
  const double bxy = bracket(x - y);
  return {std::pow(bx / by, p), std::pow(2.0, 0.5 * std::abs(p)) * std::pow(bxy, std::abs(p))};
}

double weighted_convolution_bound(const Kernel& kernel, double p) {
  const double q = std::abs(p);
  const double cq = std::max(1.0, std::pow(2.0, 0.5 * q - 1.0));
  const double mq = kernel_moment(kernel.dim(), kernel.s(), q);
  return std::pow(2.0, 0.5 * q) * cq * (1.0 + std::pow(kernel.epsilon(), q) * mq);
}

LogDerivativeSup log_derivative_sup(const Kernel& kernel, const ParticleEnsemble& mu,
                                    std::span<const Point> targets) {
  LogDerivativeSup sup;
  const int d = kernel.dim();
  for (const auto& v : targets) {
    double rho = 0.0;
    Point g{0.0, 0.0, 0.0};
    Matrix3 h{};
    for (std::size_t i = 0; i < mu.size(); ++i) {
      const Point z = v - mu.position(i);
      const double w = mu.weight(i);
      rho += w * kernel.eval(z);
      g += w * kernel.grad(z);
      const Matrix3 hz = kernel.hessian(z);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b) h[a][b] += w * hz[a][b];
    }
    if (rho <= 0.0) continue;
    sup.first = std::max(sup.first, norm(g) / rho);
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) {
        const double val = h[a][b] / rho - g[a] * g[b] / (rho * rho);
        sup.second = std::max(sup.second, std::abs(val));
      }
    }
  }
  return sup;
}

}  // namespace landau
