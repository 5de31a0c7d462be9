#pragma once

#include <span>
#include <utility>

#include "landau/core/grid.hpp"
#include "landau/core/measures.hpp"
#include "landau/kernels/kernel.hpp"

namespace landau {

/// Constant C with |log(mu*G)(v)| <= C <v/eps>, built from the Chebyshev radius
/// R = sqrt(2E). Requires s <= 1. Throws MomentBoundViolated if m_2(mu) > E.
double carlen_carvalho_bound(const ParticleEnsemble& mu, const Kernel& kernel, double E);
double carlen_carvalho_bound(const GridDensity& f, const Kernel& kernel, double E);
/// Moment-free form used by both overloads.
double carlen_carvalho_constant(const Kernel& kernel, double E);

/// Explicit lower bound on H_eps over measures with m_2 <= E:
/// H_eps >= a - b (E + eps^2 m_2(G))^{1/2}.
double regularized_entropy_lower_bound(const Kernel& kernel, double E);

struct InequalitySides {
  double lhs = 0.0;
  double rhs = 0.0;
};

/// <x>^p / <y>^p against 2^{|p|/2} <x-y>^{|p|}.
InequalitySides peetre_ratio(const Point& x, const Point& y, double p);

/// C = 2^{|p|/2} C_{|p|} (1 + eps^{|p|} m_{|p|}(G)) with C_q = max(1, 2^{q/2-1}).
double weighted_convolution_bound(const Kernel& kernel, double p);

/// Sup over targets of |grad log(mu*G)| and of max_ij |d_ij log(mu*G)|.
struct LogDerivativeSup {
  double first = 0.0;
  double second = 0.0;
};
LogDerivativeSup log_derivative_sup(const Kernel& kernel, const ParticleEnsemble& mu, std::span<const Point> targets);

}  // namespace landau
