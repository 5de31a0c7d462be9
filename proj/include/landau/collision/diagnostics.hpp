#pragma once

#include <span>

#include "landau/core/grid.hpp"
#include "landau/kernels/bounds.hpp"
#include "landau/kernels/kernel.hpp"

namespace landau {

/// |x|^2 (y . Pi[x] y) against |x cross y|^2 (d = 3).
InequalitySides cross_identity_check(const Point& x, const Point& y);

/// int f <v>^gamma |grad log f|^2 and int f <v>^gamma |v x grad log f|^2 (d = 3).
struct FisherPair {
  double fisher = 0.0;
  double cross_fisher = 0.0;
};
FisherPair weighted_fisher(const GridDensity& f, double gamma);

/// Empirical constants sup_v (int f_* |v - v_*|^gamma) / <v>^gamma and the same with
/// |v_*|^2 inside. The diagonal cell uses the cell average of |z|^gamma.
/// gamma in (-3, 0], eta in (0, gamma + 3], d = 3; InvalidExponent otherwise.
struct SingularMomentConstants {
  double C1 = 0.0;
  double C2 = 0.0;
};
SingularMomentConstants singular_moment_bound(const GridDensity& f, double gamma, double eta);

/// Proof-constant ceiling on |tilde-grad of the first variation| at a pair (s = 1).
double first_variation_pair_bound(double gamma, double epsilon, const Point& v, const Point& v_star);

/// int (v x grad g) f + int g (v x grad f) with finite-difference gradients (d = 3).
Point twisted_ibp_residual(const GridSpec& grid, std::span<const double> f, std::span<const double> g);

/// Both sides of |v x (grad f * G)|^2 / (f * G) <= G * (|w x grad f|^2 / f) at node k.
InequalitySides jensen_claim(const Kernel& kernel, const GridSpec& grid, std::span<const double> f, std::size_t k);

}  // namespace landau
