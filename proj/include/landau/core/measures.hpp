#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "landau/core/grid.hpp"
#include "landau/core/point.hpp"

namespace landau {

/// Weighted particle cloud approximating a probability measure.
class ParticleEnsemble {
 public:
  ParticleEnsemble() = default;

  /// Weights are renormalised to sum to one; all must be non-negative.
  ParticleEnsemble(int d, std::vector<Point> positions, std::vector<double> weights);

  /// Equal weights 1/N.
  static ParticleEnsemble uniform(int d, std::vector<Point> positions);

  int dim() const { return d_; }
  std::size_t size() const { return positions_.size(); }
  std::span<const Point> positions() const { return positions_; }
  std::span<const double> weights() const { return weights_; }
  const Point& position(std::size_t i) const { return positions_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }

  /// Same weights, new positions (transport never touches weights).
  ParticleEnsemble with_positions(std::vector<Point> positions) const;

 private:
  int d_ = 3;
  std::vector<Point> positions_;
  std::vector<double> weights_;
};

/// m_p = integral of <v>^p.
double moment(const ParticleEnsemble& mu, double p);
double moment(const GridDensity& f, double p);

double total_mass(const ParticleEnsemble& mu);
double total_mass(const GridDensity& f);
Point momentum(const ParticleEnsemble& mu);
Point momentum(const GridDensity& f);
/// Kinetic energy: half the integral of |v|^2.
double kinetic_energy(const ParticleEnsemble& mu);
double kinetic_energy(const GridDensity& f);
/// Second-moment tensor diagonal: integral of v_a^2, a < d.
Point directional_second_moments(const ParticleEnsemble& mu);

/// Boltzmann entropy sum f log f * cell volume, with 0 log 0 = 0 below 1e-300.
double boltzmann_entropy(const GridDensity& f);

/// Discrete Maxwellian with the given mean and temperature. Throws GridTooSmall
/// when more than 1e-8 of the continuous mass falls outside the grid.
GridDensity make_maxwellian(const GridSpec& grid, const Point& mean, double temperature);

/// Anisotropic Gaussian with diagonal temperatures, same truncation rule.
GridDensity make_gaussian(const GridSpec& grid, const Point& mean, const Point& temperatures);

/// splitmix64 expansion of a single seed into independent per-component streams.
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// N i.i.d. samples from N(mean, diag(temperatures)), equal weights, recentred so
/// the empirical mean is exactly `mean`.
ParticleEnsemble sample_gaussian(int d, std::size_t count, const Point& mean, const Point& temperatures,
                                 std::uint64_t seed);

/// Tensor-product particles on a uniform lattice of m points per axis spanning
/// mean +- width*sqrt(T), with Gaussian weights.
ParticleEnsemble lattice_gaussian(int d, int per_axis, const Point& mean, const Point& temperatures,
                                  double width = 4.0);

/// Per-time diagnostics record.
struct Diagnostics {
  double mass = 1.0;
  Point momentum{0.0, 0.0, 0.0};
  double energy = 0.0;
  double entropy = 0.0;  ///< Boltzmann entropy; NaN for atomic states
  double regularized_entropy = 0.0;
  double dissipation = 0.0;
};

using State = std::variant<GridDensity, ParticleEnsemble>;

/// Time-stamped states with aligned diagnostics.
class Trajectory {
 public:
  void push(double t, State state, Diagnostics diag);

  std::size_t size() const { return times_.size(); }
  bool empty() const { return times_.empty(); }
  std::span<const double> times() const { return times_; }
  const std::vector<State>& states() const { return states_; }
  const std::vector<Diagnostics>& diagnostics() const { return diagnostics_; }
  std::vector<Diagnostics>& diagnostics() { return diagnostics_; }

  std::vector<double> regularized_entropies() const;
  std::vector<double> dissipations() const;

 private:
  std::vector<double> times_;
  std::vector<State> states_;
  std::vector<Diagnostics> diagnostics_;
};

}  // namespace landau
