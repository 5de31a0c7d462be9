#include "landau/core/measures.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "landau/core/error.hpp"
#include "landau/core/params.hpp"

namespace landau {

void ModelParams::validate(const char* where) const {
  require(d >= 1 && d <= kMaxDim, where, "dimension must be 1, 2 or 3");
  require(gamma >= -4.0 && gamma <= 0.0, where, "gamma must lie in [-4, 0]");
  require(epsilon > 0.0 && std::isfinite(epsilon), where, "epsilon must be positive");
  require(s > 0.0 && std::isfinite(s), where, "kernel tail exponent s must be positive");
}

ParticleEnsemble::ParticleEnsemble(int d, std::vector<Point> positions, std::vector<double> weights)
    : d_(d), positions_(std::move(positions)), weights_(std::move(weights)) {
  require(d_ >= 1 && d_ <= kMaxDim, "core.ParticleEnsemble", "dimension must be 1, 2 or 3");
  require(!positions_.empty(), "core.ParticleEnsemble", "ensemble is empty");
  require(positions_.size() == weights_.size(), "core.ParticleEnsemble", "positions and weights differ in length");
  double total = 0.0;
  for (double w : weights_) {
    require(w >= 0.0 && std::isfinite(w), "core.ParticleEnsemble", "weights must be finite and non-negative");
    total += w;
  }
  require(total > 0.0, "core.ParticleEnsemble", "weights sum to zero");
  for (double& w : weights_) w /= total;
  for (auto& p : positions_) {
    for (int a = d_; a < kMaxDim; ++a) p[a] = 0.0;
  }
}

ParticleEnsemble ParticleEnsemble::uniform(int d, std::vector<Point> positions) {
  std::vector<double> w(positions.size(), 1.0);
  return ParticleEnsemble(d, std::move(positions), std::move(w));
}

ParticleEnsemble ParticleEnsemble::with_positions(std::vector<Point> positions) const {
  require(positions.size() == positions_.size(), "core.ParticleEnsemble", "position count changed");
  ParticleEnsemble out = *this;
  out.positions_ = std::move(positions);
  for (auto& p : out.positions_) {
    for (int a = d_; a < kMaxDim; ++a) p[a] = 0.0;
  }
  return out;
}

namespace {

double bracket_pow(const Point& v, double p) {
  if (p == 0.0) return 1.0;
  const double b2 = 1.0 + norm2(v);
  if (p == 2.0) return b2;
  return std::pow(b2, 0.5 * p);
}

}  // namespace

double moment(const ParticleEnsemble& mu, double p) {
  require(p >= 0.0, "core.moment", "moment order must be non-negative");
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) acc += mu.weight(i) * bracket_pow(mu.position(i), p);
  return acc;
}

double moment(const GridDensity& f, double p) {
  require(p >= 0.0, "core.moment", "moment order must be non-negative");
  const auto& g = f.grid();
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * bracket_pow(g.node(k), p);
  return acc * f.cell_volume();
}

double total_mass(const ParticleEnsemble& mu) {
  return std::accumulate(mu.weights().begin(), mu.weights().end(), 0.0);
}

double total_mass(const GridDensity& f) { return f.mass(); }

Point momentum(const ParticleEnsemble& mu) {
  Point acc{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < mu.size(); ++i) acc += mu.weight(i) * mu.position(i);
  return acc;
}

Point momentum(const GridDensity& f) {
  Point acc{0.0, 0.0, 0.0};
  for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * f.grid().node(k);
  return f.cell_volume() * acc;
}

double kinetic_energy(const ParticleEnsemble& mu) {
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) acc += mu.weight(i) * norm2(mu.position(i));
  return 0.5 * acc;
}

double kinetic_energy(const GridDensity& f) {
  double acc = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) acc += f[k] * norm2(f.grid().node(k));
  return 0.5 * acc * f.cell_volume();
}

Point directional_second_moments(const ParticleEnsemble& mu) {
  Point acc{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto& v = mu.position(i);
    for (int a = 0; a < mu.dim(); ++a) acc[a] += mu.weight(i) * v[a] * v[a];
  }
  return acc;
}

double boltzmann_entropy(const GridDensity& f) {
  double acc = 0.0;
  for (double v : f.values()) {
    if (v >= 1e-300) acc += v * std::log(v);
  }
  return acc * f.cell_volume();
}

GridDensity make_gaussian(const GridSpec& grid, const Point& mean, const Point& temperatures) {
  grid.validate("core.make_maxwellian");
  double inside = 1.0;
  for (int a = 0; a < grid.d; ++a) {
    require(temperatures[a] > 0.0 && std::isfinite(temperatures[a]), "core.make_maxwellian",
            "temperature must be positive");
    const double sigma = std::sqrt(temperatures[a]);
    const double lo = (grid.center[a] - grid.half_width - mean[a]) / (sigma * std::sqrt(2.0));
    const double hi = (grid.center[a] + grid.half_width - mean[a]) / (sigma * std::sqrt(2.0));
    inside *= 0.5 * (std::erfc(lo) - std::erfc(hi));
  }
  if (1.0 - inside > 1e-8) {
    raise(ErrorKind::GridTooSmall, "core.make_maxwellian",
          "truncated mass loss " + std::to_string(1.0 - inside) + " exceeds 1e-8");
  }
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Point v = grid.node(k) - mean;
    double e = 0.0;
    for (int a = 0; a < grid.d; ++a) e += v[a] * v[a] / temperatures[a];
    values[k] = std::exp(-0.5 * e);
  }
  return GridDensity(grid, std::move(values));
}

GridDensity make_maxwellian(const GridSpec& grid, const Point& mean, double temperature) {
  require(temperature > 0.0 && std::isfinite(temperature), "core.make_maxwellian", "temperature must be positive");
  return make_gaussian(grid, mean, Point{temperature, temperature, temperature});
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t state = seed ^ (0xd1b54a32d192ed03ULL * (stream + 1));
  splitmix64(state);
  return splitmix64(state);
}

ParticleEnsemble sample_gaussian(int d, std::size_t count, const Point& mean, const Point& temperatures,
                                 std::uint64_t seed) {
  require(count >= 1, "core.sample_gaussian", "need at least one particle");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Point> pts(count, Point{0.0, 0.0, 0.0});
  for (auto& p : pts) {
    for (int a = 0; a < d; ++a) p[a] = normal(rng);
  }
  Point centroid{0.0, 0.0, 0.0};
  for (const auto& p : pts) centroid += p;
  centroid = (1.0 / static_cast<double>(count)) * centroid;
  if (count == 1) centroid = Point{0.0, 0.0, 0.0};
  for (auto& p : pts) {
    for (int a = 0; a < d; ++a) p[a] = mean[a] + std::sqrt(temperatures[a]) * (p[a] - centroid[a]);
  }
  return ParticleEnsemble::uniform(d, std::move(pts));
}

ParticleEnsemble lattice_gaussian(int d, int per_axis, const Point& mean, const Point& temperatures,
                                  double width) {
  require(per_axis >= 1, "core.lattice_gaussian", "need at least one point per axis");
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(per_axis);
  std::vector<Point> pts(total, Point{0.0, 0.0, 0.0});
  std::vector<double> w(total, 1.0);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rest = k;
    for (int a = d - 1; a >= 0; --a) {
      const int i = static_cast<int>(rest % static_cast<std::size_t>(per_axis));
      rest /= static_cast<std::size_t>(per_axis);
      const double sigma = std::sqrt(temperatures[a]);
      const double x = per_axis == 1 ? 0.0 : -width + 2.0 * width * i / (per_axis - 1);
      pts[k][a] = mean[a] + sigma * x;
      w[k] *= std::exp(-0.5 * x * x);
    }
  }
  return ParticleEnsemble(d, std::move(pts), std::move(w));
}

void Trajectory::push(double t, State state, Diagnostics diag) {
  require(std::isfinite(t), "core.Trajectory", "time must be finite");
  require(times_.empty() || t > times_.back(), "core.Trajectory", "times must be strictly increasing");
  times_.push_back(t);
  states_.push_back(std::move(state));
  diagnostics_.push_back(diag);
}

std::vector<double> Trajectory::regularized_entropies() const {
  std::vector<double> out;
  out.reserve(diagnostics_.size());
  for (const auto& d : diagnostics_) out.push_back(d.regularized_entropy);
  return out;
}

std::vector<double> Trajectory::dissipations() const {
  std::vector<double> out;
  out.reserve(diagnostics_.size());
  for (const auto& d : diagnostics_) out.push_back(d.dissipation);
  return out;
}

}  // namespace landau
