#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "landau/core/point.hpp"

namespace landau {

/// Uniform cell-centred grid on the box center + [-L, L]^d with n cells per axis.
struct GridSpec {
  int d = 3;
  int n = 32;
  double half_width = 8.0;
  Point center{0.0, 0.0, 0.0};

  void validate(const char* where = "core.GridSpec") const;

  double spacing() const { return 2.0 * half_width / n; }
  double cell_volume() const;
  std::size_t size() const;

  /// Cell centre of flat index k (row-major, last axis fastest).
  Point node(std::size_t k) const;
  std::array<int, 3> multi_index(std::size_t k) const;
  std::size_t flat_index(const std::array<int, 3>& idx) const;
  std::vector<Point> nodes() const;

  bool operator==(const GridSpec& other) const;
};

/// Non-negative density values on a grid with unit discrete mass.
class GridDensity {
 public:
  GridDensity() = default;

  /// Takes raw non-negative values and renormalises them to unit mass.
  GridDensity(GridSpec grid, std::vector<double> values);

  /// Wraps values that are already normalised (checked to 1e-10).
  static GridDensity from_normalized(GridSpec grid, std::vector<double> values);

  const GridSpec& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t k) const { return values_[k]; }
  std::size_t size() const { return values_.size(); }
  double cell_volume() const { return grid_.cell_volume(); }
  double mass() const;

 private:
  GridSpec grid_;
  std::vector<double> values_;
};

/// Second-order finite-difference gradient of cell values: central differences
/// in the interior, one-sided three-point formulas on the faces (exact for quadratics).
std::vector<Point> grid_gradient(const GridSpec& grid, std::span<const double> values);

/// The three-point stencil used by grid_gradient for component `axis` at cell k.
struct GradientStencil {
  std::array<std::size_t, 3> index{};
  std::array<double, 3> weight{};
};
GradientStencil gradient_stencil(const GridSpec& grid, std::size_t k, int axis);

}  // namespace landau
