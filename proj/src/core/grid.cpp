#include "landau/core/grid.hpp"

#include <cmath>
#include <numeric>

#include "landau/core/error.hpp"

namespace landau {

void GridSpec::validate(const char* where) const {
  require(d >= 1 && d <= kMaxDim, where, "grid dimension must be 1, 2 or 3");
  require(n >= 3, where, "grid needs at least 3 cells per axis");
  require(half_width > 0.0 && std::isfinite(half_width), where, "half-width must be positive");
  for (int a = d; a < kMaxDim; ++a) require(center[a] == 0.0, where, "unused centre components must be zero");
}

double GridSpec::cell_volume() const { return std::pow(spacing(), d); }

std::size_t GridSpec::size() const {
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(n);
  return total;
}

std::array<int, 3> GridSpec::multi_index(std::size_t k) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = d - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(k % static_cast<std::size_t>(n));
    k /= static_cast<std::size_t>(n);
  }
  return idx;
}

std::size_t GridSpec::flat_index(const std::array<int, 3>& idx) const {
  std::size_t k = 0;
  for (int a = 0; a < d; ++a) k = k * static_cast<std::size_t>(n) + static_cast<std::size_t>(idx[a]);
  return k;
}

Point GridSpec::node(std::size_t k) const {
  const auto idx = multi_index(k);
  const double h = spacing();
  Point v{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) v[a] = center[a] - half_width + h * (idx[a] + 0.5);
  return v;
}

std::vector<Point> GridSpec::nodes() const {
  std::vector<Point> out(size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = node(k);
  return out;
}

bool GridSpec::operator==(const GridSpec& other) const {
  return d == other.d && n == other.n && half_width == other.half_width && center == other.center;
}

GridDensity::GridDensity(GridSpec grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  grid_.validate("core.GridDensity");
  require(values_.size() == grid_.size(), "core.GridDensity", "value count does not match grid");
  double total = 0.0;
  for (double v : values_) {
    require(v >= 0.0 && std::isfinite(v), "core.GridDensity", "density values must be finite and non-negative");
    total += v;
  }
  total *= grid_.cell_volume();
  require(total > 0.0, "core.GridDensity", "density has zero mass");
  for (double& v : values_) v /= total;
}

GridDensity GridDensity::from_normalized(GridSpec grid, std::vector<double> values) {
  GridDensity out;
  grid.validate("core.GridDensity");
  require(values.size() == grid.size(), "core.GridDensity", "value count does not match grid");
  out.grid_ = grid;
  out.values_ = std::move(values);
  for (double v : out.values_)
    require(v >= 0.0 && std::isfinite(v), "core.GridDensity", "density values must be finite and non-negative");
  require(std::abs(out.mass() - 1.0) <= 1e-10, "core.GridDensity", "density is not normalised");
  return out;
}

double GridDensity::mass() const {
  return std::accumulate(values_.begin(), values_.end(), 0.0) * grid_.cell_volume();
}

GradientStencil gradient_stencil(const GridSpec& grid, std::size_t k, int axis) {
  const auto idx = grid.multi_index(k);
  const double inv2h = 1.0 / (2.0 * grid.spacing());
  GradientStencil st;
  auto at = [&](int i) {
    auto j = idx;
    j[axis] = i;
    return grid.flat_index(j);
  };
  const int i = idx[axis];
  if (i == 0) {
    st.index = {at(0), at(1), at(2)};
    st.weight = {-3.0 * inv2h, 4.0 * inv2h, -1.0 * inv2h};
  } else if (i == grid.n - 1) {
    st.index = {at(i), at(i - 1), at(i - 2)};
    st.weight = {3.0 * inv2h, -4.0 * inv2h, 1.0 * inv2h};
  } else {
    st.index = {at(i + 1), at(i - 1), at(i)};
    st.weight = {inv2h, -inv2h, 0.0};
  }
  return st;
}

std::vector<Point> grid_gradient(const GridSpec& grid, std::span<const double> values) {
  require(values.size() == grid.size(), "core.grid_gradient", "value count does not match grid");
  std::vector<Point> out(values.size(), Point{0.0, 0.0, 0.0});
  for (std::size_t k = 0; k < values.size(); ++k) {
    for (int a = 0; a < grid.d; ++a) {
      const auto st = gradient_stencil(grid, k, a);
      out[k][a] = st.weight[0] * values[st.index[0]] + st.weight[1] * values[st.index[1]] +
                  st.weight[2] * values[st.index[2]];
    }
  }
  return out;
}

}  // namespace landau
