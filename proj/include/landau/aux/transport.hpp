#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "landau/core/point.hpp"

namespace landau {

/// Minimum-cost perfect matching of a square cost matrix (row-major, n x n).
/// Returns the column assigned to each row.
std::vector<int> solve_assignment(std::span<const double> cost, int n);

/// Exact W2 between two equal-weight clouds of the same size.
double wasserstein2_equal(std::span<const Point> a, std::span<const Point> b);

/// W2 between weighted measures on the line (quantile coupling).
double wasserstein2_1d(std::span<const double> xa, std::span<const double> wa, std::span<const double> xb,
                       std::span<const double> wb);

/// Sliced W2 with `directions` random unit directions.
double sliced_wasserstein2(int d, std::span<const Point> a, std::span<const double> wa, std::span<const Point> b,
                           std::span<const double> wb, int directions = 64, std::uint64_t seed = 1);

}  // namespace landau
