#pragma once
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "landau/core/measures.hpp"
#include "landau/core/point.hpp"

namespace test {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline landau::Point random_point(std::mt19937_64& g, int d, double scale = 1.0) {
  std::normal_distribution<double> n(0.0, scale);
  landau::Point p{0.0, 0.0, 0.0};
  for (int a = 0; a < d; ++a) p[a] = n(g);
  return p;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::max(std::abs(a), std::abs(b))); }

inline double max_abs_diff(const landau::Point& a, const landau::Point& b) {
  return std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]), std::abs(a[2] - b[2])});
}

}  // namespace test
