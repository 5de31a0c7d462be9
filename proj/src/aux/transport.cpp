#include "landau/aux/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "landau/core/error.hpp"
#include "landau/core/measures.hpp"

namespace landau {

std::vector<int> solve_assignment(std::span<const double> cost, int n) {
  require(n >= 0 && cost.size() == static_cast<std::size_t>(n) * n, "aux_flow.solve_assignment",
          "cost matrix must be n x n");
  // shortest augmenting paths with row/column potentials, 1-based internally
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost[static_cast<std::size_t>(i0 - 1) * n + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> row_to_col(n, -1);
  for (int j = 1; j <= n; ++j)
    if (p[j] > 0) row_to_col[p[j] - 1] = j - 1;
  return row_to_col;
}

double wasserstein2_equal(std::span<const Point> a, std::span<const Point> b) {
  require(a.size() == b.size(), "aux_flow.wasserstein2", "clouds must have equal size");
  const int n = static_cast<int>(a.size());
  if (n == 0) return 0.0;
  std::vector<double> cost(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cost[static_cast<std::size_t>(i) * n + j] = norm2(a[i] - b[j]);
  const auto match = solve_assignment(cost, n);
  double total = 0.0;
  for (int i = 0; i < n; ++i) total += cost[static_cast<std::size_t>(i) * n + match[i]];
  return std::sqrt(total / n);
}

double wasserstein2_1d(std::span<const double> xa, std::span<const double> wa, std::span<const double> xb,
                       std::span<const double> wb) {
  require(xa.size() == wa.size() && xb.size() == wb.size(), "aux_flow.wasserstein2_1d", "size mismatch");
  auto order = [](std::span<const double> x) {
    std::vector<std::size_t> idx(x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return x[i] < x[j]; });
    return idx;
  };
  const auto ia = order(xa), ib = order(xb);
  const double sa = std::accumulate(wa.begin(), wa.end(), 0.0);
  const double sb = std::accumulate(wb.begin(), wb.end(), 0.0);
  std::size_t i = 0, j = 0;
  double ra = ia.empty() ? 0.0 : wa[ia[0]] / sa, rb = ib.empty() ? 0.0 : wb[ib[0]] / sb;
  double total = 0.0;
  while (i < ia.size() && j < ib.size()) {
    const double m = std::min(ra, rb);
    const double diff = xa[ia[i]] - xb[ib[j]];
    total += m * diff * diff;
    ra -= m;
    rb -= m;
    if (ra <= 1e-15) {
      if (++i < ia.size()) ra = wa[ia[i]] / sa;
    }
    if (rb <= 1e-15) {
      if (++j < ib.size()) rb = wb[ib[j]] / sb;
    }
  }
  return std::sqrt(total);
}

double sliced_wasserstein2(int d, std::span<const Point> a, std::span<const double> wa, std::span<const Point> b,
                           std::span<const double> wb, int directions, std::uint64_t seed) {
  require(directions >= 1, "aux_flow.sliced_wasserstein2", "need at least one direction");
  std::uint64_t state = derive_seed(seed, 0x51ced);
  std::mt19937_64 rng(splitmix64(state));
  std::normal_distribution<double> normal;
  std::vector<double> pa(a.size()), pb(b.size());
  double total = 0.0;
  for (int k = 0; k < directions; ++k) {
    Point dir{0.0, 0.0, 0.0};
    for (int c = 0; c < d; ++c) dir[c] = normal(rng);
    dir = (1.0 / norm(dir)) * dir;
    for (std::size_t i = 0; i < a.size(); ++i) pa[i] = dot(a[i], dir);
    for (std::size_t i = 0; i < b.size(); ++i) pb[i] = dot(b[i], dir);
    const double w = wasserstein2_1d(pa, wa, pb, wb);
    total += w * w;
  }
  return std::sqrt(total / directions);
}

}  // namespace landau
