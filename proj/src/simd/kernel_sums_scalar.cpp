#include <cmath>

#include "landau/simd/kernel_sums.hpp"

namespace landau::simd::detail {

namespace {

struct Profile {
  double value;
  double slope;  // G'(z) = -slope * z
};

inline Profile profile(const KernelShape& k, double z2) {
  const double r2 = 1.0 + z2 * k.inv_eps2;
  if (k.s == 1.0) {
    const double r = std::sqrt(r2);
    const double g = k.scale * std::exp(-r);
    return {g, g * k.inv_eps2 / r};
  }
  if (k.s == 2.0) {
    const double g = k.scale * std::exp(-r2);
    return {g, 2.0 * k.inv_eps2 * g};
  }
  const double rs = std::pow(r2, 0.5 * k.s);
  const double g = k.scale * std::exp(-rs);
  return {g, k.s * k.inv_eps2 * g * rs / r2};
}

template <int D>
void density_impl(const KernelShape& k, PointsView t, PointsView s, const double* w, double* out, std::size_t begin,
                  std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < s.size; ++j) {
      double z2 = 0.0;
      for (int a = 0; a < D; ++a) {
        const double dz = t.coord[a][i] - s.coord[a][j];
        z2 += dz * dz;
      }
      acc += w[j] * profile(k, z2).value;
    }
    out[i] = acc;
  }
}

template <int D>
void gradient_impl(const KernelShape& k, PointsView t, PointsView s, const double* c, double* const out[3],
                   std::size_t begin, std::size_t end) {
  for (std::size_t i = begin; i < end; ++i) {
    double acc[3] = {0.0, 0.0, 0.0};
    for (std::size_t j = 0; j < s.size; ++j) {
      double dz[3] = {0.0, 0.0, 0.0};
      double z2 = 0.0;
      for (int a = 0; a < D; ++a) {
        dz[a] = t.coord[a][i] - s.coord[a][j];
        z2 += dz[a] * dz[a];
      }
      const double f = c[j] * profile(k, z2).slope;
      for (int a = 0; a < D; ++a) acc[a] -= f * dz[a];
    }
    for (int a = 0; a < D; ++a) out[a][i] = acc[a];
  }
}

}  // namespace

void density_sum_scalar(const KernelShape& kernel, PointsView targets, PointsView sources, const double* weights,
                        double* out, std::size_t begin, std::size_t end) {
  switch (targets.d) {
    case 1: density_impl<1>(kernel, targets, sources, weights, out, begin, end); break;
    case 2: density_impl<2>(kernel, targets, sources, weights, out, begin, end); break;
    default: density_impl<3>(kernel, targets, sources, weights, out, begin, end); break;
  }
}

void gradient_sum_scalar(const KernelShape& kernel, PointsView targets, PointsView sources, const double* coeffs,
                         double* const out[3], std::size_t begin, std::size_t end) {
  switch (targets.d) {
    case 1: gradient_impl<1>(kernel, targets, sources, coeffs, out, begin, end); break;
    case 2: gradient_impl<2>(kernel, targets, sources, coeffs, out, begin, end); break;
    default: gradient_impl<3>(kernel, targets, sources, coeffs, out, begin, end); break;
  }
}

}  // namespace landau::simd::detail
