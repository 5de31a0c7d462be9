#pragma once

// Pairwise kernel sums, the inner loops of every convolution in the library.
// A scalar reference implementation always exists; AVX2+FMA variants are
// compiled separately and selected at runtime when the CPU supports them.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "landau/core/point.hpp"

namespace landau::simd {

enum class Backend { Scalar, Avx2 };

std::string_view to_string(Backend backend);
bool backend_available(Backend backend);
Backend active_backend();
/// Forces a backend (tests); throws InvalidArgument if unavailable.
void select_backend(Backend backend);
/// Returns to the auto-detected backend.
void reset_backend();

/// Radial kernel G(z) = scale * exp(-<z/eps>^s), gradient -scale*(s/eps^2)<z/eps>^{s-2} e^{...} z.
struct KernelShape {
  double scale = 1.0;
  double inv_eps2 = 1.0;
  double s = 1.0;
};

/// Structure-of-arrays view of a point set. Unused components may be null.
struct PointsView {
  int d = 3;
  std::size_t size = 0;
  const double* coord[3] = {nullptr, nullptr, nullptr};
};

/// Owning SoA copy of a point list.
class PointCloud {
 public:
  PointCloud() = default;
  PointCloud(int d, std::span<const Point> points);

  PointsView view() const;
  std::size_t size() const { return size_; }
  int dim() const { return d_; }

 private:
  int d_ = 3;
  std::size_t size_ = 0;
  std::vector<double> coord_[3];
};

/// out[k] = sum_i weights[i] G(t_k - s_i)
void density_sum(const KernelShape& kernel, PointsView targets, PointsView sources, const double* weights,
                 double* out);

/// out_a[k] = sum_i coeffs[i] dG/dz_a (t_k - s_i), for a < d.
void gradient_sum(const KernelShape& kernel, PointsView targets, PointsView sources, const double* coeffs,
                  double* out_x, double* out_y, double* out_z);

namespace detail {

// Backend entry points over the target range [begin, end).
void density_sum_scalar(const KernelShape& kernel, PointsView targets, PointsView sources, const double* weights,
                        double* out, std::size_t begin, std::size_t end);
void gradient_sum_scalar(const KernelShape& kernel, PointsView targets, PointsView sources, const double* coeffs,
                         double* const out[3], std::size_t begin, std::size_t end);

#if defined(LANDAU_HAVE_AVX2)
void density_sum_avx2(const KernelShape& kernel, PointsView targets, PointsView sources, const double* weights,
                      double* out, std::size_t begin, std::size_t end);
void gradient_sum_avx2(const KernelShape& kernel, PointsView targets, PointsView sources, const double* coeffs,
                       double* const out[3], std::size_t begin, std::size_t end);
/// Vectorised exp on 4 lanes, exposed for equivalence tests.
void exp4_avx2(const double* in, double* out);
#endif

}  // namespace detail

}  // namespace landau::simd
