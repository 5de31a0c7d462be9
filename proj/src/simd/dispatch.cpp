#include <atomic>

#include "landau/core/error.hpp"
#include "landau/core/parallel.hpp"
#include "landau/simd/kernel_sums.hpp"

namespace landau::simd {

namespace {

bool cpu_has_avx2() {
#if defined(LANDAU_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = [] {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  }();
  return ok;
#else
  return false;
#endif
}

Backend detect() { return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar; }

std::atomic<int> g_forced{-1};

constexpr std::size_t kGrain = 16;

}  // namespace

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::Scalar: return "scalar";
    case Backend::Avx2: return "avx2";
  }
  return "unknown";
}

bool backend_available(Backend backend) { return backend == Backend::Scalar || cpu_has_avx2(); }

Backend active_backend() {
  const int f = g_forced.load();
  return f < 0 ? detect() : static_cast<Backend>(f);
}

void select_backend(Backend backend) {
  require(backend_available(backend), "simd.select_backend",
          "backend " + std::string(to_string(backend)) + " is not available on this CPU");
  g_forced.store(static_cast<int>(backend));
}

void reset_backend() { g_forced.store(-1); }

PointCloud::PointCloud(int d, std::span<const Point> points) : d_(d), size_(points.size()) {
  for (int a = 0; a < d_; ++a) {
    coord_[a].resize(size_);
    for (std::size_t i = 0; i < size_; ++i) coord_[a][i] = points[i][a];
  }
}

PointsView PointCloud::view() const {
  PointsView v;
  v.d = d_;
  v.size = size_;
  for (int a = 0; a < d_; ++a) v.coord[a] = coord_[a].data();
  return v;
}

void density_sum(const KernelShape& kernel, PointsView targets, PointsView sources, const double* weights,
                 double* out) {
  const Backend b = active_backend();
  parallel_for(targets.size, kGrain, [&](std::size_t begin, std::size_t end) {
#if defined(LANDAU_HAVE_AVX2)
    if (b == Backend::Avx2) {
      detail::density_sum_avx2(kernel, targets, sources, weights, out, begin, end);
      return;
    }
#endif
    (void)b;
    detail::density_sum_scalar(kernel, targets, sources, weights, out, begin, end);
  });
}

void gradient_sum(const KernelShape& kernel, PointsView targets, PointsView sources, const double* coeffs,
                  double* out_x, double* out_y, double* out_z) {
  double* const out[3] = {out_x, out_y, out_z};
  const Backend b = active_backend();
  parallel_for(targets.size, kGrain, [&](std::size_t begin, std::size_t end) {
#if defined(LANDAU_HAVE_AVX2)
    if (b == Backend::Avx2) {
      detail::gradient_sum_avx2(kernel, targets, sources, coeffs, out, begin, end);
      return;
    }
#endif
    (void)b;
    detail::gradient_sum_scalar(kernel, targets, sources, coeffs, out, begin, end);
  });
}

}  // namespace landau::simd
