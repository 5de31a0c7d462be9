// AVX2+FMA kernel sums. Four targets per register; sources are broadcast and
// visited in the same order as the scalar reference, so per-target sums differ
// from it only through the vectorised exp.

#include <immintrin.h>

#include <cmath>

#include "landau/simd/kernel_sums.hpp"

namespace landau::simd::detail {

namespace {

// exp(x) = 2^n exp(r) with n = round(x / ln2) and ln2 split in two parts so r is
// exact; exp(r) on |r| <= ln2/2 by its degree-13 Taylor polynomial (truncation
// below 1e-17 relative). Division-free. Inputs below -708 flush to zero.
inline __m256d exp_pd(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d underflow = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo);
  x = _mm256_min_pd(x, _mm256_set1_pd(708.0));

  const __m256d log2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d c1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d c2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, c1, x);
  r = _mm256_fnmadd_pd(n, c2, r);

  static constexpr double inv_fact[14] = {1.0,
                                          1.0,
                                          1.0 / 2.0,
                                          1.0 / 6.0,
                                          1.0 / 24.0,
                                          1.0 / 120.0,
                                          1.0 / 720.0,
                                          1.0 / 5040.0,
                                          1.0 / 40320.0,
                                          1.0 / 362880.0,
                                          1.0 / 3628800.0,
                                          1.0 / 39916800.0,
                                          1.0 / 479001600.0,
                                          1.0 / 6227020800.0};
  __m256d e = _mm256_set1_pd(inv_fact[13]);
  for (int k = 12; k >= 0; --k) e = _mm256_fmadd_pd(e, r, _mm256_set1_pd(inv_fact[k]));

  const __m128i ni = _mm256_cvtpd_epi32(n);
  __m256i bits = _mm256_cvtepi32_epi64(ni);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(bits));
  return _mm256_andnot_pd(underflow, e);
}

struct ProfilePd {
  __m256d value;
  __m256d slope;
};

// s == 1 or s == 2 only; other exponents go through the scalar path.
template <bool SquareTail, bool WithSlope>
inline ProfilePd profile_pd(__m256d z2, __m256d inv_eps2, __m256d scale) {
  const __m256d r2 = _mm256_fmadd_pd(z2, inv_eps2, _mm256_set1_pd(1.0));
  if constexpr (SquareTail) {
    const __m256d g = _mm256_mul_pd(scale, exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), r2)));
    return {g, _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(2.0), inv_eps2), g)};
  } else {
    const __m256d r = _mm256_sqrt_pd(r2);
    const __m256d g = _mm256_mul_pd(scale, exp_pd(_mm256_sub_pd(_mm256_setzero_pd(), r)));
    if constexpr (!WithSlope) return {g, g};
    return {g, _mm256_div_pd(_mm256_mul_pd(g, inv_eps2), r)};
  }
}

// U independent target quads per pass over the sources: the exp/sqrt chains of
// different quads overlap, while each target still sums sources in order.
template <int D, bool SquareTail, int U>
std::size_t density_block(const KernelShape& k, PointsView t, PointsView s, const double* w, double* out,
                          std::size_t i, std::size_t end) {
  const __m256d inv_eps2 = _mm256_set1_pd(k.inv_eps2);
  const __m256d scale = _mm256_set1_pd(k.scale);
  for (; i + 4 * U <= end; i += 4 * U) {
    __m256d tc[U][3];
    __m256d acc[U];
    for (int u = 0; u < U; ++u) {
      for (int a = 0; a < D; ++a) tc[u][a] = _mm256_loadu_pd(t.coord[a] + i + 4 * u);
      acc[u] = _mm256_setzero_pd();
    }
    for (std::size_t j = 0; j < s.size; ++j) {
      __m256d sc[3];
      for (int a = 0; a < D; ++a) sc[a] = _mm256_set1_pd(s.coord[a][j]);
      const __m256d wj = _mm256_set1_pd(w[j]);
      for (int u = 0; u < U; ++u) {
        __m256d z2 = _mm256_setzero_pd();
        for (int a = 0; a < D; ++a) {
          const __m256d dz = _mm256_sub_pd(tc[u][a], sc[a]);
          z2 = _mm256_fmadd_pd(dz, dz, z2);
        }
        const ProfilePd pr = profile_pd<SquareTail, false>(z2, inv_eps2, scale);
        acc[u] = _mm256_fmadd_pd(wj, pr.value, acc[u]);
      }
    }
    for (int u = 0; u < U; ++u) _mm256_storeu_pd(out + i + 4 * u, acc[u]);
  }
  return i;
}

template <int D, bool SquareTail>
void density_impl(const KernelShape& k, PointsView t, PointsView s, const double* w, double* out, std::size_t begin,
                  std::size_t end) {
  std::size_t i = density_block<D, SquareTail, 4>(k, t, s, w, out, begin, end);
  i = density_block<D, SquareTail, 1>(k, t, s, w, out, i, end);
  if (i < end) density_sum_scalar(k, t, s, w, out, i, end);
}

template <int D, bool SquareTail, int U>
std::size_t gradient_block(const KernelShape& k, PointsView t, PointsView s, const double* c, double* const out[3],
                           std::size_t i, std::size_t end) {
  const __m256d inv_eps2 = _mm256_set1_pd(k.inv_eps2);
  const __m256d scale = _mm256_set1_pd(k.scale);
  for (; i + 4 * U <= end; i += 4 * U) {
    __m256d tc[U][3];
    __m256d acc[U][3];
    for (int u = 0; u < U; ++u) {
      for (int a = 0; a < D; ++a) {
        tc[u][a] = _mm256_loadu_pd(t.coord[a] + i + 4 * u);
        acc[u][a] = _mm256_setzero_pd();
      }
    }
    for (std::size_t j = 0; j < s.size; ++j) {
      __m256d sc[3];
      for (int a = 0; a < D; ++a) sc[a] = _mm256_set1_pd(s.coord[a][j]);
      const __m256d cj = _mm256_set1_pd(c[j]);
      for (int u = 0; u < U; ++u) {
        __m256d dz[3];
        __m256d z2 = _mm256_setzero_pd();
        for (int a = 0; a < D; ++a) {
          dz[a] = _mm256_sub_pd(tc[u][a], sc[a]);
          z2 = _mm256_fmadd_pd(dz[a], dz[a], z2);
        }
        const ProfilePd pr = profile_pd<SquareTail, true>(z2, inv_eps2, scale);
        const __m256d f = _mm256_mul_pd(cj, pr.slope);
        for (int a = 0; a < D; ++a) acc[u][a] = _mm256_fnmadd_pd(f, dz[a], acc[u][a]);
      }
    }
    for (int u = 0; u < U; ++u) {
      for (int a = 0; a < D; ++a) _mm256_storeu_pd(out[a] + i + 4 * u, acc[u][a]);
    }
  }
  return i;
}

template <int D, bool SquareTail>
void gradient_impl(const KernelShape& k, PointsView t, PointsView s, const double* c, double* const out[3],
                   std::size_t begin, std::size_t end) {
  std::size_t i = gradient_block<D, SquareTail, 4>(k, t, s, c, out, begin, end);
  i = gradient_block<D, SquareTail, 1>(k, t, s, c, out, i, end);
  if (i < end) gradient_sum_scalar(k, t, s, c, out, i, end);
}

template <bool SquareTail>
void density_dispatch(const KernelShape& k, PointsView t, PointsView s, const double* w, double* out,
                      std::size_t begin, std::size_t end) {
  switch (t.d) {
    case 1: density_impl<1, SquareTail>(k, t, s, w, out, begin, end); break;
    case 2: density_impl<2, SquareTail>(k, t, s, w, out, begin, end); break;
    default: density_impl<3, SquareTail>(k, t, s, w, out, begin, end); break;
  }
}

template <bool SquareTail>
void gradient_dispatch(const KernelShape& k, PointsView t, PointsView s, const double* c, double* const out[3],
                       std::size_t begin, std::size_t end) {
  switch (t.d) {
    case 1: gradient_impl<1, SquareTail>(k, t, s, c, out, begin, end); break;
    case 2: gradient_impl<2, SquareTail>(k, t, s, c, out, begin, end); break;
    default: gradient_impl<3, SquareTail>(k, t, s, c, out, begin, end); break;
  }
}

}  // namespace

void density_sum_avx2(const KernelShape& kernel, PointsView targets, PointsView sources, const double* weights,
                      double* out, std::size_t begin, std::size_t end) {
  if (kernel.s == 1.0) {
    density_dispatch<false>(kernel, targets, sources, weights, out, begin, end);
  } else if (kernel.s == 2.0) {
    density_dispatch<true>(kernel, targets, sources, weights, out, begin, end);
  } else {
    density_sum_scalar(kernel, targets, sources, weights, out, begin, end);
  }
}

void gradient_sum_avx2(const KernelShape& kernel, PointsView targets, PointsView sources, const double* coeffs,
                       double* const out[3], std::size_t begin, std::size_t end) {
  if (kernel.s == 1.0) {
    gradient_dispatch<false>(kernel, targets, sources, coeffs, out, begin, end);
  } else if (kernel.s == 2.0) {
    gradient_dispatch<true>(kernel, targets, sources, coeffs, out, begin, end);
  } else {
    gradient_sum_scalar(kernel, targets, sources, coeffs, out, begin, end);
  }
}

void exp4_avx2(const double* in, double* out) { _mm256_storeu_pd(out, exp_pd(_mm256_loadu_pd(in))); }

}  // namespace landau::simd::detail
