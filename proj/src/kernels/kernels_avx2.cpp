#include <immintrin.h>

#include "kernel_impl.hpp"

namespace acrp::kernels::detail {

void g_values_avx2(const double* px, const double* py, const double* vx, const double* vy,
                   double d, double* out, std::size_t n) {
  const __m256d d2 = _mm256_set1_pd(d * d);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x = _mm256_loadu_pd(px + k);
    const __m256d y = _mm256_loadu_pd(py + k);
    const __m256d u = _mm256_loadu_pd(vx + k);
    const __m256d w = _mm256_loadu_pd(vy + k);
    const __m256d c = _mm256_sub_pd(_mm256_mul_pd(x, w), _mm256_mul_pd(y, u));
    const __m256d v2 = _mm256_add_pd(_mm256_mul_pd(u, u), _mm256_mul_pd(w, w));
    _mm256_storeu_pd(out + k, _mm256_sub_pd(_mm256_mul_pd(c, c), _mm256_mul_pd(d2, v2)));
  }
  g_values_scalar(px + k, py + k, vx + k, vy + k, d, out + k, n - k);
}

void conflict_mask_avx2(const double* px, const double* py, const double* vx,
                        const double* vy, double d, double g_rel, double t_tol,
                        std::uint8_t* out, std::size_t n) {
  const double d2s = d * d;
  const __m256d d2 = _mm256_set1_pd(d2s);
  const __m256d band = _mm256_set1_pd(-(g_rel * d2s));
  const __m256d tt = _mm256_set1_pd(t_tol);
  const __m256d rest = _mm256_set1_pd(kRestSpeed2);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x = _mm256_loadu_pd(px + k);
    const __m256d y = _mm256_loadu_pd(py + k);
    const __m256d u = _mm256_loadu_pd(vx + k);
    const __m256d w = _mm256_loadu_pd(vy + k);
    const __m256d c = _mm256_sub_pd(_mm256_mul_pd(x, w), _mm256_mul_pd(y, u));
    const __m256d v2 = _mm256_add_pd(_mm256_mul_pd(u, u), _mm256_mul_pd(w, w));
    const __m256d g = _mm256_sub_pd(_mm256_mul_pd(c, c), _mm256_mul_pd(d2, v2));
    const __m256d dot = _mm256_add_pd(_mm256_mul_pd(x, u), _mm256_mul_pd(y, w));
    const __m256d moving = _mm256_cmp_pd(v2, rest, _CMP_GE_OQ);
    const __m256d closing =
        _mm256_cmp_pd(_mm256_sub_pd(zero, dot), _mm256_mul_pd(tt, v2), _CMP_GT_OQ);
    const __m256d inside = _mm256_cmp_pd(g, _mm256_mul_pd(band, v2), _CMP_LT_OQ);
    const int bits = _mm256_movemask_pd(_mm256_and_pd(moving, _mm256_and_pd(closing, inside)));
    for (int l = 0; l < 4; ++l) out[k + l] = static_cast<std::uint8_t>((bits >> l) & 1);
  }
  conflict_mask_scalar(px + k, py + k, vx + k, vy + k, d, g_rel, t_tol, out + k, n - k);
}

void min_distance_avx2(const double* px, const double* py, const double* vx,
                       const double* vy, double horizon, double* out, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  const __m256d h = _mm256_set1_pd(horizon);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d x = _mm256_loadu_pd(px + k);
    const __m256d y = _mm256_loadu_pd(py + k);
    const __m256d u = _mm256_loadu_pd(vx + k);
    const __m256d w = _mm256_loadu_pd(vy + k);
    const __m256d v2 = _mm256_add_pd(_mm256_mul_pd(u, u), _mm256_mul_pd(w, w));
    const __m256d dot = _mm256_add_pd(_mm256_mul_pd(x, u), _mm256_mul_pd(y, w));
    const __m256d pos = _mm256_cmp_pd(v2, zero, _CMP_GT_OQ);
    __m256d t = _mm256_and_pd(pos, _mm256_div_pd(_mm256_sub_pd(zero, dot), v2));
    // std::max(t, 0.0) returns t unless t < 0; mirror that exactly (NaN-free here).
    t = _mm256_max_pd(t, zero);
    t = _mm256_min_pd(t, h);
    const __m256d rx = _mm256_add_pd(x, _mm256_mul_pd(u, t));
    const __m256d ry = _mm256_add_pd(y, _mm256_mul_pd(w, t));
    _mm256_storeu_pd(out + k,
                     _mm256_sqrt_pd(_mm256_add_pd(_mm256_mul_pd(rx, rx), _mm256_mul_pd(ry, ry))));
  }
  min_distance_scalar(px + k, py + k, vx + k, vy + k, horizon, out + k, n - k);
}

}  // namespace acrp::kernels::detail
