// AVX2 variants of the dense kernels. This translation unit is compiled with
// -mavx2; it must only be entered through the runtime dispatcher.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "epi/kernels.hpp"

namespace epi::kernels::detail {

static inline double hsum256(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

void convolve_avx2(const double* x, std::size_t n, const double* k,
                   std::size_t m, double scale, double* out) {
  // Gather formulation: out[i] = sum_j k[j] x[i-j]. Vectorize over j with a
  // reversed read of x; the short head (i < m-1) falls back to scalar.
  std::size_t head = (m > 0) ? m - 1 : 0;
  if (head > n) head = n;
  for (std::size_t i = 0; i < head; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += k[j] * x[i - j];
    out[i] = scale * acc;
  }
  for (std::size_t i = head; i < n; ++i) {
    const double* xr = x + i;  // reads xr[-j]
    __m256d vacc = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j + 4 <= m; j += 4) {
      __m256d vk = _mm256_loadu_pd(k + j);
      // x[i-j-3..i-j] loaded ascending, then reversed to align with k[j..j+3]
      __m256d vx = _mm256_loadu_pd(xr - j - 3);
      vx = _mm256_permute4x64_pd(vx, _MM_SHUFFLE(0, 1, 2, 3));
      vacc = _mm256_fmadd_pd(vk, vx, vacc);
    }
    double acc = hsum256(vacc);
    for (; j < m; ++j) acc += k[j] * xr[-static_cast<std::ptrdiff_t>(j)];
    out[i] = scale * acc;
  }
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d vacc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    vacc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), vacc);
  }
  double acc = hsum256(vacc);
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void segment_sum_avx2(const double* daily, std::size_t n_days,
                      std::size_t seg_len, double* out, std::size_t n_segs) {
  for (std::size_t t = 0; t < n_segs; ++t) {
    const std::size_t lo = t * seg_len;
    const std::size_t hi = (lo + seg_len < n_days) ? lo + seg_len : n_days;
    __m256d vacc = _mm256_setzero_pd();
    std::size_t u = lo;
    for (; u + 4 <= hi; u += 4) vacc = _mm256_add_pd(vacc, _mm256_loadu_pd(daily + u));
    double acc = hsum256(vacc);
    for (; u < hi; ++u) acc += daily[u];
    out[t] = acc;
  }
}

void scale_add_avx2(const double* x, std::size_t n, double scale, double* out) {
  const __m256d vs = _mm256_set1_pd(scale);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vo = _mm256_loadu_pd(out + i);
    vo = _mm256_fmadd_pd(vs, _mm256_loadu_pd(x + i), vo);
    _mm256_storeu_pd(out + i, vo);
  }
  for (; i < n; ++i) out[i] += scale * x[i];
}

}  // namespace epi::kernels::detail

#endif  // x86-64
