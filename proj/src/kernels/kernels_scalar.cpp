#include "epi/kernels.hpp"

namespace epi::kernels::detail {

void convolve_scalar(const double* x, std::size_t n, const double* k,
                     std::size_t m, double scale, double* out) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t jmax = (i + 1 < m) ? i + 1 : m;
    double acc = 0.0;
    for (std::size_t j = 0; j < jmax; ++j) {
      acc += k[j] * x[i - j];
    }
    out[i] = scale * acc;
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void segment_sum_scalar(const double* daily, std::size_t n_days,
                        std::size_t seg_len, double* out, std::size_t n_segs) {
  for (std::size_t t = 0; t < n_segs; ++t) {
    const std::size_t lo = t * seg_len;
    const std::size_t hi = (lo + seg_len < n_days) ? lo + seg_len : n_days;
    double acc = 0.0;
    for (std::size_t u = lo; u < hi; ++u) acc += daily[u];
    out[t] = acc;
  }
}

void scale_add_scalar(const double* x, std::size_t n, double scale,
                      double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] += scale * x[i];
}

}  // namespace epi::kernels::detail
