#include "epi/kernels.hpp"

#include <cstring>

namespace epi::kernels {

namespace detail {
void convolve_scalar(const double*, std::size_t, const double*, std::size_t,
                     double, double*);
double dot_scalar(const double*, const double*, std::size_t);
void segment_sum_scalar(const double*, std::size_t, std::size_t, double*,
                        std::size_t);
void scale_add_scalar(const double*, std::size_t, double, double*);
#if defined(__x86_64__) || defined(_M_X64)
void convolve_avx2(const double*, std::size_t, const double*, std::size_t,
                   double, double*);
double dot_avx2(const double*, const double*, std::size_t);
void segment_sum_avx2(const double*, std::size_t, std::size_t, double*,
                      std::size_t);
void scale_add_avx2(const double*, std::size_t, double, double*);
#endif
}  // namespace detail

namespace {

struct Dispatch {
  void (*convolve)(const double*, std::size_t, const double*, std::size_t,
                   double, double*);
  double (*dot)(const double*, const double*, std::size_t);
  void (*segment_sum)(const double*, std::size_t, std::size_t, double*,
                      std::size_t);
  void (*scale_add)(const double*, std::size_t, double, double*);
  const char* name;
};

constexpr Dispatch kScalar = {detail::convolve_scalar, detail::dot_scalar,
                              detail::segment_sum_scalar,
                              detail::scale_add_scalar, "scalar"};

#if defined(__x86_64__) || defined(_M_X64)
constexpr Dispatch kAvx2 = {detail::convolve_avx2, detail::dot_avx2,
                            detail::segment_sum_avx2, detail::scale_add_avx2,
                            "avx2"};
#endif

Dispatch pick() {
#if defined(__x86_64__) || defined(_M_X64)
  if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma"))
    return kAvx2;
#endif
  return kScalar;
}

Dispatch g_dispatch = pick();

}  // namespace

void convolve(const double* x, std::size_t n, const double* k, std::size_t m,
              double scale, double* out) {
  g_dispatch.convolve(x, n, k, m, scale, out);
}

double dot(const double* a, const double* b, std::size_t n) {
  return g_dispatch.dot(a, b, n);
}

void segment_sum(const double* daily, std::size_t n_days, std::size_t seg_len,
                 double* out, std::size_t n_segs) {
  g_dispatch.segment_sum(daily, n_days, seg_len, out, n_segs);
}

void scale_add(const double* x, std::size_t n, double scale, double* out) {
  g_dispatch.scale_add(x, n, scale, out);
}

const char* active_impl() { return g_dispatch.name; }

bool force_impl(const char* name) {
  if (std::strcmp(name, "scalar") == 0) {
    g_dispatch = kScalar;
    return true;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (std::strcmp(name, "avx2") == 0 && __builtin_cpu_supports("avx2") &&
      __builtin_cpu_supports("fma")) {
    g_dispatch = kAvx2;
    return true;
  }
#endif
  return false;
}

std::vector<double> convolve(const std::vector<double>& x,
                             const std::vector<double>& k, double scale) {
  std::vector<double> out(x.size());
  convolve(x.data(), x.size(), k.data(), k.size(), scale, out.data());
  return out;
}

std::vector<double> segment_sum(const std::vector<double>& daily,
                                std::size_t seg_len, std::size_t n_segs) {
  std::vector<double> out(n_segs);
  segment_sum(daily.data(), daily.size(), seg_len, out.data(), n_segs);
  return out;
}

}  // namespace epi::kernels
