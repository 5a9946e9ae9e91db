#ifndef EPI_KERNELS_HPP
#define EPI_KERNELS_HPP

#include <cstddef>
#include <vector>

// Dense arithmetic kernels used by the rate computations. Scalar reference
// implementations always exist; on x86-64 an AVX2 variant is selected at
// runtime when the CPU supports it. All variants must agree to floating-point
// roundoff (they are equivalence-tested against each other).

namespace epi::kernels {

// out[i] = scale * sum_{j=0}^{min(i, m-1)} k[j] * x[i-j], for i = 0..n-1.
// Causal convolution truncated at the left boundary; out may not alias x.
void convolve(const double* x, std::size_t n, const double* k, std::size_t m,
              double scale, double* out);

// Plain dot product.
double dot(const double* a, const double* b, std::size_t n);

// weekly[t] = sum of daily[7t .. 7t+6] (last segment may be short).
void segment_sum(const double* daily, std::size_t n_days, std::size_t seg_len,
                 double* out, std::size_t n_segs);

// out[i] += scale * x[i]
void scale_add(const double* x, std::size_t n, double scale, double* out);

// Name of the active implementation ("scalar", "avx2"); picked once at startup.
const char* active_impl();

// Force a specific implementation ("scalar" or "avx2"); used by the
// equivalence tests. Returns false if unavailable on this CPU.
bool force_impl(const char* name);

// convenience wrappers
std::vector<double> convolve(const std::vector<double>& x,
                             const std::vector<double>& k, double scale = 1.0);
std::vector<double> segment_sum(const std::vector<double>& daily,
                                std::size_t seg_len, std::size_t n_segs);

}  // namespace epi::kernels

#endif
