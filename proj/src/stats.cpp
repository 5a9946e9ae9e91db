#include "epi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace epi {

double mean(const std::vector<double>& x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc / static_cast<double>(x.size());
}

double variance(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  const double m = mean(x);
  double acc = 0.0;
  for (double v : x) acc += (v - m) * (v - m);
  return acc / static_cast<double>(x.size() - 1);
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw std::invalid_argument("quantile: empty sample");
  std::sort(x.begin(), x.end());
  const double h = q * static_cast<double>(x.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  const double frac = h - static_cast<double>(lo);
  return x[lo] + frac * (x[hi] - x[lo]);
}

double effective_sample_size(const std::vector<double>& x) {
  const std::size_t n = x.size();
  if (n < 4) return static_cast<double>(n);
  const double m = mean(x);
  std::vector<double> c(n, 0.0);
  double c0 = 0.0;
  for (double v : x) c0 += (v - m) * (v - m);
  c0 /= static_cast<double>(n);
  if (c0 <= 0.0) return static_cast<double>(n);
  const std::size_t max_lag = std::min(n / 2, static_cast<std::size_t>(2000));
  // sum consecutive lag pairs while they stay positive (Geyer)
  double tau = 1.0;
  for (std::size_t k = 1; k + 1 <= max_lag; k += 2) {
    double ck = 0.0, ck1 = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) ck += (x[i] - m) * (x[i + k] - m);
    for (std::size_t i = 0; i + k + 1 < n; ++i)
      ck1 += (x[i] - m) * (x[i + k + 1] - m);
    ck /= static_cast<double>(n) * c0;
    ck1 /= static_cast<double>(n) * c0;
    const double pair = ck + ck1;
    if (pair <= 0.0) break;
    tau += 2.0 * pair;
  }
  return std::max(1.0, static_cast<double>(n) / tau);
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_distance: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= v) ++i;
    while (j < b.size() && b[j] <= v) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na -
                              static_cast<double>(j) / nb));
  }
  return d;
}

ParamSummary summarize(const std::vector<double>& draws) {
  ParamSummary s;
  s.mean = mean(draws);
  s.var = variance(draws);
  s.median = quantile(draws, 0.5);
  s.q025 = quantile(draws, 0.025);
  s.q975 = quantile(draws, 0.975);
  s.r95 = s.q975 - s.q025;
  s.ess = effective_sample_size(draws);
  return s;
}

}  // namespace epi
