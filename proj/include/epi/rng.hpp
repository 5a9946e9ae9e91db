#ifndef EPI_RNG_HPP
#define EPI_RNG_HPP

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace epi {

// Deterministic stream derivation: (seed, stream, substream) -> independent
// generator. Particles, datasets and chains each get their own stream so that
// results do not depend on scheduling order.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Poisson and Binomial samplers tuned for parameters that change on every
// call (the std:: distributions pay a heavy per-call setup in that pattern):
// inversion for small means, Hormann's transformed-rejection algorithms
// (PTRS / BTRS) otherwise. Both are exact samplers.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0,
                     std::uint64_t substream = 0)
      : engine_(splitmix64(splitmix64(splitmix64(seed) ^ stream) ^
                           splitmix64(substream ^ 0x5851f42d4c957f2dULL))) {}

  double uniform() { return unif_(engine_); }

  double normal() { return norm_(engine_); }

  long long poisson(double mean) {
    if (mean <= 0.0) return 0;
    if (mean < 10.0) return poisson_inversion(mean);
    return poisson_ptrs(mean);
  }

  long long binomial(long long n, double p) {
    if (n <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    if (p > 0.5) return n - binomial(n, 1.0 - p);
    const double np = static_cast<double>(n) * p;
    if (np < 14.0) return binomial_inversion(n, p);
    return binomial_btrs(n, p);
  }

  // Multinomial draw by chained binomials; probs need not be normalized.
  void multinomial(long long n, const std::vector<double>& probs,
                   std::vector<long long>& out) {
    out.assign(probs.size(), 0);
    double rest = 0.0;
    for (double p : probs) rest += p;
    for (std::size_t i = 0; i + 1 < probs.size() && n > 0; ++i) {
      if (rest <= 0.0) break;
      const long long draw = binomial(n, probs[i] / rest);
      out[i] = draw;
      n -= draw;
      rest -= probs[i];
    }
    if (!probs.empty()) out.back() += n;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  long long poisson_inversion(double mean) {
    // Knuth's product method
    const double limit = std::exp(-mean);
    long long k = 0;
    double prod = unif_(engine_);
    while (prod > limit) {
      ++k;
      prod *= unif_(engine_);
    }
    return k;
  }

  long long poisson_ptrs(double mean) {
    // Hormann (1993), transformed rejection with squeeze, mean >= 10
    const double log_mean = std::log(mean);
    const double b = 0.931 + 2.53 * std::sqrt(mean);
    const double a = -0.059 + 0.02483 * b;
    const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    const double v_r = 0.9277 - 3.6224 / (b - 2.0);
    for (;;) {
      const double u = unif_(engine_) - 0.5;
      const double v = unif_(engine_);
      const double us = 0.5 - std::fabs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
      if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
      if (kf < 0.0 || (us < 0.013 && v > us)) continue;
      const long long k = static_cast<long long>(kf);
      const double lhs =
          std::log(v * inv_alpha / (a / (us * us) + b));
      const double rhs = static_cast<double>(k) * log_mean - mean -
                         std::lgamma(static_cast<double>(k) + 1.0);
      if (lhs <= rhs) return k;
    }
  }

  long long binomial_inversion(long long n, double p) {
    // sequential CDF search (BINV); requires modest n*p
    const double q = 1.0 - p;
    const double s = p / q;
    const double a = static_cast<double>(n + 1) * s;
    double r = std::pow(q, static_cast<double>(n));
    double u = unif_(engine_);
    long long k = 0;
    while (u > r) {
      u -= r;
      ++k;
      if (k > n) {  // numerical tail guard; restart
        r = std::pow(q, static_cast<double>(n));
        u = unif_(engine_);
        k = 0;
        continue;
      }
      r *= a / static_cast<double>(k) - s;
    }
    return k;
  }

  long long binomial_btrs(long long n, double p) {
    // Hormann (1993) BTRD-style transformed rejection, p <= 0.5, n p >= 10
    const double nd = static_cast<double>(n);
    const double q = 1.0 - p;
    const double spq = std::sqrt(nd * p * q);
    const double b = 1.15 + 2.53 * spq;
    const double a = -0.0873 + 0.0248 * b + 0.01 * p;
    const double c = nd * p + 0.5;
    const double v_r = 0.92 - 4.2 / b;
    const double alpha = (2.83 + 5.1 / b) * spq;
    const double lpq = std::log(p / q);
    const double m = std::floor((nd + 1.0) * p);
    const double h = std::lgamma(m + 1.0) + std::lgamma(nd - m + 1.0);
    for (;;) {
      const double u = unif_(engine_) - 0.5;
      const double v = unif_(engine_);
      const double us = 0.5 - std::fabs(u);
      const double kf = std::floor((2.0 * a / us + b) * u + c);
      if (kf < 0.0 || kf > nd) continue;
      if (us >= 0.07 && v <= v_r) return static_cast<long long>(kf);
      const double lhs = std::log(v * alpha / (a / (us * us) + b));
      const double rhs = h - std::lgamma(kf + 1.0) -
                         std::lgamma(nd - kf + 1.0) + (kf - m) * lpq;
      if (lhs <= rhs) return static_cast<long long>(kf);
    }
  }

  std::mt19937_64 engine_;
  std::uniform_real_distribution<double> unif_{0.0, 1.0};
  std::normal_distribution<double> norm_{0.0, 1.0};
};

}  // namespace epi

#endif
