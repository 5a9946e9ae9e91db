#ifndef EPI_MATHFN_HPP
#define EPI_MATHFN_HPP

#include <cmath>
#include <limits>
#include <vector>

namespace epi {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double lchoose(long long n, long long k) {
  if (k < 0 || k > n) return kNegInf;
  return std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(k) + 1.0) -
         std::lgamma(static_cast<double>(n - k) + 1.0);
}

// log P(Y = y) for Y ~ Pois(lambda); lambda = 0 handled as a point mass at 0.
inline double log_poisson_pmf(long long y, double lambda) {
  if (y < 0) return kNegInf;
  if (lambda <= 0.0) return (y == 0) ? 0.0 : kNegInf;
  return static_cast<double>(y) * std::log(lambda) - lambda -
         std::lgamma(static_cast<double>(y) + 1.0);
}

// log P(Y = y) for Y ~ Bin(n, p); p outside (0,1) degenerates cleanly.
inline double log_binomial_pmf(long long y, long long n, double p) {
  if (y < 0 || y > n) return kNegInf;
  if (p <= 0.0) return (y == 0) ? 0.0 : kNegInf;
  if (p >= 1.0) return (y == n) ? 0.0 : kNegInf;
  return lchoose(n, y) + static_cast<double>(y) * std::log(p) +
         static_cast<double>(n - y) * std::log1p(-p);
}

// log(mean(exp(logs))) with the usual max shift; -inf when all terms are.
inline double log_mean_exp(const std::vector<double>& logs) {
  double m = kNegInf;
  for (double v : logs) m = std::max(m, v);
  if (!(m > kNegInf)) return kNegInf;
  double acc = 0.0;
  for (double v : logs) acc += std::exp(v - m);
  return m + std::log(acc / static_cast<double>(logs.size()));
}

// Upper quantile bound for Pois(lambda): smallest n with
// P(Y > n) <= tail. Simple forward summation; adequate for oracle-sized rates.
inline long long poisson_upper_quantile(double lambda, double tail) {
  if (lambda <= 0.0) return 0;
  double logp = -lambda;  // log pmf at 0
  double cdf = std::exp(logp);
  long long n = 0;
  while (1.0 - cdf > tail && n < 100000000LL) {
    ++n;
    logp += std::log(lambda) - std::log(static_cast<double>(n));
    cdf += std::exp(logp);
  }
  return n;
}

}  // namespace epi

#endif
