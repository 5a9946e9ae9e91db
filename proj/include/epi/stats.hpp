#ifndef EPI_STATS_HPP
#define EPI_STATS_HPP

#include <vector>

namespace epi {

double mean(const std::vector<double>& x);
double variance(const std::vector<double>& x);  // sample variance, n-1

// Linear-interpolation quantile (R type 7). q in [0,1]; x need not be sorted.
double quantile(std::vector<double> x, double q);

// Effective sample size from the autocorrelation function using Geyer's
// initial positive sequence truncation.
double effective_sample_size(const std::vector<double>& x);

// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

struct ParamSummary {
  double mean = 0.0;
  double var = 0.0;
  double median = 0.0;
  double q025 = 0.0;
  double q975 = 0.0;
  double r95 = 0.0;  // width of the equal-tailed 95% interval
  double ess = 0.0;
};

ParamSummary summarize(const std::vector<double>& draws);

}  // namespace epi

#endif
