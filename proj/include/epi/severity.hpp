#ifndef EPI_SEVERITY_HPP
#define EPI_SEVERITY_HPP

#include <vector>

#include "epi/calendar.hpp"
#include "epi/params.hpp"
#include "epi/rng.hpp"
#include "epi/transmission.hpp"

namespace epi {

// One forward realization of the severity cascade on the daily grid.
// Convolved series only contain events landing inside the horizon; the mass
// pushed past the end is kept in the companion overflow counters so that
// conservation is exact.
struct LatentPath {
  std::vector<long long> x0h;   // infection-day cohorts bound for hospital
  std::vector<long long> xh;    // hospital admissions by day
  long long xh_overflow = 0;
  std::vector<long long> xh_ic_cohort;  // admission-day cohorts bound for IC
  std::vector<long long> xic;   // IC admissions by day
  long long xic_overflow = 0;
  std::vector<long long> x0f;   // infection-day cohorts bound for GP
  std::vector<long long> xf;    // GP-attributable consultations by day
  long long xf_overflow = 0;
};

struct ConvolveDraw {
  std::vector<long long> events;
  long long overflow = 0;  // mass delayed past the end of the horizon
};

// Independent Pois(theta * xi0[u]) cohort per day.
std::vector<long long> sample_cohort_poisson(const InfectionSeries& xi,
                                             double theta, RngStream& rng);

// Multinomial delay split of each cohort day, summed by arrival day.
ConvolveDraw split_and_convolve(const std::vector<long long>& cohort,
                                const DelayPmf& pmf, RngStream& rng);

// Independent Bin(x[t], theta) per day.
std::vector<long long> sample_binomial_transition(const std::vector<long long>& x,
                                                  double theta, RngStream& rng);

// Full cascade: infection cohorts -> hospital admissions -> IC admissions,
// plus the GP branch.
LatentPath simulate_severity(const InfectionSeries& xi, const ParamSet& params,
                             RngStream& rng);

// Closed-form marginal Poisson rates on the daily grid:
//   lambda_h[u]  = theta_h * sum_d xi[u-d] f_h[d]
//   lambda_ic[u] = theta_ic * theta_h * sum_d sum_g xi[u-d-g] f_h[d] f_ic[g]
//   lambda_f[u]  = theta_f * sum_d xi[u-d] f_gp[d]
struct MarginalRates {
  std::vector<double> lambda_h, lambda_ic, lambda_f;
};

MarginalRates marginal_rates(const InfectionSeries& xi, const ParamSet& params);

}  // namespace epi

#endif
