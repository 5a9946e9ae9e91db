#ifndef EPI_OBSERVATION_HPP
#define EPI_OBSERVATION_HPP

#include <optional>
#include <vector>

#include "epi/calendar.hpp"
#include "epi/params.hpp"
#include "epi/rng.hpp"
#include "epi/severity.hpp"

namespace epi {

struct VirologyRecord {
  int week = 0;
  long long tested = 0;
  long long positive = 0;
};

// Aligned observed series. y_h / y_ic are weekly; y_g, when present, is daily.
struct ObservationSet {
  std::vector<long long> y_h;
  std::vector<long long> y_ic;
  std::optional<std::vector<long long>> y_g;
  std::vector<VirologyRecord> virology;

  void validate(const Calendar& cal) const;
};

// Weekly background ILI rate b_t = exp(a0 + a1 sin(2 pi t / period) +
// a2 cos(2 pi t / period)); spread uniformly over the 7 days of the week.
struct BackgroundModel {
  double a0 = 0.0, a1 = 0.0, a2 = 0.0;
  double period = 52.0;  // weeks

  double weekly_rate(int week) const;
  double daily_rate(int week) const { return weekly_rate(week) / 7.0; }

  static BackgroundModel from_params(const ParamSet& p) {
    return BackgroundModel{p.bg_a0, p.bg_a1, p.bg_a2, 52.0};
  }
};

template <typename T>
std::vector<T> weekly_aggregate(const std::vector<T>& daily,
                                const Calendar& cal);

// Simulate the observation layer on top of a latent path. Hospital and IC
// counts are aggregated day->week before Binomial detection. GP consultations
// add a Poisson background to the epidemic series and thin with the
// day-of-week detection probability. Virology positives are Binomial with the
// expected-rate positivity for the week, so lambda_f_day (expected daily
// GP-attributable rate) must be supplied when swabs_tested is nonempty.
ObservationSet simulate_observations(const LatentPath& path,
                                     const ParamSet& params,
                                     const Calendar& cal,
                                     const std::vector<long long>& swabs_tested,
                                     const std::vector<double>& lambda_f_day,
                                     RngStream& rng);

// sum_t log Bin(y[t]; x[t], zeta[t]); -inf when any y[t] > x[t].
double loglik_binomial_detection(const std::vector<long long>& y,
                                 const std::vector<long long>& x,
                                 const std::vector<double>& zeta);

// sum_t log Pois(y[t]; lambda[t]); zero-rate weeks contribute 0 when y = 0.
double loglik_poisson_series(const std::vector<long long>& y,
                             const std::vector<double>& lambda);

// Expected-rate virology positivity for each week: epidemic GP rate over
// epidemic + background rate.
std::vector<double> virology_positivity(const std::vector<double>& lambda_f,
                                        const BackgroundModel& bg,
                                        const Calendar& cal);

}  // namespace epi

#endif
