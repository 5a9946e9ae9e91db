#ifndef EPI_LIKELIHOOD_HPP
#define EPI_LIKELIHOOD_HPP

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "epi/calendar.hpp"
#include "epi/observation.hpp"
#include "epi/params.hpp"
#include "epi/rng.hpp"
#include "epi/severity.hpp"
#include "epi/transmission.hpp"

namespace epi {

enum class LikKind {
  exact_independent,
  mc_joint_icu_first,
  mc_joint_hosp_first,
  brute_force,
};

std::string to_string(LikKind kind);

struct LogLikEstimate {
  double value = 0.0;
  LikKind kind = LikKind::exact_independent;
  int n_particles = 1;
  // standard error of the natural-scale likelihood estimate (0 for exact kinds)
  double mc_se = 0.0;
};

// Weekly reduction of the hospital/IC severity structure. The daily Poisson
// field of (hospital day, IC day) events is grouped by week pairs:
//   rho[t][j]  = rate of admissions in hospital week t whose IC admission
//                falls in week t+j (inside the horizon),
//   tail[t]    = rate of admissions in hospital week t whose IC admission
//                falls past the horizon,
//   lam_h_week / lam_ic_week = weekly marginal admission rates.
struct JointGrid {
  std::vector<double> lam_h_week;
  std::vector<double> lam_ic_week;
  std::vector<std::vector<double>> rho;  // [n_weeks][max_week_lag + 1]
  std::vector<double> tail;
  int max_week_lag = 0;
};

JointGrid build_joint_grid(const InfectionSeries& xi, const ParamSet& params,
                           const Calendar& cal);

// Misspecified product of the two marginal Poisson likelihoods.
LogLikEstimate loglik_independent(const ObservationSet& obs,
                                  const ParamSet& params,
                                  const InfectionSeries& xi,
                                  const Calendar& cal);

// Unbiased MC estimate of the joint hospital/IC likelihood: closed-form
// p(y_ic), then per particle a draw of the hospital path from its exact
// conditional given y_ic, weighted by the hospital detection density.
LogLikEstimate loglik_joint_mc(const ObservationSet& obs,
                               const ParamSet& params,
                               const InfectionSeries& xi, const Calendar& cal,
                               int n_particles, RngStream& rng);

// The alternative factorization: closed-form p(y_h), MC for p(y_ic | y_h) by
// forward-thinning sampled hospital paths.
LogLikEstimate loglik_joint_mc_alt(const ObservationSet& obs,
                                   const ParamSet& params,
                                   const InfectionSeries& xi,
                                   const Calendar& cal, int n_particles,
                                   RngStream& rng);

struct InfeasibleSizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Exact joint p(y_h, y_ic) by exhaustive summation over the latent week-pair
// configurations, truncated where the Poisson mass drops below 1e-14 per
// week. Only feasible for tiny instances; throws InfeasibleSizeError
// otherwise.
LogLikEstimate loglik_brute_force(const ObservationSet& obs,
                                  const ParamSet& params,
                                  const InfectionSeries& xi,
                                  const Calendar& cal,
                                  long long max_count = 64);

enum class HospIcMode { joint, joint_alt, independent, brute };

struct StreamFlags {
  bool hosp_ic = true;
  bool gp = false;
  bool virology = false;
};

// Full multi-stream likelihood: hospital/IC term per `mode`, plus closed-form
// GP Poisson-mixture and virology Binomial terms for the active streams.
LogLikEstimate loglik_full(const ObservationSet& obs, const ParamSet& params,
                           const Calendar& cal, StageCounts stages,
                           StreamFlags flags, HospIcMode mode, int n_particles,
                           RngStream& rng, int substeps = 1000);

using LikelihoodFn = std::function<LogLikEstimate(const ParamSet&, RngStream&)>;

// Bind observations/calendar/mode into a likelihood callable for the sampler.
// The callable caches the transmission solve and rate grid, so repeated
// evaluations at an unchanged parameter point (MCWM's current side) are cheap.
// Delay pmfs are treated as fixed over the callable's lifetime.
LikelihoodFn make_likelihood(const ObservationSet& obs, const Calendar& cal,
                             StageCounts stages, StreamFlags flags,
                             HospIcMode mode, int n_particles,
                             int substeps = 1000);

}  // namespace epi

#endif
