#ifndef EPI_TRANSMISSION_HPP
#define EPI_TRANSMISSION_HPP

#include <vector>

#include "epi/calendar.hpp"
#include "epi/params.hpp"

namespace epi {

struct StageCounts {
  int m_e = 1;  // number of exposed stages
  int m_i = 1;  // number of infectious stages
};

struct InfectionSeries {
  std::vector<double> xi0;  // new infections per day, persons/day
  double total() const;
};

// Daily start-of-day compartment occupancies (index 0..n_days), with stage
// occupancies collapsed to totals. Used for conservation checks and state
// reporting.
struct TransmissionTrajectory {
  InfectionSeries xi;
  std::vector<double> s, e_total, i_total, r;
};

// Deterministic SE(m)I(m)R dynamics on the daily grid. Each day is integrated
// with `substeps` internal exponential-decrement updates (h = 1/substeps day),
// which keeps all occupancies in [0, N] for any admissible rates while
// tracking the underlying ODE closely. The transmission rate is beta*kappa
// inside closure windows and beta elsewhere. Initial state: r = pi*N, the
// iota*N infected mass split equally across the E and I stages, remainder
// susceptible.
InfectionSeries solve_transmission(const ParamSet& params, const Calendar& cal,
                                   StageCounts stages = {},
                                   int substeps = 1000);

TransmissionTrajectory solve_transmission_full(const ParamSet& params,
                                               const Calendar& cal,
                                               StageCounts stages = {},
                                               int substeps = 1000);

// Effective initial reproduction number beta/gamma * (1 - pi).
double reproduction_number(const ParamSet& params);

}  // namespace epi

#endif
