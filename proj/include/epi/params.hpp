#ifndef EPI_PARAMS_HPP
#define EPI_PARAMS_HPP

#include <array>
#include <vector>

#include "epi/delay.hpp"

namespace epi {

class Calendar;

// Full parameter vector: transmission, severity, detection and background
// components. Detection probabilities zeta_h / zeta_ic hold either a single
// value (constant over weeks) or one value per week.
struct ParamSet {
  // transmission
  double beta = 0.63;    // transmission rate, per day
  double pi = 0.3;       // initially immune proportion
  double iota = 1e-4;    // initially infected/infectious proportion
  double sigma = 0.25;   // E exit rate, per day
  double gamma = 1.0 / 3.5;  // I exit rate, per day
  double kappa = 1.0;    // school-closure multiplier on beta
  double n_pop = 10000.0;

  // severity
  double theta_h = 0.1;   // P(hospitalization | infection)
  double theta_ic = 0.1;  // P(IC admission | hospitalization)
  double theta_f = 0.01;  // P(GP consultation | infection)

  // detection
  std::vector<double> zeta_h{0.1};
  std::vector<double> zeta_ic{0.1};
  double zeta_g_base = 0.1;
  std::array<double, 7> dow_effect{1, 1, 1, 1, 1, 1, 1};  // mean-1 normalized

  // GP background seasonality: rate exp(a0 + a1 sin + a2 cos), weekly
  double bg_a0 = 0.0;
  double bg_a1 = 0.0;
  double bg_a2 = 0.0;

  // delays
  DelayPmf delay_inf_to_hosp;
  DelayPmf delay_hosp_to_ic;
  DelayPmf delay_inf_to_gp;

  double zeta_h_at(int week) const {
    return zeta_h.size() == 1 ? zeta_h[0] : zeta_h[week];
  }
  double zeta_ic_at(int week) const {
    return zeta_ic.size() == 1 ? zeta_ic[0] : zeta_ic[week];
  }
  double zeta_g_at(int day_of_week) const {
    return zeta_g_base * dow_effect[day_of_week];
  }

  // Throws std::invalid_argument naming the offending field and constraint.
  void validate(const Calendar& cal) const;
  void validate_scalars() const;  // bounds only, no calendar-length checks
};

}  // namespace epi

#endif
