#include "epi/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "epi/calendar.hpp"

namespace epi {

namespace {

void check_prob(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0))
    throw std::invalid_argument(std::string(name) + " = " + std::to_string(v) +
                                " violates [0,1]");
}

void check_pos(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string(name) + " = " + std::to_string(v) +
                                " violates (0,inf)");
}

void check_pmf(const DelayPmf& pmf, const char* name) {
  if (pmf.probs.empty())
    throw std::invalid_argument(std::string(name) + " is empty");
  for (double p : pmf.probs)
    if (!(p >= 0.0))
      throw std::invalid_argument(std::string(name) +
                                  " has a negative probability");
  if (std::fabs(pmf.sum() - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(name) +
                                " does not sum to 1 within 1e-12");
}

}  // namespace

void ParamSet::validate_scalars() const {
  check_pos(beta, "beta");
  check_prob(pi, "pi");
  check_prob(iota, "iota");
  if (pi + iota > 1.0)
    throw std::invalid_argument("pi + iota = " + std::to_string(pi + iota) +
                                " violates pi + iota <= 1");
  check_pos(sigma, "sigma");
  check_pos(gamma, "gamma");
  check_pos(kappa, "kappa");
  check_pos(n_pop, "n_pop");
  check_prob(theta_h, "theta_h");
  check_prob(theta_ic, "theta_ic");
  check_prob(theta_f, "theta_f");
  for (double z : zeta_h) check_prob(z, "zeta_h");
  for (double z : zeta_ic) check_prob(z, "zeta_ic");
  check_prob(zeta_g_base, "zeta_g");
  for (int j = 0; j < 7; ++j) {
    if (!(dow_effect[j] >= 0.0))
      throw std::invalid_argument("dow_effect[" + std::to_string(j) +
                                  "] violates >= 0");
    check_prob(zeta_g_base * dow_effect[j], "zeta_g * dow_effect");
  }
  if (!std::isfinite(bg_a0) || !std::isfinite(bg_a1) || !std::isfinite(bg_a2))
    throw std::invalid_argument("background coefficients must be finite");
  check_pmf(delay_inf_to_hosp, "delay_inf_to_hosp");
  check_pmf(delay_hosp_to_ic, "delay_hosp_to_ic");
  check_pmf(delay_inf_to_gp, "delay_inf_to_gp");
}

void ParamSet::validate(const Calendar& cal) const {
  validate_scalars();
  const auto n_weeks = static_cast<std::size_t>(cal.n_weeks());
  if (zeta_h.size() != 1 && zeta_h.size() != n_weeks)
    throw std::invalid_argument("zeta_h length " +
                                std::to_string(zeta_h.size()) +
                                " violates {1, n_weeks}");
  if (zeta_ic.size() != 1 && zeta_ic.size() != n_weeks)
    throw std::invalid_argument("zeta_ic length " +
                                std::to_string(zeta_ic.size()) +
                                " violates {1, n_weeks}");
}

}  // namespace epi
