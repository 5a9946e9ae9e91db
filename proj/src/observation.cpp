#include "epi/observation.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "epi/mathfn.hpp"

namespace epi {

void ObservationSet::validate(const Calendar& cal) const {
  const auto n_weeks = static_cast<std::size_t>(cal.n_weeks());
  if (y_h.size() != n_weeks)
    throw std::invalid_argument("y_h length " + std::to_string(y_h.size()) +
                                " does not match calendar weeks " +
                                std::to_string(n_weeks));
  if (y_ic.size() != n_weeks)
    throw std::invalid_argument("y_ic length " + std::to_string(y_ic.size()) +
                                " does not match calendar weeks " +
                                std::to_string(n_weeks));
  for (long long v : y_h)
    if (v < 0) throw std::invalid_argument("y_h has a negative count");
  for (long long v : y_ic)
    if (v < 0) throw std::invalid_argument("y_ic has a negative count");
  if (y_g) {
    if (y_g->size() != static_cast<std::size_t>(cal.n_days()))
      throw std::invalid_argument("y_g length " + std::to_string(y_g->size()) +
                                  " does not match calendar days " +
                                  std::to_string(cal.n_days()));
    for (long long v : *y_g)
      if (v < 0) throw std::invalid_argument("y_g has a negative count");
  }
  for (const auto& rec : virology) {
    if (rec.week < 0 || rec.week >= cal.n_weeks())
      throw std::invalid_argument("virology week " + std::to_string(rec.week) +
                                  " outside calendar");
    if (rec.tested < 0 || rec.positive < 0)
      throw std::invalid_argument("virology has a negative count");
    if (rec.positive > rec.tested)
      throw std::invalid_argument(
          "virology week " + std::to_string(rec.week) + ": positive " +
          std::to_string(rec.positive) + " > tested " +
          std::to_string(rec.tested));
  }
}

double BackgroundModel::weekly_rate(int week) const {
  const double w = 2.0 * std::numbers::pi * static_cast<double>(week) / period;
  return std::exp(a0 + a1 * std::sin(w) + a2 * std::cos(w));
}

template <typename T>
std::vector<T> weekly_aggregate(const std::vector<T>& daily,
                                const Calendar& cal) {
  if (daily.size() != static_cast<std::size_t>(cal.n_days()))
    throw std::invalid_argument("weekly_aggregate: series length " +
                                std::to_string(daily.size()) +
                                " does not match calendar days " +
                                std::to_string(cal.n_days()));
  std::vector<T> weekly(cal.n_weeks(), T{});
  for (int u = 0; u < cal.n_days(); ++u) weekly[cal.week_of(u)] += daily[u];
  return weekly;
}

template std::vector<double> weekly_aggregate<double>(
    const std::vector<double>&, const Calendar&);
template std::vector<long long> weekly_aggregate<long long>(
    const std::vector<long long>&, const Calendar&);

ObservationSet simulate_observations(const LatentPath& path,
                                     const ParamSet& params,
                                     const Calendar& cal,
                                     const std::vector<long long>& swabs_tested,
                                     const std::vector<double>& lambda_f_day,
                                     RngStream& rng) {
  ObservationSet obs;
  const BackgroundModel bg = BackgroundModel::from_params(params);

  const auto xh_week = weekly_aggregate(path.xh, cal);
  const auto xic_week = weekly_aggregate(path.xic, cal);
  obs.y_h.resize(cal.n_weeks());
  obs.y_ic.resize(cal.n_weeks());
  for (int t = 0; t < cal.n_weeks(); ++t) {
    obs.y_h[t] = rng.binomial(xh_week[t], params.zeta_h_at(t));
    obs.y_ic[t] = rng.binomial(xic_week[t], params.zeta_ic_at(t));
  }

  std::vector<long long> y_g(cal.n_days(), 0);
  for (int u = 0; u < cal.n_days(); ++u) {
    const long long background = rng.poisson(bg.daily_rate(cal.week_of(u)));
    const long long consulters = path.xf[u] + background;
    y_g[u] = rng.binomial(consulters, params.zeta_g_at(cal.day_of_week(u)));
  }
  obs.y_g = std::move(y_g);

  if (!swabs_tested.empty()) {
    if (swabs_tested.size() != static_cast<std::size_t>(cal.n_weeks()))
      throw std::invalid_argument("swabs_tested length must equal weeks");
    const auto p = virology_positivity(lambda_f_day, bg, cal);
    obs.virology.reserve(cal.n_weeks());
    for (int t = 0; t < cal.n_weeks(); ++t) {
      VirologyRecord rec;
      rec.week = t;
      rec.tested = swabs_tested[t];
      rec.positive = rng.binomial(swabs_tested[t], p[t]);
      obs.virology.push_back(rec);
    }
  }
  return obs;
}

double loglik_binomial_detection(const std::vector<long long>& y,
                                 const std::vector<long long>& x,
                                 const std::vector<double>& zeta) {
  if (y.size() != x.size())
    throw std::invalid_argument("loglik_binomial_detection: length mismatch");
  double acc = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double z = zeta.size() == 1 ? zeta[0] : zeta[t];
    const double term = log_binomial_pmf(y[t], x[t], z);
    if (term == kNegInf) return kNegInf;
    acc += term;
  }
  return acc;
}

double loglik_poisson_series(const std::vector<long long>& y,
                             const std::vector<double>& lambda) {
  if (y.size() != lambda.size())
    throw std::invalid_argument("loglik_poisson_series: length mismatch");
  double acc = 0.0;
  for (std::size_t t = 0; t < y.size(); ++t) {
    const double term = log_poisson_pmf(y[t], lambda[t]);
    if (term == kNegInf) return kNegInf;
    acc += term;
  }
  return acc;
}

std::vector<double> virology_positivity(const std::vector<double>& lambda_f,
                                        const BackgroundModel& bg,
                                        const Calendar& cal) {
  if (lambda_f.size() != static_cast<std::size_t>(cal.n_days()))
    throw std::invalid_argument("virology_positivity: daily rate length");
  const auto lambda_f_week = weekly_aggregate(lambda_f, cal);
  std::vector<double> p(cal.n_weeks(), 0.0);
  for (int t = 0; t < cal.n_weeks(); ++t) {
    const double denom = lambda_f_week[t] + bg.weekly_rate(t);
    p[t] = denom > 0.0 ? lambda_f_week[t] / denom : 0.0;
  }
  return p;
}

}  // namespace epi
