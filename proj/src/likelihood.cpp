#include "epi/likelihood.hpp"

#include <algorithm>
#include <array>
#include <memory>
#include <cmath>
#include <unordered_map>

#include "epi/mathfn.hpp"

namespace epi {

std::string to_string(LikKind kind) {
  switch (kind) {
    case LikKind::exact_independent: return "exact_independent";
    case LikKind::mc_joint_icu_first: return "mc_joint_icu_first";
    case LikKind::mc_joint_hosp_first: return "mc_joint_hosp_first";
    case LikKind::brute_force: return "brute_force";
  }
  return "unknown";
}

JointGrid build_joint_grid(const InfectionSeries& xi, const ParamSet& params,
                           const Calendar& cal) {
  const MarginalRates rates = marginal_rates(xi, params);
  JointGrid grid;
  grid.lam_h_week = weekly_aggregate(rates.lambda_h, cal);
  grid.lam_ic_week = weekly_aggregate(rates.lambda_ic, cal);

  const auto& f_ic = params.delay_hosp_to_ic.probs;
  const int max_d = static_cast<int>(f_ic.size()) - 1;
  grid.max_week_lag = (max_d + Calendar::kWeekLen - 1) / Calendar::kWeekLen + 1;
  grid.max_week_lag = std::min(grid.max_week_lag, cal.n_weeks());
  grid.rho.assign(cal.n_weeks(),
                  std::vector<double>(grid.max_week_lag + 1, 0.0));
  grid.tail.assign(cal.n_weeks(), 0.0);

  const int n_days = cal.n_days();
  for (int c = 0; c < n_days; ++c) {
    const double base = params.theta_ic * rates.lambda_h[c];
    if (base == 0.0) continue;
    const int t = cal.week_of(c);
    for (int g = 0; g <= max_d; ++g) {
      const int v = c + g;
      if (v < n_days) {
        const int j = cal.week_of(v) - t;
        grid.rho[t][j] += base * f_ic[g];
      } else {
        grid.tail[t] += base * f_ic[g];
      }
    }
  }
  return grid;
}

namespace {

// natural-scale standard error of exp(log_shift) * mean(exp(logw))
double natural_se(const std::vector<double>& logw, double log_shift) {
  const std::size_t n = logw.size();
  if (n < 2) return 0.0;
  double m = kNegInf;
  for (double v : logw) m = std::max(m, v);
  if (!(m > kNegInf)) return 0.0;
  double s1 = 0.0, s2 = 0.0;
  for (double v : logw) {
    const double a = std::exp(v - m);
    s1 += a;
    s2 += a * a;
  }
  s1 /= static_cast<double>(n);
  s2 /= static_cast<double>(n);
  const double var = std::max(0.0, s2 - s1 * s1) * static_cast<double>(n) /
                     static_cast<double>(n - 1);
  return std::exp(log_shift + m) * std::sqrt(var / static_cast<double>(n));
}

}  // namespace

LogLikEstimate loglik_independent(const ObservationSet& obs,
                                  const ParamSet& params,
                                  const InfectionSeries& xi,
                                  const Calendar& cal) {
  const MarginalRates rates = marginal_rates(xi, params);
  const auto lam_h = weekly_aggregate(rates.lambda_h, cal);
  const auto lam_ic = weekly_aggregate(rates.lambda_ic, cal);
  std::vector<double> rate_h(cal.n_weeks()), rate_ic(cal.n_weeks());
  for (int t = 0; t < cal.n_weeks(); ++t) {
    rate_h[t] = params.zeta_h_at(t) * lam_h[t];
    rate_ic[t] = params.zeta_ic_at(t) * lam_ic[t];
  }
  LogLikEstimate est;
  est.kind = LikKind::exact_independent;
  est.n_particles = 1;
  est.mc_se = 0.0;
  est.value = loglik_poisson_series(obs.y_h, rate_h) +
              loglik_poisson_series(obs.y_ic, rate_ic);
  return est;
}

namespace detail {

LogLikEstimate joint_mc_on_grid(const ObservationSet& obs,
                                const ParamSet& params, const JointGrid& grid,
                                const Calendar& cal, int n_particles,
                                RngStream& rng);
LogLikEstimate joint_mc_alt_on_grid(const ObservationSet& obs,
                                    const ParamSet& params,
                                    const JointGrid& grid, const Calendar& cal,
                                    int n_particles, RngStream& rng);
LogLikEstimate brute_force_on_grid(const ObservationSet& obs,
                                   const ParamSet& params,
                                   const JointGrid& grid, const Calendar& cal,
                                   long long max_count);

}  // namespace detail

LogLikEstimate loglik_joint_mc(const ObservationSet& obs,
                               const ParamSet& params,
                               const InfectionSeries& xi, const Calendar& cal,
                               int n_particles, RngStream& rng) {
  const JointGrid grid = build_joint_grid(xi, params, cal);
  return detail::joint_mc_on_grid(obs, params, grid, cal, n_particles, rng);
}

LogLikEstimate detail::joint_mc_on_grid(const ObservationSet& obs,
                                        const ParamSet& params,
                                        const JointGrid& grid,
                                        const Calendar& cal, int n_particles,
                                        RngStream& rng) {
  if (n_particles < 1)
    throw std::invalid_argument("loglik_joint_mc: n_particles must be >= 1");
  const int n_weeks = cal.n_weeks();
  const int lag = grid.max_week_lag;

  LogLikEstimate est;
  est.kind = LikKind::mc_joint_icu_first;
  est.n_particles = n_particles;

  // closed-form marginal of the IC stream
  double lp_ic = 0.0;
  for (int s = 0; s < n_weeks; ++s) {
    lp_ic += log_poisson_pmf(obs.y_ic[s],
                             params.zeta_ic_at(s) * grid.lam_ic_week[s]);
  }
  if (lp_ic == kNegInf) {
    est.value = kNegInf;
    return est;
  }

  // per-particle streams so results do not depend on draw interleaving
  const std::uint64_t particle_base = rng.engine()();

  std::vector<double> logw(n_particles, 0.0);
  std::vector<double> probs(lag + 1, 0.0);
  std::vector<long long> split;
  std::vector<long long> cohort(n_weeks, 0);
  for (int n = 0; n < n_particles; ++n) {
    RngStream prng(particle_base, static_cast<std::uint64_t>(n), 0x9e37ULL);
    std::fill(cohort.begin(), cohort.end(), 0);
    // total IC admissions per week given the data, split back over the
    // hospital-admission weeks with the conditional (rate-weighted) kernel
    for (int s = 0; s < n_weeks; ++s) {
      const double undetected =
          (1.0 - params.zeta_ic_at(s)) * grid.lam_ic_week[s];
      const long long x_ic = obs.y_ic[s] + prng.poisson(undetected);
      if (x_ic == 0) continue;
      for (int j = 0; j <= lag; ++j)
        probs[j] = (s - j >= 0) ? grid.rho[s - j][j] : 0.0;
      prng.multinomial(x_ic, probs, split);
      for (int j = 0; j <= lag; ++j)
        if (s - j >= 0) cohort[s - j] += split[j];
    }
    // complete the hospital path: non-IC-bound admissions plus IC-bound ones
    // whose IC admission falls past the horizon
    double lw = 0.0;
    for (int t = 0; t < n_weeks; ++t) {
      const double rest =
          (1.0 - params.theta_ic) * grid.lam_h_week[t] + grid.tail[t];
      const long long x_h = cohort[t] + prng.poisson(rest);
      lw += log_binomial_pmf(obs.y_h[t], x_h, params.zeta_h_at(t));
      if (lw == kNegInf) break;
    }
    logw[n] = lw;
  }

  const double lme = log_mean_exp(logw);
  est.value = (lme == kNegInf) ? kNegInf : lp_ic + lme;
  est.mc_se = natural_se(logw, lp_ic);
  return est;
}

LogLikEstimate loglik_joint_mc_alt(const ObservationSet& obs,
                                   const ParamSet& params,
                                   const InfectionSeries& xi,
                                   const Calendar& cal, int n_particles,
                                   RngStream& rng) {
  const JointGrid grid = build_joint_grid(xi, params, cal);
  return detail::joint_mc_alt_on_grid(obs, params, grid, cal, n_particles, rng);
}

LogLikEstimate detail::joint_mc_alt_on_grid(const ObservationSet& obs,
                                            const ParamSet& params,
                                            const JointGrid& grid,
                                            const Calendar& cal,
                                            int n_particles, RngStream& rng) {
  if (n_particles < 1)
    throw std::invalid_argument("loglik_joint_mc_alt: n_particles >= 1");
  const int n_weeks = cal.n_weeks();
  const int lag = grid.max_week_lag;

  LogLikEstimate est;
  est.kind = LikKind::mc_joint_hosp_first;
  est.n_particles = n_particles;

  double lp_h = 0.0;
  for (int t = 0; t < n_weeks; ++t) {
    lp_h += log_poisson_pmf(obs.y_h[t],
                            params.zeta_h_at(t) * grid.lam_h_week[t]);
  }
  if (lp_h == kNegInf) {
    est.value = kNegInf;
    return est;
  }

  const std::uint64_t particle_base = rng.engine()();

  std::vector<double> logw(n_particles, 0.0);
  std::vector<double> probs(lag + 2, 0.0);  // week lags plus overflow bucket
  std::vector<long long> split;
  std::vector<long long> x_ic(n_weeks, 0);
  for (int n = 0; n < n_particles; ++n) {
    RngStream prng(particle_base, static_cast<std::uint64_t>(n), 0x51a7ULL);
    std::fill(x_ic.begin(), x_ic.end(), 0);
    for (int t = 0; t < n_weeks; ++t) {
      const double undetected =
          (1.0 - params.zeta_h_at(t)) * grid.lam_h_week[t];
      const long long x_h = obs.y_h[t] + prng.poisson(undetected);
      if (x_h == 0) continue;
      const long long ic_bound = prng.binomial(x_h, params.theta_ic);
      if (ic_bound == 0) continue;
      // forward split over IC weeks; the last bucket is past-horizon mass
      const double total = params.theta_ic * grid.lam_h_week[t];
      if (total <= 0.0) continue;
      for (int j = 0; j <= lag; ++j) probs[j] = grid.rho[t][j];
      probs[lag + 1] = grid.tail[t];
      prng.multinomial(ic_bound, probs, split);
      for (int j = 0; j <= lag; ++j)
        if (t + j < n_weeks) x_ic[t + j] += split[j];
    }
    double lw = 0.0;
    for (int s = 0; s < n_weeks; ++s) {
      lw += log_binomial_pmf(obs.y_ic[s], x_ic[s], params.zeta_ic_at(s));
      if (lw == kNegInf) break;
    }
    logw[n] = lw;
  }

  const double lme = log_mean_exp(logw);
  est.value = (lme == kNegInf) ? kNegInf : lp_h + lme;
  est.mc_se = natural_se(logw, lp_h);
  return est;
}

LogLikEstimate loglik_brute_force(const ObservationSet& obs,
                                  const ParamSet& params,
                                  const InfectionSeries& xi,
                                  const Calendar& cal, long long max_count) {
  const JointGrid grid = build_joint_grid(xi, params, cal);
  return detail::brute_force_on_grid(obs, params, grid, cal, max_count);
}

LogLikEstimate detail::brute_force_on_grid(const ObservationSet& obs,
                                           const ParamSet& params,
                                           const JointGrid& grid,
                                           const Calendar& cal,
                                           long long max_count) {
  const int n_weeks = cal.n_weeks();
  const int lag = grid.max_week_lag;
  constexpr double kTailMass = 1e-14;

  if (n_weeks > 4)
    throw InfeasibleSizeError(
        "brute force requires at most 4 weeks, got " + std::to_string(n_weeks));

  // per-cell truncation bounds
  std::vector<std::vector<long long>> caps(n_weeks);
  for (int t = 0; t < n_weeks; ++t) {
    caps[t].resize(lag + 1);
    for (int j = 0; j <= lag; ++j) {
      caps[t][j] = grid.rho[t][j] > 0.0
                       ? poisson_upper_quantile(grid.rho[t][j], kTailMass)
                       : 0;
      if (caps[t][j] > max_count)
        throw InfeasibleSizeError(
            "brute force truncation bound " + std::to_string(caps[t][j]) +
            " exceeds max_count " + std::to_string(max_count));
    }
  }

  // residual hospital mass: non-IC-bound plus IC-bound landing past horizon
  // h[t][a] = sum_b Pois(b; mu_t) Bin(y_h[t]; a + b, zeta_h[t])
  std::vector<std::vector<double>> hmarg(n_weeks);
  for (int t = 0; t < n_weeks; ++t) {
    const double mu = (1.0 - params.theta_ic) * grid.lam_h_week[t] +
                      grid.tail[t];
    const long long bmax = poisson_upper_quantile(mu, kTailMass);
    long long amax = 0;
    for (int j = 0; j <= lag; ++j) amax += caps[t][j];
    hmarg[t].assign(amax + 1, 0.0);
    for (long long a = 0; a <= amax; ++a) {
      double acc = 0.0;
      for (long long b = 0; b <= bmax; ++b) {
        const double lp = log_poisson_pmf(b, mu) +
                          log_binomial_pmf(obs.y_h[t], a + b,
                                           params.zeta_h_at(t));
        if (lp != kNegInf) acc += std::exp(lp);
      }
      hmarg[t][a] = acc;
    }
  }

  // DP over hospital weeks; the state is the vector of pending IC
  // contributions to the next `lag` weeks, packed 8 bits per week.
  auto pack = [&](const std::vector<long long>& pending) {
    std::uint64_t key = 0;
    for (int j = 0; j < lag; ++j)
      key = (key << 8) | static_cast<std::uint64_t>(pending[j] & 0xff);
    return key;
  };
  if (lag > 8)
    throw InfeasibleSizeError("brute force supports week lags up to 8");

  std::unordered_map<std::uint64_t, double> states;
  states[0] = 1.0;
  std::vector<long long> cells(lag + 1, 0);
  std::vector<long long> pending(lag, 0), next_pending(lag, 0);

  for (int t = 0; t < n_weeks; ++t) {
    std::unordered_map<std::uint64_t, double> next_states;
    // enumerate the week-t cell vector by odometer
    std::fill(cells.begin(), cells.end(), 0);
    while (true) {
      double cell_p = 1.0;
      long long a = 0;
      for (int j = 0; j <= lag; ++j) {
        cell_p *= std::exp(log_poisson_pmf(cells[j], grid.rho[t][j]));
        a += cells[j];
      }
      if (cell_p > 0.0) {
        const double h_term = hmarg[t][a];
        for (const auto& [key, p] : states) {
          // unpack pending
          std::uint64_t k = key;
          for (int j = lag - 1; j >= 0; --j) {
            pending[j] = static_cast<long long>(k & 0xff);
            k >>= 8;
          }
          const long long x_ic_t = pending.empty() ? cells[0]
                                                   : pending[0] + cells[0];
          const double obs_ic = std::exp(
              log_binomial_pmf(obs.y_ic[t], x_ic_t, params.zeta_ic_at(t)));
          const double w = p * cell_p * h_term * obs_ic;
          if (w == 0.0) continue;
          for (int j = 0; j < lag; ++j) {
            const long long carried = (j + 1 < lag) ? pending[j + 1] : 0;
            next_pending[j] = carried + cells[j + 1];
            if (next_pending[j] > 0xff)
              throw InfeasibleSizeError("brute force pending count overflow");
          }
          auto [it, inserted] = next_states.try_emplace(pack(next_pending), 0.0);
          it->second += w;
        }
      }
      // odometer increment
      int j = 0;
      while (j <= lag && ++cells[j] > caps[t][j]) {
        cells[j] = 0;
        ++j;
      }
      if (j > lag) break;
    }
    states = std::move(next_states);
  }

  double total = 0.0;
  for (const auto& [key, p] : states) total += p;

  LogLikEstimate est;
  est.kind = LikKind::brute_force;
  est.n_particles = 1;
  est.mc_se = 0.0;
  est.value = total > 0.0 ? std::log(total) : kNegInf;
  return est;
}

namespace {

// transmission solve + rates + weekly grid, reusable while the rate-relevant
// parameters stay put (delay pmfs are assumed fixed per likelihood binding).
// Two slots because MCWM alternates between the current and proposed points.
struct RateBundle {
  struct Slot {
    std::array<double, 10> key{};
    bool valid = false;
    InfectionSeries xi;
    MarginalRates rates;
    JointGrid grid;
  };
  Slot slots[2];
  int last_used = 0;

  static std::array<double, 10> key_of(const ParamSet& p) {
    return {p.beta, p.pi, p.iota, p.sigma, p.gamma, p.kappa, p.n_pop,
            p.theta_h, p.theta_ic, p.theta_f};
  }

  const Slot& refresh(const ParamSet& params, const Calendar& cal,
                      StageCounts stages, int substeps) {
    const auto k = key_of(params);
    for (int i = 0; i < 2; ++i) {
      if (slots[i].valid && slots[i].key == k) {
        last_used = i;
        return slots[i];
      }
    }
    Slot& slot = slots[1 - last_used];
    slot.xi = solve_transmission(params, cal, stages, substeps);
    slot.rates = marginal_rates(slot.xi, params);
    slot.grid = build_joint_grid(slot.xi, params, cal);
    slot.key = k;
    slot.valid = true;
    last_used = 1 - last_used;
    return slot;
  }
};

LogLikEstimate full_likelihood_impl(const ObservationSet& obs,
                                    const ParamSet& params,
                                    const Calendar& cal, StageCounts stages,
                                    StreamFlags flags, HospIcMode mode,
                                    int n_particles, RngStream& rng,
                                    int substeps, RateBundle& bundle) {
  LogLikEstimate est;
  est.kind = LikKind::exact_independent;
  est.n_particles = 1;
  if (!flags.hosp_ic && !flags.gp && !flags.virology) {
    est.value = 0.0;
    return est;
  }

  const RateBundle::Slot& slot = bundle.refresh(params, cal, stages, substeps);
  double closed_form = 0.0;

  if (flags.gp || flags.virology) {
    const BackgroundModel bg = BackgroundModel::from_params(params);
    if (flags.gp) {
      if (!obs.y_g)
        throw std::invalid_argument("GP stream enabled but no GP data loaded");
      std::vector<double> rate(cal.n_days());
      for (int u = 0; u < cal.n_days(); ++u) {
        rate[u] = params.zeta_g_at(cal.day_of_week(u)) *
                  (slot.rates.lambda_f[u] + bg.daily_rate(cal.week_of(u)));
      }
      closed_form += loglik_poisson_series(*obs.y_g, rate);
    }
    if (flags.virology) {
      const auto p = virology_positivity(slot.rates.lambda_f, bg, cal);
      for (const auto& rec : obs.virology) {
        closed_form += log_binomial_pmf(rec.positive, rec.tested, p[rec.week]);
      }
    }
  }
  if (closed_form == kNegInf) {
    est.value = kNegInf;
    return est;
  }

  if (flags.hosp_ic) {
    LogLikEstimate joint;
    switch (mode) {
      case HospIcMode::joint:
        joint = detail::joint_mc_on_grid(obs, params, slot.grid, cal,
                                         n_particles, rng);
        break;
      case HospIcMode::joint_alt:
        joint = detail::joint_mc_alt_on_grid(obs, params, slot.grid, cal,
                                             n_particles, rng);
        break;
      case HospIcMode::independent: {
        joint.kind = LikKind::exact_independent;
        std::vector<double> rate_h(cal.n_weeks()), rate_ic(cal.n_weeks());
        for (int t = 0; t < cal.n_weeks(); ++t) {
          rate_h[t] = params.zeta_h_at(t) * slot.grid.lam_h_week[t];
          rate_ic[t] = params.zeta_ic_at(t) * slot.grid.lam_ic_week[t];
        }
        joint.value = loglik_poisson_series(obs.y_h, rate_h) +
                      loglik_poisson_series(obs.y_ic, rate_ic);
        break;
      }
      case HospIcMode::brute:
        joint = detail::brute_force_on_grid(obs, params, slot.grid, cal, 64);
        break;
    }
    est.kind = joint.kind;
    est.n_particles = joint.n_particles;
    est.value = (joint.value == kNegInf) ? kNegInf : joint.value + closed_form;
    est.mc_se = joint.mc_se * std::exp(closed_form);
    return est;
  }

  est.value = closed_form;
  return est;
}

}  // namespace

LogLikEstimate loglik_full(const ObservationSet& obs, const ParamSet& params,
                           const Calendar& cal, StageCounts stages,
                           StreamFlags flags, HospIcMode mode, int n_particles,
                           RngStream& rng, int substeps) {
  RateBundle bundle;
  return full_likelihood_impl(obs, params, cal, stages, flags, mode,
                              n_particles, rng, substeps, bundle);
}

LikelihoodFn make_likelihood(const ObservationSet& obs, const Calendar& cal,
                             StageCounts stages, StreamFlags flags,
                             HospIcMode mode, int n_particles, int substeps) {
  // captured by value so the callable owns everything it needs; the bundle is
  // per-callable state, so each chain gets its own cache
  auto bundle = std::make_shared<RateBundle>();
  return [obs, cal, stages, flags, mode, n_particles, substeps,
          bundle](const ParamSet& params, RngStream& rng) {
    return full_likelihood_impl(obs, params, cal, stages, flags, mode,
                                n_particles, rng, substeps, *bundle);
  };
}

}  // namespace epi
