#include "epi/transmission.hpp"

#include <cmath>
#include <stdexcept>

namespace epi {

namespace {

// 1 - exp(-x) for x >= 0; series branch keeps the substep loop free of libm
// calls (relative error < 1e-13 on the branch)
inline double one_minus_exp_neg(double x) {
  if (x < 6e-3)
    return x * (1.0 - x * 0.5 * (1.0 - x / 3.0 * (1.0 - 0.25 * x)));
  return -std::expm1(-x);
}

template <int kME, int kMI>
void integrate(const ParamSet& params, const Calendar& cal, int substeps,
               TransmissionTrajectory& traj) {
  const double n = params.n_pop;
  const double seed_per_stage = params.iota * n / (kME + kMI);

  double s = (1.0 - params.pi - params.iota) * n;
  double r = params.pi * n;
  double e[2] = {0.0, 0.0};
  double i[2] = {0.0, 0.0};
  for (int k = 0; k < kME; ++k) e[k] = seed_per_stage;
  for (int k = 0; k < kMI; ++k) i[k] = seed_per_stage;

  const double h = 1.0 / substeps;
  const double frac_e = one_minus_exp_neg(kME * params.sigma * h);
  const double frac_i = one_minus_exp_neg(kMI * params.gamma * h);
  const double beta_h = params.beta * h / n;
  const double kappa = params.kappa;

  const int n_days = cal.n_days();
  auto record = [&](int u) {
    traj.s[u] = s;
    traj.e_total[u] = e[0] + e[1];
    traj.i_total[u] = i[0] + i[1];
    traj.r[u] = r;
  };
  record(0);

  for (int u = 0; u < n_days; ++u) {
    const double scaled_beta = cal.in_closure(u) ? beta_h * kappa : beta_h;
    double day_new = 0.0;
    for (int step = 0; step < substeps; ++step) {
      const double infectious = (kMI == 2) ? i[0] + i[1] : i[0];
      const double new_inf = s * one_minus_exp_neg(scaled_beta * infectious);
      const double out_e0 = e[0] * frac_e;
      const double out_i0 = i[0] * frac_i;
      s -= new_inf;
      if constexpr (kME == 2) {
        const double out_e1 = e[1] * frac_e;
        e[0] += new_inf - out_e0;
        e[1] += out_e0 - out_e1;
        i[0] += out_e1 - out_i0;
      } else {
        e[0] += new_inf - out_e0;
        i[0] += out_e0 - out_i0;
      }
      if constexpr (kMI == 2) {
        const double out_i1 = i[1] * frac_i;
        i[1] += out_i0 - out_i1;
        r += out_i1;
      } else {
        r += out_i0;
      }
      day_new += new_inf;
    }
    traj.xi.xi0[u] = day_new;
    record(u + 1);
  }
}

}  // namespace

double InfectionSeries::total() const {
  double acc = 0.0;
  for (double v : xi0) acc += v;
  return acc;
}

TransmissionTrajectory solve_transmission_full(const ParamSet& params,
                                               const Calendar& cal,
                                               StageCounts stages,
                                               int substeps) {
  if (stages.m_e < 1 || stages.m_e > 2 || stages.m_i < 1 || stages.m_i > 2)
    throw std::invalid_argument("solve_transmission: stages must be 1 or 2");
  if (substeps < 1)
    throw std::invalid_argument("solve_transmission: substeps must be >= 1");

  TransmissionTrajectory traj;
  const int n_days = cal.n_days();
  traj.xi.xi0.assign(n_days, 0.0);
  traj.s.assign(n_days + 1, 0.0);
  traj.e_total.assign(n_days + 1, 0.0);
  traj.i_total.assign(n_days + 1, 0.0);
  traj.r.assign(n_days + 1, 0.0);

  if (stages.m_e == 1 && stages.m_i == 1)
    integrate<1, 1>(params, cal, substeps, traj);
  else if (stages.m_e == 1)
    integrate<1, 2>(params, cal, substeps, traj);
  else if (stages.m_i == 1)
    integrate<2, 1>(params, cal, substeps, traj);
  else
    integrate<2, 2>(params, cal, substeps, traj);
  return traj;
}

InfectionSeries solve_transmission(const ParamSet& params, const Calendar& cal,
                                   StageCounts stages, int substeps) {
  return solve_transmission_full(params, cal, stages, substeps).xi;
}

double reproduction_number(const ParamSet& params) {
  return params.beta / params.gamma * (1.0 - params.pi);
}

}  // namespace epi
