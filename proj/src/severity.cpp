#include "epi/severity.hpp"

#include <stdexcept>

#include "epi/kernels.hpp"

namespace epi {

std::vector<long long> sample_cohort_poisson(const InfectionSeries& xi,
                                             double theta, RngStream& rng) {
  std::vector<long long> cohort(xi.xi0.size(), 0);
  for (std::size_t u = 0; u < xi.xi0.size(); ++u)
    cohort[u] = rng.poisson(theta * xi.xi0[u]);
  return cohort;
}

ConvolveDraw split_and_convolve(const std::vector<long long>& cohort,
                                const DelayPmf& pmf, RngStream& rng) {
  ConvolveDraw draw;
  draw.events.assign(cohort.size(), 0);
  const std::size_t n = cohort.size();
  std::vector<long long> split;
  for (std::size_t t = 0; t < n; ++t) {
    if (cohort[t] == 0) continue;
    rng.multinomial(cohort[t], pmf.probs, split);
    for (std::size_t d = 0; d < split.size(); ++d) {
      if (split[d] == 0) continue;
      const std::size_t arrive = t + d;
      if (arrive < n)
        draw.events[arrive] += split[d];
      else
        draw.overflow += split[d];
    }
  }
  return draw;
}

std::vector<long long> sample_binomial_transition(const std::vector<long long>& x,
                                                  double theta,
                                                  RngStream& rng) {
  std::vector<long long> out(x.size(), 0);
  for (std::size_t t = 0; t < x.size(); ++t) out[t] = rng.binomial(x[t], theta);
  return out;
}

LatentPath simulate_severity(const InfectionSeries& xi, const ParamSet& params,
                             RngStream& rng) {
  LatentPath path;
  path.x0h = sample_cohort_poisson(xi, params.theta_h, rng);
  ConvolveDraw hosp = split_and_convolve(path.x0h, params.delay_inf_to_hosp, rng);
  path.xh = std::move(hosp.events);
  path.xh_overflow = hosp.overflow;

  path.xh_ic_cohort = sample_binomial_transition(path.xh, params.theta_ic, rng);
  ConvolveDraw ic = split_and_convolve(path.xh_ic_cohort,
                                       params.delay_hosp_to_ic, rng);
  path.xic = std::move(ic.events);
  path.xic_overflow = ic.overflow;

  path.x0f = sample_cohort_poisson(xi, params.theta_f, rng);
  ConvolveDraw gp = split_and_convolve(path.x0f, params.delay_inf_to_gp, rng);
  path.xf = std::move(gp.events);
  path.xf_overflow = gp.overflow;
  return path;
}

MarginalRates marginal_rates(const InfectionSeries& xi,
                             const ParamSet& params) {
  MarginalRates rates;
  const auto& f_h = params.delay_inf_to_hosp.probs;
  const auto& f_ic = params.delay_hosp_to_ic.probs;
  const auto& f_gp = params.delay_inf_to_gp.probs;
  const std::size_t n = xi.xi0.size();

  rates.lambda_h.resize(n);
  kernels::convolve(xi.xi0.data(), n, f_h.data(), f_h.size(), params.theta_h,
                    rates.lambda_h.data());

  // double convolution via the combined infection->IC delay pmf
  std::vector<double> combined(f_h.size() + f_ic.size() - 1, 0.0);
  for (std::size_t d = 0; d < f_h.size(); ++d)
    for (std::size_t g = 0; g < f_ic.size(); ++g)
      combined[d + g] += f_h[d] * f_ic[g];
  rates.lambda_ic.resize(n);
  kernels::convolve(xi.xi0.data(), n, combined.data(), combined.size(),
                    params.theta_ic * params.theta_h, rates.lambda_ic.data());

  rates.lambda_f.resize(n);
  kernels::convolve(xi.xi0.data(), n, f_gp.data(), f_gp.size(), params.theta_f,
                    rates.lambda_f.data());
  return rates;
}

}  // namespace epi
