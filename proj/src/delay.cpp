#include "epi/delay.hpp"

#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <stdexcept>

namespace epi {

double DelayPmf::sum() const {
  double acc = 0.0;
  for (double p : probs) acc += p;
  return acc;
}

DelayFamily delay_family_from_string(const std::string& name) {
  if (name == "exponential" || name == "exp") return DelayFamily::exponential;
  if (name == "gamma") return DelayFamily::gamma;
  throw std::invalid_argument("unknown delay family '" + name +
                              "' (expected exponential|gamma)");
}

namespace {

double cdf_at(DelayFamily family, double shape, double rate, double x) {
  if (x <= 0.0) return 0.0;
  switch (family) {
    case DelayFamily::exponential:
      return -std::expm1(-rate * x);
    case DelayFamily::gamma:
      return boost::math::cdf(boost::math::gamma_distribution<double>(
                                  shape, 1.0 / rate),
                              x);
  }
  return 0.0;
}

}  // namespace

DelayPmf discretize_delay(DelayFamily family, double shape, double rate,
                          double delta, double tail_tol) {
  if (rate <= 0.0 || !(std::isfinite(rate)))
    throw std::invalid_argument("discretize_delay: rate must be positive");
  if (family == DelayFamily::gamma && (shape <= 0.0 || !std::isfinite(shape)))
    throw std::invalid_argument("discretize_delay: shape must be positive");
  if (delta <= 0.0)
    throw std::invalid_argument("discretize_delay: delta must be positive");
  if (!(tail_tol > 0.0) || tail_tol > 1e-3)
    throw std::invalid_argument("discretize_delay: tail_tol outside (0, 1e-3]");

  DelayPmf pmf;
  pmf.delta = delta;
  double cdf_lo = 0.0;
  for (int d = 0;; ++d) {
    const double cdf_hi = cdf_at(family, shape, rate, delta * (d + 1));
    pmf.probs.push_back(cdf_hi - cdf_lo);
    cdf_lo = cdf_hi;
    if (1.0 - cdf_hi < tail_tol) break;
    if (d > 1000000)
      throw std::runtime_error("discretize_delay: support did not truncate");
  }
  const double total = cdf_lo;
  for (double& p : pmf.probs) p /= total;
  return pmf;
}

}  // namespace epi
