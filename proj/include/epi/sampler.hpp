#ifndef EPI_SAMPLER_HPP
#define EPI_SAMPLER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "epi/likelihood.hpp"
#include "epi/params.hpp"
#include "epi/rng.hpp"
#include "epi/stats.hpp"

namespace epi {

// ---- priors ---------------------------------------------------------------

enum class PriorFamily { uniform, beta, gamma, lognormal, normal, fixed };

struct PriorSpec {
  PriorFamily family = PriorFamily::uniform;
  double a = 0.0;  // lower / alpha / shape / mu, by family
  double b = 1.0;  // upper / beta / rate / sigma, by family

  double logpdf(double x) const;
  double sample(RngStream& rng) const;
};

PriorSpec parse_prior(const std::string& text);  // e.g. "beta(1, 1)"
std::string to_string(const PriorSpec& prior);

// ---- transforms -----------------------------------------------------------

enum class Transform { identity, log, logit };

double to_unconstrained(Transform tr, double x);
double from_unconstrained(Transform tr, double z);
// log |dx/dz| evaluated at the natural-scale value x
double transform_log_jacobian(Transform tr, double x);

// Named accessor into ParamSet plus the transform the sampler uses for it.
struct ParamAccessor {
  Transform transform;
  double (*get)(const ParamSet&);
  void (*set)(ParamSet&, double);
};

const ParamAccessor& param_accessor(const std::string& name);
std::vector<std::string> sampleable_params();

// ---- chain ----------------------------------------------------------------

enum class Algorithm { gimh, mcwm };

struct MCMCSettings {
  Algorithm algorithm = Algorithm::gimh;
  long long n_iter = 10000;
  long long n_burnin = 1000;
  // proposal standard deviations on the transformed scale, one per free
  // parameter (diagonal covariance); scaled adaptively during burn-in when
  // adapt is set, frozen afterwards
  std::vector<double> proposal_sd;
  bool adapt = true;
  double target_accept = 0.234;
  int n_particles = 2000;
  std::uint64_t seed = 1;
  int init_retries = 10;
  long long progress_every = 0;  // 0 = silent
  // exact likelihoods make the MCWM current-side refresh a no-op; set this to
  // skip it (MCWM then coincides with plain MH)
  bool deterministic_likelihood = false;
};

struct FreeParam {
  std::string name;
  PriorSpec prior;
};

struct ChainRecord {
  long long iter = 0;
  bool post_burnin = false;
  bool accepted = false;
  double log_lik = 0.0;
  double mc_se = 0.0;
  double log_prior = 0.0;
  std::vector<double> values;  // aligned with ChainResult::param_names
};

struct ChainResult {
  std::vector<std::string> param_names;
  std::vector<ChainRecord> records;
  double accept_rate = 0.0;     // post-burn-in acceptance rate
  double final_scale = 1.0;     // adapted proposal scale factor
  LikKind lik_kind = LikKind::exact_independent;
  int n_particles = 1;

  std::vector<double> draws(const std::string& name,
                            bool post_burnin_only = true) const;
};

struct InitializationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pseudo-marginal Metropolis-Hastings with Gaussian random-walk proposals on
// the transformed scale. GIMH retains the accepted likelihood estimate; MCWM
// re-estimates both sides every iteration.
ChainResult run_chain(const ParamSet& init, const std::vector<FreeParam>& free,
                      const LikelihoodFn& lik, const MCMCSettings& settings);

struct ChainSummaryRow {
  std::string name;
  ParamSummary stats;
};

struct ChainSummary {
  std::vector<ChainSummaryRow> rows;
  double accept_rate = 0.0;
  long long n_samples = 0;
};

ChainSummary summarize_chain(const ChainResult& chain);

}  // namespace epi

#endif
