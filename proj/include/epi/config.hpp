#ifndef EPI_CONFIG_HPP
#define EPI_CONFIG_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "epi/calendar.hpp"
#include "epi/likelihood.hpp"
#include "epi/params.hpp"
#include "epi/sampler.hpp"

namespace epi {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fully-validated run configuration. Parsed from the key = value format
// described in the README ([section] headers prefix keys with "section.").
struct RunConfig {
  std::uint64_t seed = 1;
  int threads = 0;  // 0 = hardware concurrency

  int weeks = 33;
  std::vector<std::pair<int, int>> closures;

  int m_e = 1;
  int m_i = 1;
  int transmission_substeps = 1000;

  StreamFlags streams;                       // default: hosp_ic only
  HospIcMode likelihood = HospIcMode::joint;

  Algorithm algorithm = Algorithm::gimh;
  long long iterations = 10000;
  long long burnin = 1000;
  int particles = 2000;
  bool adapt = true;
  std::vector<double> proposal_sd;  // empty = default 0.1 each
  long long progress_every = 0;

  ParamSet params;  // true/fixed values, delays discretized
  std::vector<std::string> free_names;
  std::map<std::string, PriorSpec> priors;   // per free parameter
  std::map<std::string, double> init_values; // optional chain starting point

  long long virology_swabs_per_week = 100;

  std::string obs_weekly_path;
  std::string obs_gp_path;
  std::string obs_virology_path;

  Calendar make_calendar() const { return Calendar(weeks * 7, closures); }
  StageCounts stages() const { return StageCounts{m_e, m_i}; }
  std::vector<FreeParam> free_params() const;
  ParamSet initial_params() const;
  MCMCSettings mcmc_settings() const;
};

// Parse + validate. Unknown keys are rejected; the EPIJOINT_SEED environment
// variable overrides the configured seed.
RunConfig load_config(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// FNV-1a over the canonicalized key/value view; stable across key reordering.
std::uint64_t config_fingerprint(const std::string& text);

}  // namespace epi

#endif
