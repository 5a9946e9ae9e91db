// epijoint: semi-stochastic epidemic models, dependent-stream likelihoods and
// pseudo-marginal MCMC. Subcommands: simulate, estimate-lik, fit, simstudy,
// summarize.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "epi/chain_io.hpp"
#include "epi/config.hpp"
#include "epi/likelihood.hpp"
#include "epi/obs_io.hpp"
#include "epi/simstudy.hpp"
#include "epi/transmission.hpp"

#ifndef EPIJOINT_VERSION
#define EPIJOINT_VERSION "0.1.0"
#endif

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;
constexpr int kExitInfeasible = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw epi::IoError("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_manifest(const std::string& path, const std::string& command,
                    const epi::RunConfig& cfg, const std::string& config_text,
                    const std::vector<std::string>& files) {
  json j;
  j["version"] = EPIJOINT_VERSION;
  j["command"] = command;
  j["seed"] = cfg.seed;
  char hash[32];
  std::snprintf(hash, sizeof hash, "%016llx",
                static_cast<unsigned long long>(
                    epi::config_fingerprint(config_text)));
  j["config_hash"] = hash;
  j["files"] = files;
  std::ofstream out(path);
  if (!out) throw epi::IoError("cannot open " + path);
  out << j.dump(2) << '\n';
}

epi::ObservationSet load_obs_from_config(const epi::RunConfig& cfg,
                                         const epi::Calendar& cal) {
  if (cfg.obs_weekly_path.empty())
    throw epi::ConfigError("config key obs_weekly is required for this command");
  epi::ObservationPaths paths;
  paths.weekly = cfg.obs_weekly_path;
  paths.gp = cfg.streams.gp ? cfg.obs_gp_path : "";
  paths.virology = cfg.streams.virology ? cfg.obs_virology_path : "";
  if (cfg.streams.gp && paths.gp.empty())
    throw epi::ConfigError("gp stream enabled but obs_gp not set");
  if (cfg.streams.virology && paths.virology.empty())
    throw epi::ConfigError("virology stream enabled but obs_virology not set");
  return epi::load_observations(paths, cal);
}

int cmd_simulate(const std::string& config_path, std::uint64_t seed_override,
                 bool has_seed_override, const std::string& out_dir,
                 bool emit_xi) {
  const std::string config_text = read_file(config_path);
  epi::RunConfig cfg = epi::parse_config_text(config_text);
  if (has_seed_override) cfg.seed = seed_override;

  const epi::Calendar cal = cfg.make_calendar();
  const epi::InfectionSeries xi = epi::solve_transmission(
      cfg.params, cal, cfg.stages(), cfg.transmission_substeps);

  epi::RngStream rng(cfg.seed, 0x51d0ULL);
  const epi::LatentPath path = epi::simulate_severity(xi, cfg.params, rng);

  std::vector<long long> swabs;
  if (cfg.streams.virology)
    swabs.assign(cal.n_weeks(), cfg.virology_swabs_per_week);
  const epi::MarginalRates rates = epi::marginal_rates(xi, cfg.params);
  epi::ObservationSet obs = epi::simulate_observations(
      path, cfg.params, cal, swabs, rates.lambda_f, rng);
  if (!cfg.streams.gp) obs.y_g.reset();

  std::filesystem::create_directories(out_dir);
  epi::ObservationPaths paths;
  paths.weekly = out_dir + "/obs_weekly.csv";
  if (cfg.streams.gp) paths.gp = out_dir + "/obs_gp.csv";
  if (cfg.streams.virology) paths.virology = out_dir + "/obs_virology.csv";
  epi::save_observations(obs, cal, paths);
  epi::save_xi_csv(xi, out_dir + "/xi.csv");
  epi::save_latent_csv(path, out_dir + "/latent.csv");

  std::vector<std::string> files = {paths.weekly, out_dir + "/xi.csv",
                                    out_dir + "/latent.csv"};
  if (!paths.gp.empty()) files.push_back(paths.gp);
  if (!paths.virology.empty()) files.push_back(paths.virology);
  write_manifest(out_dir + "/manifest.json", "simulate", cfg, config_text,
                 files);

  if (emit_xi) {
    std::printf("day,xi0\n");
    for (std::size_t u = 0; u < xi.xi0.size(); ++u)
      std::printf("%zu,%.17g\n", u, xi.xi0[u]);
  }
  return kExitOk;
}

int cmd_estimate_lik(const std::string& config_path, const std::string& mode,
                     int particles, std::uint64_t seed_override,
                     bool has_seed_override) {
  const std::string config_text = read_file(config_path);
  epi::RunConfig cfg = epi::parse_config_text(config_text);
  if (has_seed_override) cfg.seed = seed_override;
  if (particles > 0) cfg.particles = particles;

  epi::HospIcMode lik_mode = cfg.likelihood;
  if (mode == "independent") lik_mode = epi::HospIcMode::independent;
  else if (mode == "joint") lik_mode = epi::HospIcMode::joint;
  else if (mode == "joint-alt") lik_mode = epi::HospIcMode::joint_alt;
  else if (mode == "brute") lik_mode = epi::HospIcMode::brute;
  else if (!mode.empty())
    throw epi::ConfigError("--mode '" + mode +
                           "' violates {independent,joint,joint-alt,brute}");

  const epi::Calendar cal = cfg.make_calendar();
  const epi::ObservationSet obs = load_obs_from_config(cfg, cal);
  epi::RngStream rng(cfg.seed, 0xe571ULL);
  const epi::LogLikEstimate est =
      epi::loglik_full(obs, cfg.params, cal, cfg.stages(), cfg.streams,
                       lik_mode, cfg.particles, rng,
                       cfg.transmission_substeps);

  json j;
  j["value"] = std::isfinite(est.value) ? json(est.value) : json("-inf");
  j["kind"] = epi::to_string(est.kind);
  j["n_particles"] = est.n_particles;
  j["mc_se"] = est.mc_se;
  j["seed"] = cfg.seed;
  std::cout << j.dump() << '\n';
  return kExitOk;
}

int cmd_fit(const std::string& config_path, const std::string& algorithm,
            const std::string& out_path, const std::string& summary_path,
            std::uint64_t seed_override, bool has_seed_override) {
  const std::string config_text = read_file(config_path);
  epi::RunConfig cfg = epi::parse_config_text(config_text);
  if (has_seed_override) cfg.seed = seed_override;
  if (algorithm == "gimh") cfg.algorithm = epi::Algorithm::gimh;
  else if (algorithm == "mcwm") cfg.algorithm = epi::Algorithm::mcwm;
  else if (!algorithm.empty())
    throw epi::ConfigError("--algorithm '" + algorithm +
                           "' violates {gimh, mcwm}");
  if (cfg.free_names.empty())
    throw epi::ConfigError("config key free must list parameters to estimate");

  const epi::Calendar cal = cfg.make_calendar();
  const epi::ObservationSet obs = load_obs_from_config(cfg, cal);
  const epi::LikelihoodFn lik =
      epi::make_likelihood(obs, cal, cfg.stages(), cfg.streams, cfg.likelihood,
                           cfg.particles, cfg.transmission_substeps);
  const epi::ChainResult chain = epi::run_chain(
      cfg.initial_params(), cfg.free_params(), lik, cfg.mcmc_settings());
  epi::save_chain(chain, out_path);

  std::vector<std::string> files = {out_path};
  if (!summary_path.empty()) {
    epi::save_summary_csv(epi::summarize_chain(chain), summary_path);
    files.push_back(summary_path);
  }
  write_manifest(out_path + ".manifest.json", "fit", cfg, config_text, files);
  std::fprintf(stderr, "fit: %lld iterations, accept rate %.3f\n",
               cfg.iterations, chain.accept_rate);
  return kExitOk;
}

int cmd_simstudy(const std::string& scenario, const std::string& scale,
                 const std::string& out_dir, int datasets, long long iterations,
                 int particles, int threads, std::uint64_t seed, int weeks,
                 bool severity) {
  epi::SimStudySettings settings;
  settings.seed = seed;
  settings.threads = threads;
  settings.weeks = weeks;
  settings.severity_free = severity;
  settings.out_dir = out_dir;
  if (scale == "paper") {
    settings.n_datasets = 500;
    settings.iterations = 100000;
    settings.burnin = 20000;
    settings.n_particles = 2000;
  } else if (scale != "desk") {
    throw epi::ConfigError("--scale '" + scale + "' violates {desk, paper}");
  }
  if (datasets > 0) settings.n_datasets = datasets;
  if (iterations > 0) {
    settings.iterations = iterations;
    settings.burnin = iterations / 4;
  }
  if (particles > 0) settings.n_particles = particles;

  std::filesystem::create_directories(out_dir);
  std::vector<epi::ComparisonResult> results;
  if (scenario == "small") {
    results.push_back(
        epi::run_comparison(epi::small_dependence_scenario(), settings));
  } else if (scenario == "large") {
    results.push_back(
        epi::run_comparison(epi::large_dependence_scenario(), settings));
  } else if (scenario == "sweep") {
    results = epi::run_influential_sweep(settings);
  } else {
    throw epi::ConfigError("--scenario '" + scenario +
                           "' violates {small, large, sweep}");
  }
  epi::save_pwd_csv(results, out_dir + "/pwd.csv");
  epi::save_proportions_csv(results, out_dir + "/proportions.csv");
  for (const auto& result : results) {
    std::fprintf(stderr, "scenario %s: %d excluded, %d flagged\n",
                 result.scenario.c_str(), result.n_excluded, result.n_flagged);
    for (const auto& row : result.proportions)
      std::fprintf(stderr, "  %-10s prop(pwd_var<=0) = %.3f (n=%d)\n",
                   row.param.c_str(), row.prop_var_le0, row.n_used);
  }
  return kExitOk;
}

int cmd_summarize(const std::string& chain_path, const std::string& out_path) {
  const epi::ChainResult chain = epi::load_chain(chain_path);
  const epi::ChainSummary summary = epi::summarize_chain(chain);
  if (!out_path.empty()) epi::save_summary_csv(summary, out_path);
  std::printf("param,mean,var,median,q025,q975,r95,ess,accept_rate\n");
  for (const auto& row : summary.rows)
    std::printf("%s,%.6g,%.6g,%.6g,%.6g,%.6g,%.6g,%.1f,%.3f\n",
                row.name.c_str(), row.stats.mean, row.stats.var,
                row.stats.median, row.stats.q025, row.stats.q975,
                row.stats.r95, row.stats.ess, summary.accept_rate);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"semi-stochastic epidemic models with dependent surveillance "
               "streams: simulation, likelihood estimation, pseudo-marginal "
               "MCMC and the misspecification study"};
  app.set_version_flag("--version", EPIJOINT_VERSION);
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", out_path, summary_path;
  std::string mode, algorithm, scenario = "small", scale = "desk", chain_path;
  std::uint64_t seed = 0;
  bool emit_xi = false, severity = false;
  int particles = 0, datasets = 0, threads = 0, weeks = 33;
  long long iterations = 0;

  auto* simulate = app.add_subcommand("simulate", "forward-simulate a season");
  simulate->add_option("--config", config_path, "run configuration file")
      ->required();
  auto* sim_seed = simulate->add_option("--seed", seed, "override config seed");
  simulate->add_option("--out", out_dir, "output directory");
  simulate->add_flag("--emit-xi", emit_xi, "print xi0 CSV to stdout");

  auto* estlik = app.add_subcommand("estimate-lik",
                                    "evaluate one log-likelihood");
  estlik->add_option("--config", config_path, "run configuration file")
      ->required();
  estlik->add_option("--mode", mode,
                     "independent|joint|joint-alt|brute (default from config)");
  estlik->add_option("--particles", particles, "MC particle count");
  auto* est_seed = estlik->add_option("--seed", seed, "override config seed");

  auto* fit = app.add_subcommand("fit", "run a pseudo-marginal chain");
  fit->add_option("--config", config_path, "run configuration file")
      ->required();
  fit->add_option("--algorithm", algorithm, "gimh|mcwm (default from config)");
  fit->add_option("--out", out_path, "chain output (JSON lines)")->required();
  fit->add_option("--summary", summary_path, "also write a summary CSV");
  auto* fit_seed = fit->add_option("--seed", seed, "override config seed");

  auto* study = app.add_subcommand("simstudy",
                                   "dependence misspecification study");
  study->add_option("--scenario", scenario, "small|large|sweep")->required();
  study->add_option("--scale", scale, "desk|paper (default desk)");
  study->add_option("--out", out_dir, "output directory")->required();
  study->add_option("--datasets", datasets, "override dataset count");
  study->add_option("--iterations", iterations, "override chain length");
  study->add_option("--particles", particles, "override particle count");
  study->add_option("--threads", threads, "worker thread cap");
  study->add_option("--seed", seed, "study seed (default 1)");
  study->add_option("--weeks", weeks, "observation weeks (default 33)");
  study->add_flag("--severity", severity,
                  "estimate theta_h/theta_ic alongside transmission");

  auto* summarize = app.add_subcommand("summarize", "summarize a saved chain");
  summarize->add_option("--chain", chain_path, "chain JSONL file")->required();
  summarize->add_option("--out", out_path, "summary CSV path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed())
      return cmd_simulate(config_path, seed, !sim_seed->empty(), out_dir,
                          emit_xi);
    if (estlik->parsed())
      return cmd_estimate_lik(config_path, mode, particles, seed,
                              !est_seed->empty());
    if (fit->parsed())
      return cmd_fit(config_path, algorithm, out_path, summary_path, seed,
                     !fit_seed->empty());
    if (study->parsed())
      return cmd_simstudy(scenario, scale, out_dir, datasets, iterations,
                          particles, threads, seed == 0 ? 1 : seed, weeks,
                          severity);
    if (summarize->parsed()) return cmd_summarize(chain_path, out_path);
  } catch (const epi::InfeasibleSizeError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitInfeasible;
  } catch (const epi::ConfigError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitValidation;
  } catch (const epi::IoError& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitValidation;
  } catch (const std::invalid_argument& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitValidation;
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return kExitRuntime;
  }
  return kExitOk;
}
