#include "epi/simstudy.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "epi/chain_io.hpp"
#include "epi/likelihood.hpp"
#include "epi/obs_io.hpp"
#include "epi/transmission.hpp"

namespace epi {

Scenario small_dependence_scenario() {
  return Scenario{"small", 0.1, 0.1, 0.1, 0.1};
}

Scenario large_dependence_scenario() {
  return Scenario{"large", 0.5, 0.9, 0.3, 0.9};
}

ParamSet scenario_params(const Scenario& scenario) {
  ParamSet p;  // defaults already carry the common transmission values
  p.theta_h = scenario.theta_h;
  p.theta_ic = scenario.theta_ic;
  p.zeta_h.assign(1, scenario.zeta_h);
  p.zeta_ic.assign(1, scenario.zeta_ic);
  p.delay_inf_to_hosp = discretize_exponential(0.3);
  p.delay_hosp_to_ic = discretize_exponential(0.4);
  p.delay_inf_to_gp = discretize_exponential(0.5);
  return p;
}

std::vector<ObservationSet> generate_scenario_data(const Scenario& scenario,
                                                   int n_datasets,
                                                   std::uint64_t seed,
                                                   const Calendar& cal) {
  const ParamSet params = scenario_params(scenario);
  const InfectionSeries xi = solve_transmission(params, cal);
  std::vector<ObservationSet> datasets;
  datasets.reserve(n_datasets);
  for (int d = 0; d < n_datasets; ++d) {
    RngStream rng(seed, 0xda7aULL, static_cast<std::uint64_t>(d));
    const LatentPath path = simulate_severity(xi, params, rng);
    ObservationSet obs = simulate_observations(path, params, cal, {}, {}, rng);
    obs.y_g.reset();  // the comparison uses the hospital/IC streams only
    datasets.push_back(std::move(obs));
  }
  return datasets;
}

namespace {

std::vector<FreeParam> study_free_params(bool severity_free) {
  std::vector<FreeParam> free;
  free.push_back({"beta", {PriorFamily::lognormal, -0.5, 1.0}});
  free.push_back({"pi", {PriorFamily::beta, 1.0, 1.0}});
  free.push_back({"iota", {PriorFamily::lognormal, std::log(1e-4), 2.0}});
  if (severity_free) {
    free.push_back({"theta_h", {PriorFamily::beta, 1.0, 1.0}});
    free.push_back({"theta_ic", {PriorFamily::beta, 1.0, 1.0}});
  }
  return free;
}

struct FitOutcome {
  bool ok = false;
  bool low_ess = false;
  std::map<std::string, ParamSummary> stats;
};

FitOutcome fit_one(const ObservationSet& obs, const Calendar& cal,
                   const ParamSet& truth, const std::vector<FreeParam>& free,
                   HospIcMode mode, const SimStudySettings& settings,
                   std::uint64_t seed, const std::string& chain_path) {
  MCMCSettings mcmc;
  mcmc.algorithm = Algorithm::mcwm;  // matches the simulation-study setup
  mcmc.n_iter = settings.iterations;
  mcmc.n_burnin = settings.burnin;
  mcmc.n_particles = settings.n_particles;
  mcmc.seed = seed;
  mcmc.adapt = true;
  mcmc.proposal_sd.assign(free.size(), 0.08);
  mcmc.deterministic_likelihood = (mode == HospIcMode::independent);

  const LikelihoodFn lik =
      make_likelihood(obs, cal, StageCounts{1, 1}, StreamFlags{true, false, false},
                      mode, settings.n_particles);
  FitOutcome outcome;
  try {
    const ChainResult chain = run_chain(truth, free, lik, mcmc);
    if (!chain_path.empty()) save_chain(chain, chain_path);
    for (const auto& fp : free) {
      const auto draws = chain.draws(fp.name);
      const ParamSummary s = summarize(draws);
      if (s.ess < settings.ess_flag_threshold) outcome.low_ess = true;
      outcome.stats[fp.name] = s;
    }
    outcome.ok = true;
  } catch (const InitializationError&) {
    outcome.ok = false;
  }
  return outcome;
}

ComparisonResult compare_scenario(const Scenario& scenario,
                                  const SimStudySettings& settings) {
  const Calendar cal = Calendar::from_weeks(settings.weeks);
  const ParamSet truth = scenario_params(scenario);
  const auto datasets = generate_scenario_data(scenario, settings.n_datasets,
                                               settings.seed, cal);
  const auto free = study_free_params(settings.severity_free);

  if (!settings.out_dir.empty()) {
    std::filesystem::create_directories(settings.out_dir);
    for (std::size_t d = 0; d < datasets.size(); ++d) {
      ObservationPaths paths;
      paths.weekly = settings.out_dir + "/" + scenario.name + "_d" +
                     std::to_string(d) + "_obs.csv";
      save_observations(datasets[d], cal, paths);
    }
  }

  struct Slot {
    FitOutcome joint, indep;
  };
  std::vector<Slot> slots(datasets.size());

  // (dataset, mode) work queue; per-task seeds keep results order-independent
  std::atomic<int> next_task{0};
  const int n_tasks = static_cast<int>(datasets.size()) * 2;
  auto worker = [&]() {
    for (;;) {
      const int task = next_task.fetch_add(1);
      if (task >= n_tasks) return;
      const int d = task / 2;
      const bool joint = (task % 2) == 0;
      const HospIcMode mode =
          joint ? HospIcMode::joint : HospIcMode::independent;
      const std::uint64_t seed =
          splitmix64(settings.seed ^ (0xf17ULL + 2 * d + (joint ? 0 : 1)));
      std::string chain_path;
      if (!settings.out_dir.empty()) {
        chain_path = settings.out_dir + "/" + scenario.name + "_d" +
                     std::to_string(d) + (joint ? "_joint" : "_indep") +
                     ".jsonl";
      }
      FitOutcome outcome = fit_one(datasets[d], cal, truth, free, mode,
                                   settings, seed, chain_path);
      if (joint)
        slots[d].joint = std::move(outcome);
      else
        slots[d].indep = std::move(outcome);
    }
  };

  int n_threads = settings.threads > 0
                      ? settings.threads
                      : static_cast<int>(std::thread::hardware_concurrency());
  if (n_threads < 1) n_threads = 1;
  n_threads = std::min(n_threads, n_tasks);
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  ComparisonResult result;
  result.scenario = scenario.name;
  std::map<std::string, std::pair<int, int>> counts;  // param -> (var<=0, r95<=0)
  std::map<std::string, int> used;
  for (std::size_t d = 0; d < slots.size(); ++d) {
    const Slot& slot = slots[d];
    if (!slot.joint.ok || !slot.indep.ok) {
      ++result.n_excluded;
      continue;
    }
    if (slot.joint.low_ess || slot.indep.low_ess) ++result.n_flagged;
    for (const auto& fp : free) {
      const ParamSummary& sj = slot.joint.stats.at(fp.name);
      const ParamSummary& si = slot.indep.stats.at(fp.name);
      PwdRecord rec;
      rec.dataset = static_cast<int>(d);
      rec.param = fp.name;
      rec.pwd_var = sj.var - si.var;
      rec.pwd_r95 = sj.r95 - si.r95;
      counts[fp.name].first += rec.pwd_var <= 0.0 ? 1 : 0;
      counts[fp.name].second += rec.pwd_r95 <= 0.0 ? 1 : 0;
      ++used[fp.name];
      result.records.push_back(std::move(rec));
    }
  }
  for (const auto& fp : free) {
    ProportionRow row;
    row.param = fp.name;
    row.n_used = used[fp.name];
    if (row.n_used > 0) {
      row.prop_var_le0 =
          static_cast<double>(counts[fp.name].first) / row.n_used;
      row.prop_r95_le0 =
          static_cast<double>(counts[fp.name].second) / row.n_used;
    }
    result.proportions.push_back(std::move(row));
  }
  return result;
}

}  // namespace

ComparisonResult run_comparison(const Scenario& scenario,
                                const SimStudySettings& settings) {
  return compare_scenario(scenario, settings);
}

std::vector<ComparisonResult> run_influential_sweep(
    const SimStudySettings& settings) {
  const Scenario base = small_dependence_scenario();
  const Scenario large = large_dependence_scenario();
  std::vector<Scenario> raised;
  {
    Scenario s = base;
    s.name = "raise_theta_h";
    s.theta_h = large.theta_h;
    raised.push_back(s);
  }
  {
    Scenario s = base;
    s.name = "raise_theta_ic";
    s.theta_ic = large.theta_ic;
    raised.push_back(s);
  }
  {
    Scenario s = base;
    s.name = "raise_zeta_h";
    s.zeta_h = large.zeta_h;
    raised.push_back(s);
  }
  {
    Scenario s = base;
    s.name = "raise_zeta_ic";
    s.zeta_ic = large.zeta_ic;
    raised.push_back(s);
  }
  std::vector<ComparisonResult> results;
  for (const auto& scenario : raised)
    results.push_back(compare_scenario(scenario, settings));
  return results;
}

void save_pwd_csv(const std::vector<ComparisonResult>& results,
                  const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << "scenario,dataset,param,pwd_var,pwd_r95\n";
  char buf[256];
  for (const auto& result : results) {
    for (const auto& rec : result.records) {
      std::snprintf(buf, sizeof buf, "%s,%d,%s,%.17g,%.17g\n",
                    result.scenario.c_str(), rec.dataset, rec.param.c_str(),
                    rec.pwd_var, rec.pwd_r95);
      out << buf;
    }
  }
}

void save_proportions_csv(const std::vector<ComparisonResult>& results,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path);
  out << "scenario,param,prop_var_le0,prop_r95_le0,n_used,n_excluded,n_flagged\n";
  char buf[256];
  for (const auto& result : results) {
    for (const auto& row : result.proportions) {
      std::snprintf(buf, sizeof buf, "%s,%s,%.6g,%.6g,%d,%d,%d\n",
                    result.scenario.c_str(), row.param.c_str(),
                    row.prop_var_le0, row.prop_r95_le0, row.n_used,
                    result.n_excluded, result.n_flagged);
      out << buf;
    }
  }
}

}  // namespace epi
