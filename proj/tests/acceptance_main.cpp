// Acceptance suite: one line per criterion, nonzero exit if any executed
// criterion fails. Criteria 4, 5 and 8 take hours at desk scale and only run
// with --long (or --only N).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstring>
#include <string>
#include <thread>
#include <vector>

#include "epi/chain_io.hpp"
#include "epi/likelihood.hpp"
#include "epi/mathfn.hpp"
#include "epi/sampler.hpp"
#include "epi/simstudy.hpp"
#include "epi/stats.hpp"
#include "epi/transmission.hpp"
#include "test_util.hpp"

using namespace epi;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
  std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void skip(int criterion, const std::string& detail) {
  std::printf("SKIP criterion %d: %s (desk-scale run, enable with --long)\n",
              criterion, detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
  char buf[512];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

// ---- shared instances -------------------------------------------------------

struct TinyInstance {
  Calendar cal = Calendar::from_weeks(3);
  ParamSet params;
  InfectionSeries xi;
  ObservationSet obs;

  TinyInstance() {
    params.n_pop = 200.0;
    params.iota = 0.02;
    params.pi = 0.3;
    params.theta_h = 0.5;
    params.theta_ic = 0.9;
    params.theta_f = 0.05;
    params.zeta_h = {0.3};
    params.zeta_ic = {0.9};
    DelayPmf fh, fic, fgp;
    fh.probs = {0.5, 0.3, 0.15, 0.05};
    fic.probs = {0.6, 0.25, 0.1, 0.05};
    fgp.probs = {1.0};
    params.delay_inf_to_hosp = fh;
    params.delay_hosp_to_ic = fic;
    params.delay_inf_to_gp = fgp;
    xi = solve_transmission(params, cal);
    RngStream rng(2004);
    const LatentPath path = simulate_severity(xi, params, rng);
    obs = simulate_observations(path, params, cal, {}, {}, rng);
    obs.y_g.reset();
  }
};

ParamSet section4_params() {
  ParamSet p;  // defaults are the common simulation-study values
  p.delay_inf_to_hosp = discretize_exponential(0.3);
  p.delay_hosp_to_ic = discretize_exponential(0.4);
  p.delay_inf_to_gp = discretize_exponential(0.5);
  return p;
}

// ---- criterion 1: estimator unbiasedness -----------------------------------

void criterion_1() {
  const TinyInstance tiny;
  const double log_truth =
      loglik_brute_force(tiny.obs, tiny.params, tiny.xi, tiny.cal).value;
  const int reps = 400;
  std::vector<double> ratio(reps);
  for (int r = 0; r < reps; ++r) {
    RngStream rng(42000 + r);
    ratio[r] = std::exp(
        loglik_joint_mc(tiny.obs, tiny.params, tiny.xi, tiny.cal, 5, rng)
            .value -
        log_truth);
  }
  const auto mv = epitest::mean_var(ratio);
  const double se = std::sqrt(mv.var / reps);
  const bool pass = std::fabs(mv.mean - 1.0) <= 3.0 * se;
  report(1, pass,
         fmt("joint-MC unbiasedness: E[p_hat/p] = %.4f +- %.4f over %d "
             "replications (target 1 within 3 SE)",
             mv.mean, se, reps));
}

// ---- criterion 2: pseudo-marginal exactness in the particle count ----------

void criterion_2() {
  ParamSet params;
  params.n_pop = 1000.0;
  params.iota = 0.005;
  params.theta_h = 0.3;
  params.theta_ic = 0.4;
  params.zeta_h = {0.5};
  params.zeta_ic = {0.8};
  params.delay_inf_to_hosp = discretize_exponential(1.0);
  params.delay_hosp_to_ic = discretize_exponential(1.2);
  params.delay_inf_to_gp = discretize_exponential(1.0);
  const Calendar cal = Calendar::from_weeks(4);

  const InfectionSeries xi = solve_transmission(params, cal);
  RngStream data_rng(1001);
  const LatentPath path = simulate_severity(xi, params, data_rng);
  ObservationSet obs = simulate_observations(path, params, cal, {}, {},
                                             data_rng);
  obs.y_g.reset();

  std::vector<FreeParam> free{{"beta", {PriorFamily::lognormal, -0.5, 1.0}}};
  MCMCSettings settings;
  settings.algorithm = Algorithm::gimh;
  settings.n_iter = 200000;
  settings.n_burnin = 20000;
  settings.proposal_sd = {0.15};
  settings.adapt = true;

  std::vector<double> draws25, draws2000;
  auto run_one = [&](int n_particles, std::uint64_t seed,
                     std::vector<double>& out) {
    MCMCSettings s = settings;
    s.n_particles = n_particles;
    s.seed = seed;
    const LikelihoodFn lik =
        make_likelihood(obs, cal, StageCounts{1, 1},
                        StreamFlags{true, false, false}, HospIcMode::joint,
                        n_particles);
    const ChainResult chain = run_chain(params, free, lik, s);
    out = chain.draws("beta");
  };
  std::thread t25(run_one, 25, 501, std::ref(draws25));
  run_one(2000, 502, draws2000);
  t25.join();

  const double ks = ks_distance(draws25, draws2000);
  report(2, ks <= 0.05,
         fmt("GIMH beta posteriors at N=25 vs N=2000: KS distance %.4f over "
             "%lld iterations (threshold 0.05)",
             ks, settings.n_iter));
}

// ---- criterion 3: Poisson-marginal consistency ------------------------------

void criterion_3() {
  ParamSet params = section4_params();
  params.theta_h = 0.1;  // small-dependence severity values
  params.theta_ic = 0.1;
  const Calendar cal = Calendar::from_weeks(33);
  const InfectionSeries xi = solve_transmission(params, cal);
  const JointGrid grid = build_joint_grid(xi, params, cal);
  const int n_weeks = cal.n_weeks();

  const long long reps = 100000;
  std::vector<double> sum_h(n_weeks, 0.0), sum2_h(n_weeks, 0.0);
  std::vector<double> sum_ic(n_weeks, 0.0), sum2_ic(n_weeks, 0.0);
  const int n_threads = 2;
  std::vector<std::thread> pool;
  std::vector<std::vector<double>> partials(
      n_threads, std::vector<double>(4 * n_weeks, 0.0));
  for (int w = 0; w < n_threads; ++w) {
    pool.emplace_back([&, w]() {
      auto& part = partials[w];
      for (long long r = w; r < reps; r += n_threads) {
        RngStream rng(31000, static_cast<std::uint64_t>(r));
        const auto cohort = sample_cohort_poisson(xi, params.theta_h, rng);
        const auto hosp =
            split_and_convolve(cohort, params.delay_inf_to_hosp, rng);
        const auto ic_cohort =
            sample_binomial_transition(hosp.events, params.theta_ic, rng);
        const auto ic =
            split_and_convolve(ic_cohort, params.delay_hosp_to_ic, rng);
        const auto xh = weekly_aggregate(hosp.events, cal);
        const auto xic = weekly_aggregate(ic.events, cal);
        for (int t = 0; t < n_weeks; ++t) {
          const double h = static_cast<double>(xh[t]);
          const double i = static_cast<double>(xic[t]);
          part[4 * t] += h;
          part[4 * t + 1] += h * h;
          part[4 * t + 2] += i;
          part[4 * t + 3] += i * i;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (int w = 0; w < n_threads; ++w)
    for (int t = 0; t < n_weeks; ++t) {
      sum_h[t] += partials[w][4 * t];
      sum2_h[t] += partials[w][4 * t + 1];
      sum_ic[t] += partials[w][4 * t + 2];
      sum2_ic[t] += partials[w][4 * t + 3];
    }

  bool pass = true;
  double worst_z = 0.0;
  std::string worst = "none";
  auto check_series = [&](const char* name, const std::vector<double>& sums,
                          const std::vector<double>& sums2,
                          const std::vector<double>& lambda) {
    for (int t = 0; t < n_weeks; ++t) {
      if (lambda[t] <= 1e-9) continue;
      const double mean = sums[t] / reps;
      const double var =
          (sums2[t] - sums[t] * sums[t] / reps) / (reps - 1.0);
      const double se_mean = std::sqrt(lambda[t] / reps);
      const double se_var =
          std::sqrt((2.0 * lambda[t] * lambda[t] + lambda[t]) / reps);
      const double z_mean = std::fabs(mean - lambda[t]) / se_mean;
      const double z_var = std::fabs(var - lambda[t]) / se_var;
      if (z_mean > 3.0 || z_var > 3.0) pass = false;
      if (z_mean > worst_z) {
        worst_z = z_mean;
        worst = fmt("%s mean, week %d", name, t);
      }
      if (z_var > worst_z) {
        worst_z = z_var;
        worst = fmt("%s variance, week %d", name, t);
      }
    }
  };
  check_series("X_h", sum_h, sum2_h, grid.lam_h_week);
  check_series("X_ic", sum_ic, sum2_ic, grid.lam_ic_week);
  report(3, pass,
         fmt("Poisson-marginal consistency over %lld forward simulations: "
             "worst |z| = %.2f (%s), bound 3 sigma at every week",
             reps, worst_z, worst.c_str()));
}

// ---- criterion 6: transmission conservation and oracle agreement -----------

void criterion_6() {
  const ParamSet params = section4_params();
  const Calendar cal = Calendar::from_weeks(33);
  const auto traj = solve_transmission_full(params, cal);
  double worst = 0.0;
  for (std::size_t u = 0; u < traj.s.size(); ++u) {
    const double total =
        traj.s[u] + traj.e_total[u] + traj.i_total[u] + traj.r[u];
    worst = std::max(worst, std::fabs(total - params.n_pop));
  }
  const bool conserve = worst <= 1e-6 * params.n_pop;

  const auto oracle = epitest::euler_seir_daily(params, cal, 1, 1, 0.01);
  double sup = 0.0, scale = 0.0, fs = 0.0, fs_oracle = 0.0;
  for (std::size_t u = 0; u < oracle.size(); ++u) {
    sup = std::max(sup, std::fabs(traj.xi.xi0[u] - oracle[u]));
    scale = std::max(scale, oracle[u]);
    fs += traj.xi.xi0[u];
    fs_oracle += oracle[u];
  }
  const double rel_sup = sup / scale;
  const double rel_fs = std::fabs(fs - fs_oracle) / fs_oracle;
  report(6, conserve && rel_sup <= 1e-2,
         fmt("transmission: worst conservation error %.2e (bound 1e-6 N), "
             "oracle sup-norm %.2e (bound 1e-2), final-size error %.2e",
             worst, rel_sup, rel_fs));
}

// ---- criterion 7: sampler validity ------------------------------------------

void criterion_7() {
  // conjugate gamma-poisson toy with the likelihood evaluated exactly
  const long long y = 7;
  const double a = 3.0, b = 1.5;
  ParamSet init = section4_params();
  std::vector<FreeParam> free{{"beta", {PriorFamily::gamma, a, b}}};
  const LikelihoodFn lik = [&](const ParamSet& p, RngStream&) {
    LogLikEstimate est;
    est.value = log_poisson_pmf(y, p.beta);
    return est;
  };
  MCMCSettings settings;
  settings.algorithm = Algorithm::gimh;
  settings.n_iter = 100000;
  settings.n_burnin = 5000;
  settings.seed = 11;
  settings.proposal_sd = {0.35};
  settings.deterministic_likelihood = true;
  const ChainResult chain = run_chain(init, free, lik, settings);
  const auto stats = summarize(chain.draws("beta"));
  const double post_mean = (a + y) / (b + 1.0);
  const double post_var = (a + y) / ((b + 1.0) * (b + 1.0));
  const double se_mean = std::sqrt(post_var / stats.ess);
  const double se_var =
      post_var * std::sqrt((6.0 / (a + y) + 2.0) / stats.ess);
  const bool conjugate_ok =
      std::fabs(stats.mean - post_mean) <= 3.0 * se_mean &&
      std::fabs(stats.var - post_var) <= 3.0 * se_var;

  // same-seed trajectory identity: GIMH with exact likelihood vs plain MH
  const double sd = 0.3;
  MCMCSettings mh;
  mh.algorithm = Algorithm::gimh;
  mh.n_iter = 3000;
  mh.n_burnin = 0;
  mh.seed = 99;
  mh.proposal_sd = {sd};
  mh.adapt = false;
  mh.deterministic_likelihood = true;
  auto toy_loglik = [](double beta) {
    return -7.0 * (beta - 0.8) * (beta - 0.8);
  };
  std::vector<FreeParam> free2{{"beta", {PriorFamily::lognormal, -0.5, 1.0}}};
  const LikelihoodFn lik2 = [&](const ParamSet& p, RngStream&) {
    LogLikEstimate est;
    est.value = toy_loglik(p.beta);
    return est;
  };
  const ChainResult gimh = run_chain(init, free2, lik2, mh);
  RngStream mh_rng(mh.seed, 0xc4a1ULL);
  double z = std::log(init.beta);
  auto log_target = [&](double zv) {
    const double beta = std::exp(zv);
    const PriorSpec prior{PriorFamily::lognormal, -0.5, 1.0};
    return toy_loglik(beta) + prior.logpdf(beta) + zv;
  };
  bool identical = true;
  for (long long it = 0; it < mh.n_iter; ++it) {
    const double zp = z + sd * mh_rng.normal();
    const bool accept =
        std::log(mh_rng.uniform()) < log_target(zp) - log_target(z);
    if (accept) z = zp;
    if (std::fabs(gimh.records[it].values[0] - std::exp(z)) >
        1e-12 * std::exp(z))
      identical = false;
  }
  report(7, conjugate_ok && identical,
         fmt("sampler: conjugate posterior mean %.4f (target %.4f), var %.4f "
             "(target %.4f), ESS %.0f; GIMH/plain-MH trajectories %s",
             stats.mean, post_mean, stats.var, post_var, stats.ess,
             identical ? "identical" : "DIVERGED"));
}

// ---- criteria 4 and 5: desk-scale misspecification study -------------------

double proportion_for(const ComparisonResult& result, const char* param) {
  for (const auto& row : result.proportions)
    if (row.param == param) return row.prop_var_le0;
  return std::nan("");
}

void criterion_4() {
  SimStudySettings settings;  // desk-scale defaults: 50 datasets, 2e4 iters
  settings.seed = 1;
  const ComparisonResult small =
      run_comparison(small_dependence_scenario(), settings);
  const ComparisonResult large =
      run_comparison(large_dependence_scenario(), settings);
  const double p_small = proportion_for(small, "beta");
  const double p_large = proportion_for(large, "beta");
  const bool pass = p_large <= 0.1 && p_small >= 0.2 && p_small <= 0.6;
  report(4, pass,
         fmt("table-2 direction at desk scale: prop(pwd_var(beta)<=0) small "
             "%.3f (band [0.2, 0.6], paper 0.392), large %.3f (bound <= 0.1, "
             "paper 0); excluded %d/%d",
             p_small, p_large, small.n_excluded + large.n_excluded,
             2 * settings.n_datasets));
}

void criterion_5() {
  SimStudySettings settings;
  settings.seed = 2;
  settings.severity_free = true;
  const ComparisonResult large =
      run_comparison(large_dependence_scenario(), settings);
  const double p = proportion_for(large, "theta_ic");
  report(5, p >= 0.9,
         fmt("table-3 theta_ic discrimination at desk scale: "
             "prop(pwd_var(theta_ic)<=0) = %.3f (bound >= 0.9, paper 1); "
             "flagged %d, excluded %d",
             p, large.n_flagged, large.n_excluded));
}

// ---- criterion 8: full-model self-consistency -------------------------------

void criterion_8() {
  // section-5-style multi-stream season: SE2I2R with a school-closure window,
  // GP background + day-of-week detection, virology positivity; the paper's
  // real surveillance data are access-restricted, so the check is coverage of
  // known truth on simulated seasons
  ParamSet truth;
  truth.n_pop = 100000.0;
  truth.beta = 0.58;
  truth.pi = 0.35;
  truth.iota = 5e-5;
  truth.sigma = 0.5;
  truth.gamma = 0.55;
  truth.kappa = 0.5;
  truth.theta_h = 0.005;
  truth.theta_ic = 0.08;
  truth.theta_f = 0.02;
  truth.zeta_h = {0.3};
  truth.zeta_ic = {0.9};
  truth.zeta_g_base = 0.3;
  truth.dow_effect = {1.3, 1.2, 1.1, 1.0, 0.9, 0.3, 0.2};
  double dow_mean = 0.0;
  for (double v : truth.dow_effect) dow_mean += v;
  for (auto& v : truth.dow_effect) v *= 7.0 / dow_mean;
  truth.bg_a0 = 2.2;
  truth.bg_a1 = 0.4;
  truth.bg_a2 = 0.6;
  truth.delay_inf_to_hosp = discretize_exponential(0.3);
  truth.delay_hosp_to_ic = discretize_exponential(0.4);
  truth.delay_inf_to_gp = discretize_exponential(0.5);
  const Calendar cal(33 * 7, {{77, 91}});
  const StageCounts stages{2, 2};
  const StreamFlags flags{true, true, true};

  const int n_reps = 20;
  std::atomic<int> next{0};
  std::vector<int> cover_h(n_reps, 0), cover_ic(n_reps, 0), failed(n_reps, 0);
  auto worker = [&]() {
    for (;;) {
      const int rep = next.fetch_add(1);
      if (rep >= n_reps) return;
      const InfectionSeries xi = solve_transmission(truth, cal, stages);
      RngStream rng(6000, static_cast<std::uint64_t>(rep));
      const LatentPath path = simulate_severity(xi, truth, rng);
      const MarginalRates rates = marginal_rates(xi, truth);
      std::vector<long long> swabs(cal.n_weeks(), 60);
      const ObservationSet obs =
          simulate_observations(path, truth, cal, swabs, rates.lambda_f, rng);

      std::vector<FreeParam> free{
          {"beta", {PriorFamily::lognormal, -0.5, 1.0}},
          {"theta_h", {PriorFamily::beta, 1.0, 1.0}},
          {"theta_ic", {PriorFamily::beta, 1.0, 1.0}}};
      MCMCSettings settings;
      settings.algorithm = Algorithm::gimh;
      settings.n_iter = 15000;
      settings.n_burnin = 4000;
      settings.n_particles = 300;
      settings.seed = 8800 + rep;
      settings.proposal_sd = {0.03, 0.1, 0.1};
      const LikelihoodFn lik = make_likelihood(obs, cal, stages, flags,
                                               HospIcMode::joint, 300);
      try {
        const ChainResult chain = run_chain(truth, free, lik, settings);
        const auto sh = summarize(chain.draws("theta_h"));
        const auto sic = summarize(chain.draws("theta_ic"));
        cover_h[rep] =
            (truth.theta_h >= sh.q025 && truth.theta_h <= sh.q975) ? 1 : 0;
        cover_ic[rep] =
            (truth.theta_ic >= sic.q025 && truth.theta_ic <= sic.q975) ? 1 : 0;
      } catch (const InitializationError&) {
        failed[rep] = 1;
      }
    }
  };
  std::thread t1(worker), t2(worker);
  t1.join();
  t2.join();

  int ch = 0, cic = 0, nf = 0;
  for (int r = 0; r < n_reps; ++r) {
    ch += cover_h[r];
    cic += cover_ic[r];
    nf += failed[r];
  }
  const bool pass = ch >= 18 && cic >= 18 && nf == 0;
  report(8, pass,
         fmt("full-model self-consistency (restricted real data substitute): "
             "true theta_h in 95%% CrI %d/20, theta_ic %d/20 (need >= 18), "
             "fit failures %d",
             ch, cic, nf));
}

}  // namespace

int main(int argc, char** argv) {
  bool run_long = false;
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--long") == 0) run_long = true;
    if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc)
      only = std::atoi(argv[i + 1]);
  }

  auto want = [&](int criterion, bool is_long) {
    if (only != 0) return criterion == only;
    return !is_long || run_long;
  };

  if (want(1, false)) criterion_1();
  if (want(2, false)) criterion_2();
  if (want(3, false)) criterion_3();
  if (want(4, true))
    criterion_4();
  else if (only == 0)
    skip(4, "table-2 direction, 50 datasets x 2 scenarios, MCWM fits");
  if (want(5, true))
    criterion_5();
  else if (only == 0)
    skip(5, "table-3 theta_ic discrimination, 50 large-dependence datasets");
  if (want(6, false)) criterion_6();
  if (want(7, false)) criterion_7();
  if (want(8, true))
    criterion_8();
  else if (only == 0)
    skip(8, "full-model self-consistency over 20 replicates");

  std::printf("acceptance: %d criterion failure(s)\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
