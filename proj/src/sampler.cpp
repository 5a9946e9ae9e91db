#include "epi/sampler.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "epi/mathfn.hpp"

namespace epi {

// ---- priors ---------------------------------------------------------------

double PriorSpec::logpdf(double x) const {
  switch (family) {
    case PriorFamily::uniform:
      return (x >= a && x <= b) ? -std::log(b - a) : kNegInf;
    case PriorFamily::beta:
      if (x <= 0.0 || x >= 1.0) return kNegInf;
      return std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
             (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x);
    case PriorFamily::gamma:
      if (x <= 0.0) return kNegInf;
      return a * std::log(b) - std::lgamma(a) + (a - 1.0) * std::log(x) -
             b * x;
    case PriorFamily::lognormal: {
      if (x <= 0.0) return kNegInf;
      const double z = (std::log(x) - a) / b;
      return -0.5 * z * z - std::log(x * b) - 0.5 * std::log(2.0 * M_PI);
    }
    case PriorFamily::normal: {
      const double z = (x - a) / b;
      return -0.5 * z * z - std::log(b) - 0.5 * std::log(2.0 * M_PI);
    }
    case PriorFamily::fixed:
      return (x == a) ? 0.0 : kNegInf;
  }
  return kNegInf;
}

double PriorSpec::sample(RngStream& rng) const {
  switch (family) {
    case PriorFamily::uniform:
      return a + (b - a) * rng.uniform();
    case PriorFamily::beta: {
      std::gamma_distribution<double> ga(a, 1.0), gb(b, 1.0);
      const double x = ga(rng.engine());
      const double y = gb(rng.engine());
      return x / (x + y);
    }
    case PriorFamily::gamma: {
      std::gamma_distribution<double> g(a, 1.0 / b);
      return g(rng.engine());
    }
    case PriorFamily::lognormal:
      return std::exp(a + b * rng.normal());
    case PriorFamily::normal:
      return a + b * rng.normal();
    case PriorFamily::fixed:
      return a;
  }
  return a;
}

PriorSpec parse_prior(const std::string& text) {
  const auto open = text.find('(');
  const auto close = text.rfind(')');
  std::string name = text.substr(0, open == std::string::npos ? text.size()
                                                              : open);
  PriorSpec p;
  if (name == "fixed") {
    p.family = PriorFamily::fixed;
  } else if (name == "uniform") {
    p.family = PriorFamily::uniform;
  } else if (name == "beta") {
    p.family = PriorFamily::beta;
  } else if (name == "gamma") {
    p.family = PriorFamily::gamma;
  } else if (name == "lognormal") {
    p.family = PriorFamily::lognormal;
  } else if (name == "normal") {
    p.family = PriorFamily::normal;
  } else {
    throw std::invalid_argument("unknown prior family '" + name + "'");
  }
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw std::invalid_argument("prior '" + text +
                                "' must look like family(a, b)");
  const std::string args = text.substr(open + 1, close - open - 1);
  const auto comma = args.find(',');
  try {
    if (p.family == PriorFamily::fixed) {
      p.a = std::stod(args);
      p.b = 0.0;
    } else {
      if (comma == std::string::npos)
        throw std::invalid_argument("expected two arguments");
      p.a = std::stod(args.substr(0, comma));
      p.b = std::stod(args.substr(comma + 1));
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("cannot parse prior arguments in '" + text +
                                "'");
  }
  return p;
}

std::string to_string(const PriorSpec& p) {
  char buf[96];
  const char* name = "uniform";
  switch (p.family) {
    case PriorFamily::uniform: name = "uniform"; break;
    case PriorFamily::beta: name = "beta"; break;
    case PriorFamily::gamma: name = "gamma"; break;
    case PriorFamily::lognormal: name = "lognormal"; break;
    case PriorFamily::normal: name = "normal"; break;
    case PriorFamily::fixed:
      std::snprintf(buf, sizeof buf, "fixed(%.17g)", p.a);
      return buf;
  }
  std::snprintf(buf, sizeof buf, "%s(%.17g, %.17g)", name, p.a, p.b);
  return buf;
}

// ---- transforms -----------------------------------------------------------

double to_unconstrained(Transform tr, double x) {
  switch (tr) {
    case Transform::identity: return x;
    case Transform::log: return std::log(x);
    case Transform::logit: return std::log(x) - std::log1p(-x);
  }
  return x;
}

double from_unconstrained(Transform tr, double z) {
  switch (tr) {
    case Transform::identity: return z;
    case Transform::log: return std::exp(z);
    case Transform::logit: return 1.0 / (1.0 + std::exp(-z));
  }
  return z;
}

double transform_log_jacobian(Transform tr, double x) {
  switch (tr) {
    case Transform::identity: return 0.0;
    case Transform::log: return std::log(x);
    case Transform::logit: return std::log(x) + std::log1p(-x);
  }
  return 0.0;
}

// ---- parameter accessors ----------------------------------------------------

namespace {

struct NamedAccessor {
  const char* name;
  ParamAccessor acc;
};

const NamedAccessor kAccessors[] = {
    {"beta", {Transform::log, [](const ParamSet& p) { return p.beta; },
              [](ParamSet& p, double v) { p.beta = v; }}},
    {"sigma", {Transform::log, [](const ParamSet& p) { return p.sigma; },
               [](ParamSet& p, double v) { p.sigma = v; }}},
    {"gamma", {Transform::log, [](const ParamSet& p) { return p.gamma; },
               [](ParamSet& p, double v) { p.gamma = v; }}},
    {"kappa", {Transform::log, [](const ParamSet& p) { return p.kappa; },
               [](ParamSet& p, double v) { p.kappa = v; }}},
    {"pi", {Transform::logit, [](const ParamSet& p) { return p.pi; },
            [](ParamSet& p, double v) { p.pi = v; }}},
    {"iota", {Transform::logit, [](const ParamSet& p) { return p.iota; },
              [](ParamSet& p, double v) { p.iota = v; }}},
    {"theta_h", {Transform::logit, [](const ParamSet& p) { return p.theta_h; },
                 [](ParamSet& p, double v) { p.theta_h = v; }}},
    {"theta_ic",
     {Transform::logit, [](const ParamSet& p) { return p.theta_ic; },
      [](ParamSet& p, double v) { p.theta_ic = v; }}},
    {"theta_f", {Transform::logit, [](const ParamSet& p) { return p.theta_f; },
                 [](ParamSet& p, double v) { p.theta_f = v; }}},
    {"zeta_h", {Transform::logit,
                [](const ParamSet& p) { return p.zeta_h[0]; },
                [](ParamSet& p, double v) { p.zeta_h.assign(1, v); }}},
    {"zeta_ic", {Transform::logit,
                 [](const ParamSet& p) { return p.zeta_ic[0]; },
                 [](ParamSet& p, double v) { p.zeta_ic.assign(1, v); }}},
    {"zeta_g", {Transform::logit,
                [](const ParamSet& p) { return p.zeta_g_base; },
                [](ParamSet& p, double v) { p.zeta_g_base = v; }}},
    {"bg_a0", {Transform::identity,
               [](const ParamSet& p) { return p.bg_a0; },
               [](ParamSet& p, double v) { p.bg_a0 = v; }}},
    {"bg_a1", {Transform::identity,
               [](const ParamSet& p) { return p.bg_a1; },
               [](ParamSet& p, double v) { p.bg_a1 = v; }}},
    {"bg_a2", {Transform::identity,
               [](const ParamSet& p) { return p.bg_a2; },
               [](ParamSet& p, double v) { p.bg_a2 = v; }}},
};

}  // namespace

const ParamAccessor& param_accessor(const std::string& name) {
  for (const auto& entry : kAccessors)
    if (name == entry.name) return entry.acc;
  throw std::invalid_argument("unknown sampleable parameter '" + name + "'");
}

std::vector<std::string> sampleable_params() {
  std::vector<std::string> names;
  for (const auto& entry : kAccessors) names.emplace_back(entry.name);
  return names;
}

// ---- chain ----------------------------------------------------------------

namespace {

struct FreeState {
  std::vector<const ParamAccessor*> acc;
  std::vector<PriorSpec> priors;
  std::vector<std::string> names;

  int dim() const { return static_cast<int>(acc.size()); }

  std::vector<double> unconstrained(const ParamSet& p) const {
    std::vector<double> z(acc.size());
    for (std::size_t i = 0; i < acc.size(); ++i)
      z[i] = to_unconstrained(acc[i]->transform, acc[i]->get(p));
    return z;
  }

  void apply(ParamSet& p, const std::vector<double>& z) const {
    for (std::size_t i = 0; i < acc.size(); ++i)
      acc[i]->set(p, from_unconstrained(acc[i]->transform, z[i]));
  }

  // prior density in natural scale; -inf when the joint ParamSet constraints
  // are violated (e.g. pi + iota > 1)
  double log_prior(const ParamSet& p) const {
    double acc_lp = 0.0;
    for (std::size_t i = 0; i < priors.size(); ++i) {
      const double lp = priors[i].logpdf(acc[i]->get(p));
      if (lp == kNegInf) return kNegInf;
      acc_lp += lp;
    }
    try {
      p.validate_scalars();
    } catch (const std::invalid_argument&) {
      return kNegInf;
    }
    return acc_lp;
  }

  double log_jacobian(const ParamSet& p) const {
    double acc_lj = 0.0;
    for (std::size_t i = 0; i < acc.size(); ++i)
      acc_lj += transform_log_jacobian(acc[i]->transform, acc[i]->get(p));
    return acc_lj;
  }
};

}  // namespace

std::vector<double> ChainResult::draws(const std::string& name,
                                       bool post_burnin_only) const {
  std::size_t idx = param_names.size();
  for (std::size_t i = 0; i < param_names.size(); ++i)
    if (param_names[i] == name) idx = i;
  if (idx == param_names.size())
    throw std::invalid_argument("chain has no parameter '" + name + "'");
  std::vector<double> out;
  out.reserve(records.size());
  for (const auto& rec : records)
    if (!post_burnin_only || rec.post_burnin) out.push_back(rec.values[idx]);
  return out;
}

ChainResult run_chain(const ParamSet& init, const std::vector<FreeParam>& free,
                      const LikelihoodFn& lik, const MCMCSettings& settings) {
  if (free.empty()) throw std::invalid_argument("run_chain: no free parameters");
  if (settings.n_iter <= settings.n_burnin || settings.n_burnin < 0)
    throw std::invalid_argument("run_chain: need iterations > burn-in >= 0");
  if (settings.n_particles < 1)
    throw std::invalid_argument("run_chain: n_particles must be >= 1");

  FreeState fs;
  for (const auto& fp : free) {
    if (fp.prior.family == PriorFamily::fixed)
      throw std::invalid_argument("free parameter '" + fp.name +
                                  "' cannot have a fixed prior");
    fs.acc.push_back(&param_accessor(fp.name));
    fs.priors.push_back(fp.prior);
    fs.names.push_back(fp.name);
  }
  const int d = fs.dim();

  std::vector<double> sd = settings.proposal_sd;
  if (sd.empty()) sd.assign(d, 0.1);
  if (sd.size() == 1) sd.assign(d, sd[0]);
  if (static_cast<int>(sd.size()) != d)
    throw std::invalid_argument("proposal_sd length must match free params");
  for (double v : sd)
    if (!(v > 0.0)) throw std::invalid_argument("proposal_sd must be > 0");

  RngStream chain_rng(settings.seed, 0xc4a1ULL);

  // initialize, redrawing from the priors when the likelihood is degenerate
  ParamSet cur = init;
  double cur_lp = fs.log_prior(cur);
  LogLikEstimate cur_lik;
  bool ready = false;
  RngStream init_rng(settings.seed, 0x1a17ULL);
  for (int attempt = 0; attempt <= settings.init_retries && !ready; ++attempt) {
    if (attempt > 0) {
      for (int i = 0; i < d; ++i) fs.acc[i]->set(cur, fs.priors[i].sample(init_rng));
      cur_lp = fs.log_prior(cur);
    }
    if (cur_lp == kNegInf) continue;
    RngStream lik_rng(settings.seed, 0x11cULL, 0);
    cur_lik = lik(cur, lik_rng);
    ready = (cur_lik.value != kNegInf);
  }
  if (!ready)
    throw InitializationError(
        "run_chain: likelihood at the initial point is -inf after " +
        std::to_string(settings.init_retries) + " retries");

  ChainResult result;
  result.param_names = fs.names;
  result.records.reserve(settings.n_iter);
  result.lik_kind = cur_lik.kind;
  result.n_particles = settings.n_particles;

  std::vector<double> z = fs.unconstrained(cur);
  double log_scale = 0.0;
  long long accepted_post = 0, post_count = 0;

  std::vector<double> z_prop(d);
  for (long long it = 0; it < settings.n_iter; ++it) {
    const bool post_burnin = it >= settings.n_burnin;
    const double scale = std::exp(log_scale);
    for (int i = 0; i < d; ++i)
      z_prop[i] = z[i] + scale * sd[i] * chain_rng.normal();

    ParamSet prop = cur;
    fs.apply(prop, z_prop);
    const double prop_lp = fs.log_prior(prop);

    bool accept = false;
    LogLikEstimate prop_lik;
    double cur_value = cur_lik.value;
    double cur_se = cur_lik.mc_se;
    if (prop_lp != kNegInf) {
      RngStream prop_rng(settings.seed, 0x11cULL, 2 * (it + 1));
      prop_lik = lik(prop, prop_rng);
      if (settings.algorithm == Algorithm::mcwm &&
          !settings.deterministic_likelihood) {
        RngStream cur_rng(settings.seed, 0x11cULL, 2 * (it + 1) + 1);
        cur_lik = lik(cur, cur_rng);
        cur_value = cur_lik.value;
        cur_se = cur_lik.mc_se;
      }
      const double log_num =
          prop_lik.value + prop_lp + fs.log_jacobian(prop);
      const double log_den = cur_value + cur_lp + fs.log_jacobian(cur);
      // exactly one acceptance draw per evaluated proposal; log(u) < 0, so a
      // nonnegative log ratio always accepts
      const double log_u = std::log(chain_rng.uniform());
      accept = prop_lik.value != kNegInf && log_u < (log_num - log_den);
    }

    if (accept) {
      cur = std::move(prop);
      z = z_prop;
      cur_lp = prop_lp;
      cur_lik = prop_lik;
      cur_value = prop_lik.value;
      cur_se = prop_lik.mc_se;
    }

    if (settings.adapt && !post_burnin) {
      const double step = 1.0 / std::pow(static_cast<double>(it + 1), 0.6);
      log_scale += step * ((accept ? 1.0 : 0.0) - settings.target_accept);
    }
    if (post_burnin) {
      ++post_count;
      if (accept) ++accepted_post;
    }

    ChainRecord rec;
    rec.iter = it;
    rec.post_burnin = post_burnin;
    rec.accepted = accept;
    rec.log_lik = cur_value;
    rec.mc_se = cur_se;
    rec.log_prior = cur_lp;
    rec.values.resize(d);
    for (int i = 0; i < d; ++i) rec.values[i] = fs.acc[i]->get(cur);
    result.records.push_back(std::move(rec));

    if (settings.progress_every > 0 && (it + 1) % settings.progress_every == 0) {
      std::fprintf(stderr, "iter %lld/%lld accept %.3f scale %.3g\n",
                   it + 1, settings.n_iter,
                   post_count > 0 ? static_cast<double>(accepted_post) /
                                        static_cast<double>(post_count)
                                  : 0.0,
                   std::exp(log_scale));
    }
  }

  result.accept_rate = post_count > 0 ? static_cast<double>(accepted_post) /
                                            static_cast<double>(post_count)
                                      : 0.0;
  result.final_scale = std::exp(log_scale);
  return result;
}

ChainSummary summarize_chain(const ChainResult& chain) {
  ChainSummary summary;
  summary.accept_rate = chain.accept_rate;
  long long n = 0;
  for (const auto& rec : chain.records)
    if (rec.post_burnin) ++n;
  if (n < 2) throw std::invalid_argument("summarize_chain: need >= 2 samples");
  summary.n_samples = n;
  for (const auto& name : chain.param_names) {
    ChainSummaryRow row;
    row.name = name;
    row.stats = summarize(chain.draws(name));
    summary.rows.push_back(std::move(row));
  }
  return summary;
}

}  // namespace epi
