#include "epi/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace epi {

namespace {

struct Value {
  enum class Type { number, boolean, string, number_array, string_array };
  Type type = Type::number;
  double num = 0.0;
  bool flag = false;
  std::string str;
  std::vector<double> nums;
  std::vector<std::string> strs;
  int line = 0;
};

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

bool parse_number(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  char* end = nullptr;
  out = std::strtod(tok.c_str(), &end);
  return end != nullptr && *end == '\0';
}

std::string unquote(const std::string& tok) {
  if (tok.size() >= 2 && ((tok.front() == '"' && tok.back() == '"') ||
                          (tok.front() == '\'' && tok.back() == '\'')))
    return tok.substr(1, tok.size() - 2);
  return tok;
}

Value parse_value(const std::string& raw, int line) {
  Value v;
  v.line = line;
  const std::string text = trim(raw);
  if (text.empty()) throw ConfigError("line " + std::to_string(line) +
                                      ": empty value");
  if (text.front() == '[') {
    if (text.back() != ']')
      throw ConfigError("line " + std::to_string(line) + ": unterminated array");
    std::string body = text.substr(1, text.size() - 2);
    std::vector<std::string> toks;
    std::string tok;
    std::stringstream ss(body);
    while (std::getline(ss, tok, ',')) {
      tok = trim(tok);
      if (!tok.empty()) toks.push_back(tok);
    }
    bool numeric = !toks.empty();
    std::vector<double> nums;
    for (const auto& t : toks) {
      double d;
      if (parse_number(t, d))
        nums.push_back(d);
      else {
        numeric = false;
        break;
      }
    }
    if (numeric) {
      v.type = Value::Type::number_array;
      v.nums = std::move(nums);
    } else {
      v.type = Value::Type::string_array;
      for (const auto& t : toks) v.strs.push_back(unquote(t));
    }
    return v;
  }
  if (text == "true" || text == "false") {
    v.type = Value::Type::boolean;
    v.flag = (text == "true");
    return v;
  }
  double d;
  if (parse_number(text, d)) {
    v.type = Value::Type::number;
    v.num = d;
    return v;
  }
  v.type = Value::Type::string;
  v.str = unquote(text);
  return v;
}

using KeyMap = std::map<std::string, Value>;

KeyMap tokenize(const std::string& text) {
  KeyMap keys;
  std::string section;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("line " + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw ConfigError("line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    if (keys.count(key))
      throw ConfigError("line " + std::to_string(lineno) + ": duplicate key '" +
                        key + "'");
    keys.emplace(std::move(key), parse_value(line.substr(eq + 1), lineno));
  }
  return keys;
}

class Schema {
 public:
  explicit Schema(KeyMap keys) : keys_(std::move(keys)) {}

  bool has(const std::string& key) const { return keys_.count(key) > 0; }

  double number(const std::string& key, double fallback) {
    auto it = find(key);
    if (it == keys_.end()) return fallback;
    if (it->second.type != Value::Type::number)
      throw ConfigError("key '" + key + "' must be a number");
    return it->second.num;
  }

  long long integer(const std::string& key, long long fallback) {
    const double d = number(key, static_cast<double>(fallback));
    const long long v = static_cast<long long>(d);
    if (static_cast<double>(v) != d)
      throw ConfigError("key '" + key + "' must be an integer");
    return v;
  }

  bool boolean(const std::string& key, bool fallback) {
    auto it = find(key);
    if (it == keys_.end()) return fallback;
    if (it->second.type != Value::Type::boolean)
      throw ConfigError("key '" + key + "' must be true or false");
    return it->second.flag;
  }

  std::string string(const std::string& key, const std::string& fallback) {
    auto it = find(key);
    if (it == keys_.end()) return fallback;
    if (it->second.type != Value::Type::string)
      throw ConfigError("key '" + key + "' must be a string");
    return it->second.str;
  }

  std::vector<double> numbers(const std::string& key) {
    auto it = find(key);
    if (it == keys_.end()) return {};
    if (it->second.type == Value::Type::number) return {it->second.num};
    if (it->second.type != Value::Type::number_array)
      throw ConfigError("key '" + key + "' must be a number array");
    return it->second.nums;
  }

  std::vector<std::string> strings(const std::string& key) {
    auto it = find(key);
    if (it == keys_.end()) return {};
    if (it->second.type == Value::Type::string) return {it->second.str};
    if (it->second.type != Value::Type::string_array)
      throw ConfigError("key '" + key + "' must be a string array");
    return it->second.strs;
  }

  // keys with a fixed prefix, e.g. priors.*
  std::vector<std::string> with_prefix(const std::string& prefix) const {
    std::vector<std::string> out;
    for (const auto& [key, value] : keys_)
      if (key.rfind(prefix, 0) == 0) out.push_back(key);
    return out;
  }

  void mark(const std::string& key) { used_.insert(key); }

  void check_all_used() const {
    for (const auto& [key, value] : keys_)
      if (!used_.count(key))
        throw ConfigError("unknown key '" + key + "' (line " +
                          std::to_string(value.line) + ")");
  }

 private:
  KeyMap::iterator find(const std::string& key) {
    auto it = keys_.find(key);
    if (it != keys_.end()) used_.insert(key);
    return it;
  }

  KeyMap keys_;
  std::set<std::string> used_;
};

DelayPmf delay_from(Schema& schema, const std::string& prefix,
                    double default_rate, double tail_tol) {
  const std::string family_str =
      schema.string(prefix + ".family", "exponential");
  const DelayFamily family = delay_family_from_string(family_str);
  const double rate = schema.number(prefix + ".rate", default_rate);
  const double shape = schema.number(prefix + ".shape", 1.0);
  try {
    return discretize_delay(family, shape, rate, 1.0, tail_tol);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(prefix + ": " + err.what());
  }
}

PriorSpec default_prior(const std::string& name) {
  // weakly-informative defaults; every one of these is config-overridable
  if (name == "beta") return {PriorFamily::lognormal, -0.5, 1.0};
  if (name == "sigma") return {PriorFamily::lognormal, -1.4, 1.0};
  if (name == "gamma") return {PriorFamily::lognormal, -1.25, 1.0};
  if (name == "kappa") return {PriorFamily::lognormal, 0.0, 0.5};
  if (name == "pi") return {PriorFamily::beta, 1.0, 1.0};
  if (name == "iota") return {PriorFamily::lognormal, std::log(1e-4), 2.0};
  if (name == "bg_a0") return {PriorFamily::normal, 0.0, 5.0};
  if (name == "bg_a1" || name == "bg_a2") return {PriorFamily::normal, 0.0, 2.0};
  return {PriorFamily::beta, 1.0, 1.0};  // probabilities
}

}  // namespace

std::vector<FreeParam> RunConfig::free_params() const {
  std::vector<FreeParam> out;
  for (const auto& name : free_names) {
    FreeParam fp;
    fp.name = name;
    auto it = priors.find(name);
    fp.prior = it != priors.end() ? it->second : default_prior(name);
    out.push_back(std::move(fp));
  }
  return out;
}

ParamSet RunConfig::initial_params() const {
  ParamSet init = params;
  for (const auto& [name, value] : init_values)
    param_accessor(name).set(init, value);
  return init;
}

MCMCSettings RunConfig::mcmc_settings() const {
  MCMCSettings settings;
  settings.algorithm = algorithm;
  settings.n_iter = iterations;
  settings.n_burnin = burnin;
  settings.proposal_sd = proposal_sd;
  settings.adapt = adapt;
  settings.n_particles = particles;
  settings.seed = seed;
  settings.progress_every = progress_every;
  return settings;
}

RunConfig parse_config_text(const std::string& text) {
  Schema schema(tokenize(text));
  RunConfig cfg;

  cfg.seed = static_cast<std::uint64_t>(schema.integer("seed", 1));
  if (const char* env = std::getenv("EPIJOINT_SEED")) {
    try {
      cfg.seed = std::stoull(env);
    } catch (const std::exception&) {
      throw ConfigError("EPIJOINT_SEED is not an integer: " +
                        std::string(env));
    }
  }
  cfg.threads = static_cast<int>(schema.integer("threads", 0));
  if (cfg.threads < 0) throw ConfigError("threads violates >= 0");

  cfg.weeks = static_cast<int>(schema.integer("weeks", 33));
  if (cfg.weeks < 1) throw ConfigError("weeks violates >= 1");
  const auto closure_flat = schema.numbers("closures");
  if (closure_flat.size() % 2 != 0)
    throw ConfigError("closures must list [start, end, start, end, ...] days");
  for (std::size_t i = 0; i + 1 < closure_flat.size(); i += 2)
    cfg.closures.emplace_back(static_cast<int>(closure_flat[i]),
                              static_cast<int>(closure_flat[i + 1]));

  cfg.m_e = static_cast<int>(schema.integer("m_e", 1));
  cfg.m_i = static_cast<int>(schema.integer("m_i", 1));
  if (cfg.m_e < 1 || cfg.m_e > 2 || cfg.m_i < 1 || cfg.m_i > 2)
    throw ConfigError("m_e / m_i violate {1, 2}");
  cfg.transmission_substeps =
      static_cast<int>(schema.integer("transmission_substeps", 1000));
  if (cfg.transmission_substeps < 1)
    throw ConfigError("transmission_substeps violates >= 1");

  auto streams = schema.strings("streams");
  if (!streams.empty()) {
    cfg.streams = StreamFlags{false, false, false};
    for (const auto& s : streams) {
      if (s == "hosp_ic")
        cfg.streams.hosp_ic = true;
      else if (s == "gp")
        cfg.streams.gp = true;
      else if (s == "virology")
        cfg.streams.virology = true;
      else
        throw ConfigError("unknown stream '" + s +
                          "' (expected hosp_ic|gp|virology)");
    }
  }

  const std::string lik = schema.string("likelihood", "joint");
  if (lik == "joint")
    cfg.likelihood = HospIcMode::joint;
  else if (lik == "joint-alt")
    cfg.likelihood = HospIcMode::joint_alt;
  else if (lik == "independent")
    cfg.likelihood = HospIcMode::independent;
  else if (lik == "brute")
    cfg.likelihood = HospIcMode::brute;
  else
    throw ConfigError("likelihood '" + lik +
                      "' violates {joint, joint-alt, independent, brute}");

  const std::string algo = schema.string("algorithm", "gimh");
  if (algo == "gimh")
    cfg.algorithm = Algorithm::gimh;
  else if (algo == "mcwm")
    cfg.algorithm = Algorithm::mcwm;
  else
    throw ConfigError("algorithm '" + algo + "' violates {gimh, mcwm}");

  cfg.iterations = schema.integer("iterations", 10000);
  cfg.burnin = schema.integer("burnin", cfg.iterations / 10);
  if (cfg.burnin < 0 || cfg.iterations <= cfg.burnin)
    throw ConfigError("iterations/burnin violate iterations > burnin >= 0");
  cfg.particles = static_cast<int>(schema.integer("particles", 2000));
  if (cfg.particles < 1) throw ConfigError("particles violates >= 1");
  cfg.adapt = schema.boolean("adapt", true);
  cfg.proposal_sd = schema.numbers("proposal_sd");
  for (double v : cfg.proposal_sd)
    if (!(v > 0.0)) throw ConfigError("proposal_sd violates > 0");
  cfg.progress_every = schema.integer("progress_every", 0);

  // model parameters
  ParamSet& p = cfg.params;
  p.beta = schema.number("params.beta", p.beta);
  p.pi = schema.number("params.pi", p.pi);
  p.iota = schema.number("params.iota", p.iota);
  p.sigma = schema.number("params.sigma", p.sigma);
  p.gamma = schema.number("params.gamma", p.gamma);
  p.kappa = schema.number("params.kappa", p.kappa);
  p.n_pop = schema.number("params.n_pop", p.n_pop);
  p.theta_h = schema.number("params.theta_h", p.theta_h);
  p.theta_ic = schema.number("params.theta_ic", p.theta_ic);
  p.theta_f = schema.number("params.theta_f", p.theta_f);
  if (schema.has("params.zeta_h")) p.zeta_h = schema.numbers("params.zeta_h");
  if (schema.has("params.zeta_ic")) p.zeta_ic = schema.numbers("params.zeta_ic");
  p.zeta_g_base = schema.number("params.zeta_g", p.zeta_g_base);
  if (schema.has("params.dow")) {
    const auto dow = schema.numbers("params.dow");
    if (dow.size() != 7) throw ConfigError("params.dow violates length 7");
    double mean = 0.0;
    for (double v : dow) mean += v;
    mean /= 7.0;
    if (!(mean > 0.0)) throw ConfigError("params.dow violates positive mean");
    for (int i = 0; i < 7; ++i) p.dow_effect[i] = dow[i] / mean;
  }
  p.bg_a0 = schema.number("params.bg_a0", p.bg_a0);
  p.bg_a1 = schema.number("params.bg_a1", p.bg_a1);
  p.bg_a2 = schema.number("params.bg_a2", p.bg_a2);

  const double tail_tol = schema.number("delay_tail_tol", 1e-6);
  p.delay_inf_to_hosp = delay_from(schema, "delay_inf_to_hosp", 0.3, tail_tol);
  p.delay_hosp_to_ic = delay_from(schema, "delay_hosp_to_ic", 0.4, tail_tol);
  p.delay_inf_to_gp = delay_from(schema, "delay_inf_to_gp", 0.5, tail_tol);

  cfg.free_names = schema.strings("free");
  {
    std::set<std::string> seen;
    const auto known = sampleable_params();
    for (const auto& name : cfg.free_names) {
      if (std::find(known.begin(), known.end(), name) == known.end())
        throw ConfigError("free parameter '" + name + "' is not sampleable");
      if (!seen.insert(name).second)
        throw ConfigError("free parameter '" + name + "' listed twice");
    }
  }
  for (const auto& key : schema.with_prefix("priors.")) {
    const std::string name = key.substr(7);
    schema.mark(key);
    try {
      cfg.priors[name] = parse_prior(schema.string(key, ""));
    } catch (const std::invalid_argument& err) {
      throw ConfigError(key + ": " + err.what());
    }
  }
  for (const auto& key : schema.with_prefix("init.")) {
    const std::string name = key.substr(5);
    schema.mark(key);
    param_accessor(name);  // throws on unknown names
    cfg.init_values[name] = schema.number(key, 0.0);
  }

  cfg.virology_swabs_per_week = schema.integer("virology_swabs_per_week", 100);
  if (cfg.virology_swabs_per_week < 0)
    throw ConfigError("virology_swabs_per_week violates >= 0");

  cfg.obs_weekly_path = schema.string("obs_weekly", "");
  cfg.obs_gp_path = schema.string("obs_gp", "");
  cfg.obs_virology_path = schema.string("obs_virology", "");

  schema.check_all_used();

  // full validation, including the calendar
  const Calendar cal = cfg.make_calendar();
  try {
    cfg.params.validate(cal);
  } catch (const std::invalid_argument& err) {
    throw ConfigError(err.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::uint64_t config_fingerprint(const std::string& text) {
  // canonicalize: sorted key=value lines, whitespace collapsed
  KeyMap keys = tokenize(text);
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
  };
  char buf[64];
  for (const auto& [key, value] : keys) {
    mix(key);
    mix("=");
    switch (value.type) {
      case Value::Type::number:
        std::snprintf(buf, sizeof buf, "%.17g", value.num);
        mix(buf);
        break;
      case Value::Type::boolean:
        mix(value.flag ? "true" : "false");
        break;
      case Value::Type::string:
        mix(value.str);
        break;
      case Value::Type::number_array:
        for (double d : value.nums) {
          std::snprintf(buf, sizeof buf, "%.17g,", d);
          mix(buf);
        }
        break;
      case Value::Type::string_array:
        for (const auto& s : value.strs) {
          mix(s);
          mix(",");
        }
        break;
    }
    mix("\n");
  }
  return h;
}

}  // namespace epi
