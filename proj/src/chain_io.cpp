#include "epi/chain_io.hpp"

#include <fstream>
#include <json.hpp>
#include <stdexcept>

namespace epi {

using nlohmann::json;

namespace {

json finite_or_string(double v) {
  // JSON has no -inf; serialize degenerate log-likelihoods as a string tag
  if (std::isfinite(v)) return v;
  return v < 0 ? json("-inf") : json("inf");
}

double from_finite_or_string(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    throw std::runtime_error("chain record: bad numeric tag '" + s + "'");
  }
  return j.get<double>();
}

}  // namespace

void save_chain(const ChainResult& chain, const std::string& path) {
  if (chain.records.empty())
    throw std::invalid_argument("save_chain: empty chain");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_chain: cannot open " + path);
  for (const auto& rec : chain.records) {
    json j;
    j["iter"] = rec.iter;
    j["post_burnin"] = rec.post_burnin;
    j["accepted"] = rec.accepted;
    j["log_lik"] = finite_or_string(rec.log_lik);
    j["mc_se"] = rec.mc_se;
    j["log_prior"] = finite_or_string(rec.log_prior);
    j["kind"] = to_string(chain.lik_kind);
    j["n_particles"] = chain.n_particles;
    json params = json::object();
    for (std::size_t i = 0; i < chain.param_names.size(); ++i)
      params[chain.param_names[i]] = rec.values[i];
    j["params"] = std::move(params);
    out << j.dump() << '\n';
  }
  if (!out) throw std::runtime_error("save_chain: write failed for " + path);
}

ChainResult load_chain(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_chain: cannot open " + path);
  ChainResult chain;
  std::string line;
  long long accepted = 0, post = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    ChainRecord rec;
    rec.iter = j.at("iter").get<long long>();
    rec.post_burnin = j.at("post_burnin").get<bool>();
    rec.accepted = j.at("accepted").get<bool>();
    rec.log_lik = from_finite_or_string(j.at("log_lik"));
    rec.mc_se = j.at("mc_se").get<double>();
    rec.log_prior = from_finite_or_string(j.at("log_prior"));
    if (chain.param_names.empty()) {
      for (const auto& [key, value] : j.at("params").items())
        chain.param_names.push_back(key);
      chain.n_particles = j.at("n_particles").get<int>();
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "exact_independent")
        chain.lik_kind = LikKind::exact_independent;
      else if (kind == "mc_joint_icu_first")
        chain.lik_kind = LikKind::mc_joint_icu_first;
      else if (kind == "mc_joint_hosp_first")
        chain.lik_kind = LikKind::mc_joint_hosp_first;
      else if (kind == "brute_force")
        chain.lik_kind = LikKind::brute_force;
    }
    rec.values.reserve(chain.param_names.size());
    for (const auto& name : chain.param_names)
      rec.values.push_back(j.at("params").at(name).get<double>());
    if (rec.post_burnin) {
      ++post;
      if (rec.accepted) ++accepted;
    }
    chain.records.push_back(std::move(rec));
  }
  if (chain.records.empty())
    throw std::runtime_error("load_chain: no records in " + path);
  chain.accept_rate =
      post > 0 ? static_cast<double>(accepted) / static_cast<double>(post) : 0.0;
  return chain;
}

void save_summary_csv(const ChainSummary& summary, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_summary_csv: cannot open " + path);
  out << "param,mean,var,median,q025,q975,r95,ess,accept_rate\n";
  char buf[512];
  for (const auto& row : summary.rows) {
    std::snprintf(buf, sizeof buf,
                  "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  row.name.c_str(), row.stats.mean, row.stats.var,
                  row.stats.median, row.stats.q025, row.stats.q975,
                  row.stats.r95, row.stats.ess, summary.accept_rate);
    out << buf;
  }
}

}  // namespace epi
