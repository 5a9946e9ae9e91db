#include <doctest.h>

#include <algorithm>
#include <random>

#include "epi/transmission.hpp"
#include "test_util.hpp"

using namespace epi;

namespace {

ParamSet section4_params() {
  ParamSet p;
  p.beta = 0.63;
  p.pi = 0.3;
  p.iota = 1e-4;
  p.sigma = 0.25;
  p.gamma = 1.0 / 3.5;
  p.n_pop = 10000.0;
  return p;
}

}  // namespace

TEST_CASE("no seed infection means no epidemic") {
  ParamSet p = section4_params();
  p.iota = 0.0;
  const Calendar cal(100);
  const auto traj = solve_transmission_full(p, cal);
  for (double v : traj.xi.xi0) CHECK(v == 0.0);
  for (double s : traj.s) CHECK(s == doctest::Approx(0.7 * p.n_pop));
}

TEST_CASE("no transmission means no new infections") {
  ParamSet p = section4_params();
  p.beta = 1e-300;  // rates must stay positive; this is numerically zero
  const Calendar cal(100);
  const auto xi = solve_transmission(p, cal);
  for (double v : xi.xi0) CHECK(v == doctest::Approx(0.0).epsilon(1e-20));
}

TEST_CASE("conservation and monotonicity on the section-4 scenario") {
  const ParamSet p = section4_params();
  const Calendar cal = Calendar::from_weeks(33);
  const auto traj = solve_transmission_full(p, cal);
  double cumulative = 0.0;
  for (int u = 0; u <= cal.n_days(); ++u) {
    const double total =
        traj.s[u] + traj.e_total[u] + traj.i_total[u] + traj.r[u];
    CHECK(std::fabs(total - p.n_pop) <= 1e-6 * p.n_pop);
    if (u < cal.n_days()) {
      CHECK(traj.xi.xi0[u] >= 0.0);
      CHECK(traj.s[u + 1] <= traj.s[u] + 1e-12);
      cumulative += traj.xi.xi0[u];
    }
  }
  CHECK(cumulative <= p.n_pop);
}

TEST_CASE("conservation holds for random admissible parameters") {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int rep = 0; rep < 25; ++rep) {
    ParamSet p;
    p.beta = 0.05 + 2.0 * unif(rng);
    p.pi = 0.8 * unif(rng);
    p.iota = 0.1 * unif(rng) * (1.0 - p.pi);
    p.sigma = 0.05 + 3.0 * unif(rng);
    p.gamma = 0.05 + 3.0 * unif(rng);
    p.n_pop = 1000.0 + 100000.0 * unif(rng);
    const StageCounts stages{1 + static_cast<int>(rng() % 2),
                             1 + static_cast<int>(rng() % 2)};
    const Calendar cal(60);
    const auto traj = solve_transmission_full(p, cal, stages, 20);
    for (int u = 0; u <= 60; ++u) {
      const double total =
          traj.s[u] + traj.e_total[u] + traj.i_total[u] + traj.r[u];
      CHECK(std::fabs(total - p.n_pop) <= 1e-6 * p.n_pop);
      CHECK(traj.s[u] >= -1e-9);
      CHECK(traj.e_total[u] >= -1e-9);
      CHECK(traj.i_total[u] >= -1e-9);
      CHECK(traj.r[u] >= -1e-9);
    }
  }
}

TEST_CASE("deterministic: identical inputs give bit-identical output") {
  const ParamSet p = section4_params();
  const Calendar cal = Calendar::from_weeks(20);
  const auto a = solve_transmission(p, cal, StageCounts{2, 2});
  const auto b = solve_transmission(p, cal, StageCounts{2, 2});
  REQUIRE(a.xi0.size() == b.xi0.size());
  for (std::size_t u = 0; u < a.xi0.size(); ++u) CHECK(a.xi0[u] == b.xi0[u]);
}

TEST_CASE("agreement with the fine-step integrator oracle") {
  const ParamSet p = section4_params();
  const Calendar cal = Calendar::from_weeks(33);
  const auto xi = solve_transmission(p, cal).xi0;
  const auto oracle = epitest::euler_seir_daily(p, cal, 1, 1, 0.01);

  const auto peak = std::max_element(xi.begin(), xi.end()) - xi.begin();
  const auto peak_oracle =
      std::max_element(oracle.begin(), oracle.end()) - oracle.begin();
  CHECK(std::abs(peak - peak_oracle) <= 1);

  double final_size = 0.0, final_oracle = 0.0, sup = 0.0, scale = 0.0;
  for (std::size_t u = 0; u < xi.size(); ++u) {
    final_size += xi[u];
    final_oracle += oracle[u];
    sup = std::max(sup, std::fabs(xi[u] - oracle[u]));
    scale = std::max(scale, std::fabs(oracle[u]));
  }
  CHECK(std::fabs(final_size - final_oracle) / final_oracle <= 1e-3);
  CHECK(sup / scale <= 1e-2);

  // single interior peak: rises then falls
  CHECK(peak > 0);
  CHECK(peak < static_cast<long>(xi.size()) - 1);
  for (long u = 1; u <= peak; ++u) CHECK(xi[u] >= xi[u - 1] - 1e-9);
  for (long u = peak + 1; u < static_cast<long>(xi.size()); ++u)
    CHECK(xi[u] <= xi[u - 1] + 1e-9);
}

TEST_CASE("school closures scale transmission inside the window") {
  ParamSet p = section4_params();
  p.iota = 0.01;
  p.kappa = 0.2;
  const Calendar closed(70, {{0, 69}});
  const Calendar open(70);
  const auto xi_closed = solve_transmission(p, closed);
  const auto xi_open = solve_transmission(p, open);
  CHECK(xi_closed.total() < xi_open.total());

  // kappa = 1 makes closures a no-op
  p.kappa = 1.0;
  const auto xi_noop = solve_transmission(p, closed);
  for (std::size_t u = 0; u < xi_noop.xi0.size(); ++u)
    CHECK(xi_noop.xi0[u] == solve_transmission(p, open).xi0[u]);
}

TEST_CASE("reproduction number") {
  ParamSet p;
  p.beta = 0.4;
  p.gamma = 0.4;
  p.pi = 0.0;
  CHECK(reproduction_number(p) == doctest::Approx(1.0));

  p.beta = 0.63;
  p.gamma = 1.0 / 3.5;
  p.pi = 0.3;
  CHECK(reproduction_number(p) == doctest::Approx(0.63 * 3.5 * 0.7));
  CHECK(reproduction_number(p) == doctest::Approx(1.5435));

  p.pi = 1.0;
  CHECK(reproduction_number(p) == doctest::Approx(0.0));
}
