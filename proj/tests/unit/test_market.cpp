#include <doctest.h>

#include <cmath>
#include <random>

#include "investesg/config.hpp"
#include "investesg/episode.hpp"
#include "investesg/market.hpp"
#include "oracles.hpp"
#include "random_world.hpp"

using namespace investesg;
using namespace investesg::market;
using namespace randomized;

namespace {

oracle::State to_oracle(const MarketState& s) {
  oracle::State o;
  o.period = s.period;
  o.cumulative = s.cumulative_mitigation;
  for (const auto& c : s.companies)
    o.companies.push_back({c.capital, c.esg_score, c.vulnerability, c.cumulative_resilience, c.initial_vulnerability,
                           c.resilience_efficiency, c.bankrupt, c.margin_history});
  for (const auto& inv : s.investors) o.investors.push_back({inv.holdings, inv.cash, inv.esg_preference});
  return o;
}

oracle::Params to_oracle(const MarketParams& p) {
  oracle::Params o;
  o.gamma = p.growth_rate;
  o.beta = p.greenwash_coeff;
  o.disclosure = p.disclosure;
  o.greenwash = p.greenwash_enabled;
  o.resilience = p.resilience_enabled;
  o.strict = p.strict_bankruptcy;
  for (std::size_t e = 0; e < 3; ++e) o.lambda[e] = p.climate.elasticity[e];
  return o;
}

std::vector<oracle::Action> to_oracle(const std::vector<CompanyAction>& a) {
  std::vector<oracle::Action> o;
  for (const auto& x : a) o.push_back({x.mitigation, x.greenwash, x.resilience});
  return o;
}

std::vector<std::vector<int>> to_oracle(const std::vector<InvestorAction>& a) {
  std::vector<std::vector<int>> o;
  for (const auto& x : a) o.push_back(x.invest);
  return o;
}

ScenarioConfig all_invested_no_damage() {
  ScenarioConfig c;
  c.initial_vulnerability = 0.0;
  c.policies.companies.assign(5, {policies::CompanyKind::Defector, {}});
  c.policies.investors.assign(3, {policies::InvestorKind::ProfitDriven});
  return c;
}

}  // namespace

TEST_CASE("redistribution conserves wealth over random steps") {
  std::mt19937_64 rng(11);
  int checked = 0;
  while (checked < 1000) {
    auto w = random_world(rng);
    const int steps = std::uniform_int_distribution<int>(1, 12)(rng);
    for (int s = 0; s < steps && checked < 1000; ++s, ++checked) {
      const auto m = w.state.num_companies(), n = w.state.num_investors();
      auto ca = random_company_actions(m, rng);
      auto ia = random_investor_actions(n, m, rng);
      mask_actions(ca, ia, w.state.companies, w.params);
      const double before = w.state.total_wealth();
      const auto redist = redistribute(w.state, ia);
      double after = 0.0;
      for (double x : redist.interim) after += x;
      for (double x : redist.cash) after += x;
      CHECK(oracle::close_rel(after, before, 1e-9));
      for (std::size_t j = 0; j < n; ++j) {
        double k = w.state.investors[j].cash;
        for (double h : w.state.investors[j].holdings) k += h;
        CHECK(oracle::close_rel(redist.investor_capital[j], k, 1e-12));
      }
      step(w.state, ca, ia, PeriodDraws{random_uniforms(rng), {}}, w.params);
    }
  }
}

TEST_CASE("step matches the reference transition on random trajectories") {
  std::mt19937_64 rng(99);
  for (int world = 0; world < 60; ++world) {
    auto w = random_world(rng);
    auto ref = to_oracle(w.state);
    const auto rp = to_oracle(w.params);
    for (int s = 0; s < 25; ++s) {
      const auto m = w.state.num_companies(), n = w.state.num_investors();
      const auto ca = random_company_actions(m, rng);
      const auto ia = random_investor_actions(n, m, rng);
      const auto u = random_uniforms(rng);
      const auto got = step(w.state, ca, ia, PeriodDraws{u, {}}, w.params);
      const auto want = oracle::step(ref, to_oracle(ca), to_oracle(ia), u, rp);
      REQUIRE(got.events.count == want.events);
      CHECK(w.state.risks.heat == doctest::Approx(want.risks[0]).epsilon(1e-12));
      CHECK(w.state.risks.drought == doctest::Approx(want.risks[2]).epsilon(1e-12));
      CHECK(oracle::close_rel(w.state.cumulative_mitigation, ref.cumulative, 1e-12));
      for (std::size_t i = 0; i < m; ++i) {
        const auto& c = w.state.companies[i];
        const auto& rc = ref.companies[i];
        REQUIRE(c.bankrupt == rc.bankrupt);
        CHECK(oracle::close_rel(c.capital, rc.capital, 1e-10));
        CHECK(oracle::close_rel(c.vulnerability, rc.vulnerability, 1e-12));
        CHECK(c.esg_score == doctest::Approx(rc.esg).epsilon(1e-14));
        CHECK(oracle::close_rel(got.company_rewards[i], want.company_rewards[i], 1e-10));
      }
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(oracle::close_rel(w.state.investors[j].cash, ref.investors[j].cash, 1e-10));
        for (std::size_t i = 0; i < m; ++i)
          CHECK(oracle::close_rel(w.state.investors[j].holdings[i], ref.investors[j].holdings[i], 1e-10));
        CHECK(oracle::close_rel(got.investor_rewards[j], want.investor_rewards[j], 1e-10));
      }
    }
  }
}

TEST_CASE("full investment without damage compounds total wealth at the growth rate") {
  const auto c = all_invested_no_damage();
  const auto record = run_episode(c, {3, 4});
  const double expected = oracle::compound(98.0, 0.1, 100);
  CHECK(std::fabs(record.summary.final_wealth - expected) <= 1e-9 * expected);
  CHECK(std::fabs(98.0 * std::pow(1.1, 100) - expected) <= 1e-12 * expected);
  double prev = 98.0;
  for (const auto& row : record.rows) {
    double w = 0.0;
    for (const auto& co : row.companies) w += co.capital;
    for (const auto& inv : row.investors) w += inv.cash;
    CHECK(oracle::close_rel(w, prev * 1.1, 1e-12));
    prev = w;
  }
}

TEST_CASE("companies alone compound their own capital") {
  auto c = all_invested_no_damage();
  c.num_investors = 0;
  c.policies.investors.clear();
  c.esg_preference.clear();
  const auto record = run_episode(c, {0, 0});
  const double expected = oracle::compound(50.0, 0.1, 100);
  CHECK(std::fabs(record.summary.final_wealth - expected) <= 1e-9 * expected);
}

TEST_CASE("hand-computed single period with one company and one investor") {
  ScenarioConfig c;
  c.num_companies = 1;
  c.num_investors = 1;
  c.esg_preference = {2.0};
  c.features.disclosure = true;
  c.features.resilience = true;
  const auto params = market_params(c);
  auto state = initial_state(c);
  // Uniforms force exactly one event (heat).
  const auto result = step(state, {{0.01, 0.0, 0.02}}, {{{1}}}, PeriodDraws{{0.0, 0.99, 0.99}, {}}, params);
  const double interim = 26.0;
  const double l = 0.05 * std::exp(-5.0 * 0.02);
  const double margin = (1.0 - 0.03) * 1.1 * (1.0 - l) - 1.0;
  CHECK(result.interim[0] == doctest::Approx(interim));
  CHECK(state.companies[0].vulnerability == doctest::Approx(l).epsilon(1e-14));
  CHECK(state.companies[0].capital == doctest::Approx((1.0 + margin) * interim).epsilon(1e-14));
  CHECK(state.investors[0].holdings[0] == doctest::Approx((1.0 + margin) * 16.0).epsilon(1e-14));
  CHECK(state.investors[0].cash == 0.0);
  CHECK(result.company_rewards[0] == doctest::Approx(margin * interim).epsilon(1e-12));
  const double q = 0.01;
  CHECK(state.companies[0].esg_score == doctest::Approx(q));
  CHECK(result.investor_rewards[0] == doctest::Approx(margin + 2.0 * q).epsilon(1e-12));
  CHECK(state.cumulative_mitigation == doctest::Approx(0.26));
  CHECK(state.period == 1);
  CHECK(result.events.count == 1);
}

TEST_CASE("ESG score follows disclosure and greenwash switches") {
  CHECK(compute_esg({0.005, 0.003, 0.0}, 2.0, false) == 0.0);
  CHECK(compute_esg({0.005, 0.003, 0.0}, 2.0, true) == doctest::Approx(0.011));
  CHECK(compute_esg({0.0, 0.003, 0.0}, 20.0, true) == doctest::Approx(0.06));

  ScenarioConfig c;
  c.num_companies = 1;
  c.num_investors = 0;
  c.esg_preference.clear();
  c.features.disclosure = true;
  auto state = initial_state(c);
  const auto params = market_params(c);  // greenwash disabled: g is masked
  const auto r = step(state, {{0.004, 0.003, 0.0}}, {}, PeriodDraws{{0.99, 0.99, 0.99}, {}}, params);
  CHECK(r.applied_actions[0].greenwash == 0.0);
  CHECK(state.companies[0].esg_score == doctest::Approx(0.004));
}

TEST_CASE("overspending bankrupts the company and writes off its investors") {
  ScenarioConfig c;
  c.num_companies = 2;
  c.num_investors = 1;
  c.esg_preference = {0.0};
  c.features.resilience = true;
  c.features.greenwash = true;
  auto state = initial_state(c);
  const auto params = market_params(c);
  const auto r = step(state, {{0.6, 0.3, 0.2}, {0.0, 0.0, 0.0}}, {{{1, 1}}}, PeriodDraws{{0.99, 0.99, 0.99}, {}},
                      params);
  CHECK(state.companies[0].bankrupt);
  CHECK(state.companies[0].capital == 0.0);
  CHECK(state.investors[0].holdings[0] == 0.0);
  CHECK(r.company_rewards[0] == doctest::Approx(-18.0));
  CHECK(r.applied_actions[0] == CompanyAction{});
  CHECK(r.new_bankruptcies == 1);
  CHECK(state.cumulative_mitigation == 0.0);
  CHECK(r.investor_rewards[0] == doctest::Approx((1.1 * 8.0 - 16.0) / 16.0));

  // Next period: the bankrupt company is masked for both sides.
  const auto r2 = step(state, {{0.01, 0.0, 0.0}, {0.0, 0.0, 0.0}}, {{{1, 0}}}, PeriodDraws{{0.99, 0.99, 0.99}, {}},
                       params);
  CHECK(r2.applied_actions[0] == CompanyAction{});
  CHECK(r2.company_rewards[0] == 0.0);
  CHECK(state.investors[0].cash == doctest::Approx(8.8));
  CHECK(r2.investor_rewards[0] == 0.0);
}

TEST_CASE("strict bankruptcy after three margins below minus ten percent") {
  for (bool strict : {false, true}) {
    ScenarioConfig c;
    c.num_companies = 2;
    c.num_investors = 1;
    c.esg_preference = {0.0};
    c.initial_vulnerability = 0.0;
    c.features.strict_bankruptcy = strict;
    auto state = initial_state(c);
    const auto params = market_params(c);
    // Mitigating 20% leaves a margin of 0.8 * 1.1 - 1 = -0.12.
    for (int t = 0; t < 3; ++t) {
      CHECK_FALSE(state.companies[0].bankrupt);
      const auto r = step(state, {{0.2, 0.0, 0.0}, {0.0, 0.0, 0.0}}, {{{1, 1}}}, PeriodDraws{{0.99, 0.99, 0.99}, {}},
                          params);
      CHECK(r.margins[0] == doctest::Approx(-0.12));
      CHECK(r.new_bankruptcies == (strict && t == 2 ? 1 : 0));
    }
    CHECK(state.companies[0].bankrupt == strict);
    CHECK_FALSE(state.companies[1].bankrupt);
    if (strict) {
      CHECK(state.companies[0].capital == 0.0);
      CHECK(state.investors[0].holdings[0] == 0.0);
    }
  }
  const std::vector<double> two{-0.2, -0.2};
  const std::vector<double> broken{-0.2, -0.05, -0.2};
  const std::vector<double> three{-0.2, -0.11, -0.3};
  CHECK_FALSE(check_strict_bankruptcy(two));
  CHECK_FALSE(check_strict_bankruptcy(broken));
  CHECK(check_strict_bankruptcy(three));
}

TEST_CASE("stepping past the horizon is an error") {
  ScenarioConfig c;
  c.horizon = 2;
  auto state = initial_state(c);
  const auto params = market_params(c);
  std::vector<InvestorAction> ia(3, InvestorAction{std::vector<int>(5, 0)});
  std::vector<CompanyAction> ca(5);
  step(state, ca, ia, PeriodDraws{{0.5, 0.5, 0.5}, {}}, params);
  step(state, ca, ia, PeriodDraws{{0.5, 0.5, 0.5}, {}}, params);
  CHECK_THROWS_AS(step(state, ca, ia, PeriodDraws{{0.5, 0.5, 0.5}, {}}, params), EpisodeCompleteError);
}

TEST_CASE("malformed actions are rejected") {
  ScenarioConfig c;
  auto state = initial_state(c);
  const auto params = market_params(c);
  std::vector<InvestorAction> ia(3, InvestorAction{std::vector<int>(5, 0)});
  std::vector<CompanyAction> ca(5);
  CHECK_THROWS_AS(step(state, std::vector<CompanyAction>(4), ia, {}, params), std::invalid_argument);
  CHECK_THROWS_AS(step(state, ca, std::vector<InvestorAction>(2, ia[0]), {}, params), std::invalid_argument);
  auto bad = ca;
  bad[1].mitigation = -0.1;
  CHECK_THROWS_AS(step(state, bad, ia, {}, params), std::invalid_argument);
  auto short_flags = ia;
  short_flags[0].invest.pop_back();
  CHECK_THROWS_AS(step(state, ca, short_flags, {}, params), std::invalid_argument);
  CHECK(state.period == 0);
}

TEST_CASE("observation layout") {
  ScenarioConfig c;
  const auto state = initial_state(c);
  auto params = market_params(c);
  CHECK(observation_size(5, 3, false) == 3 * 5 + 6 * 3);
  CHECK(observation_size(5, 3, true) == 3 * 5 + 6 * 3 + 6);
  CHECK(observation_size(25, 25, false) == 75 + 26 * 25);
  const auto obs = observe(state, params, false);
  REQUIRE(obs.size() == 33);
  CHECK(obs[0] == 10.0);
  CHECK(obs[2] == 0.05);
  CHECK(obs[15 + 5] == 16.0);  // first investor cash follows its five holdings
  const auto rich = observe(state, params, true);
  REQUIRE(rich.size() == 39);
  CHECK(rich[33] == 0.28);
  CHECK(rich[38] == 0.0);
}

TEST_CASE("Gaussian damage clips the per-event vulnerability draw") {
  climate::EventOutcome ev{true, false, true, 2};
  const std::vector<double> normals{40.0, 0.0, -10.0};
  CHECK(event_loss(ev, 0.05, normals, 0.025) == doctest::Approx(1.0 + 0.0));
  const std::vector<double> mild{0.4, 5.0, -0.2};
  CHECK(event_loss(ev, 0.05, mild, 0.025) == doctest::Approx(0.06 + 0.045));
  CHECK(event_loss(ev, 0.05, {}, 0.025) == doctest::Approx(0.1));
}
