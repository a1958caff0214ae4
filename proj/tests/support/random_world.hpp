#pragma once

// Random market worlds and actions for property tests.

#include <array>
#include <random>
#include <vector>

#include "investesg/config.hpp"
#include "investesg/market.hpp"

namespace randomized {

using namespace investesg;
using namespace investesg::market;

struct RandomWorld {
  ScenarioConfig config;
  MarketParams params;
  MarketState state;
};

inline RandomWorld random_world(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> agents(1, 25), investors(0, 25);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomWorld w;
  auto& c = w.config;
  c.num_companies = agents(rng);
  c.num_investors = investors(rng);
  c.company_capital = 1.0 + 20.0 * u(rng);
  c.investor_capital = 1.0 + 30.0 * u(rng);
  c.initial_vulnerability = 0.2 * u(rng);
  c.features.disclosure = u(rng) < 0.5;
  c.features.greenwash = u(rng) < 0.5;
  c.features.resilience = u(rng) < 0.5;
  c.features.strict_bankruptcy = u(rng) < 0.5;
  c.esg_preference.clear();
  for (int j = 0; j < c.num_investors; ++j) c.esg_preference.push_back(u(rng) < 0.5 ? 0.0 : 10.0 * u(rng));
  w.params = market_params(c);
  w.state = initial_state(c);
  return w;
}

// Mostly feasible spending; occasionally heavy enough to push margins down
// or to overspend outright.
inline std::vector<CompanyAction> random_company_actions(std::size_t m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<CompanyAction> a(m);
  for (auto& x : a) {
    const double kind = u(rng);
    if (kind < 0.6)
      x = {0.01 * u(rng), 0.01 * u(rng), 0.01 * u(rng)};
    else if (kind < 0.97)
      x = {0.3 * u(rng), 0.1 * u(rng), 0.1 * u(rng)};
    else
      x = {0.5 + 0.5 * u(rng), 0.3 * u(rng), 0.3 * u(rng)};
  }
  return a;
}

inline std::vector<InvestorAction> random_investor_actions(std::size_t n, std::size_t m, std::mt19937_64& rng) {
  std::bernoulli_distribution flip(0.5);
  std::vector<InvestorAction> a(n);
  for (auto& x : a) {
    x.invest.resize(m);
    for (auto& f : x.invest) f = flip(rng) ? 1 : 0;
  }
  return a;
}

inline std::array<double, 3> random_uniforms(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return {u(rng), u(rng), u(rng)};
}

}  // namespace randomized
