#include "investesg/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace investesg::market {

int InvestorAction::count() const {
  int n = 0;
  for (int flag : invest) n += flag != 0 ? 1 : 0;
  return n;
}

double InvestorState::total_capital() const {
  double total = 0.0;
  for (double h : holdings) total += h;
  return total + cash;
}

double MarketState::total_wealth() const {
  double total = 0.0;
  for (const auto& c : companies) total += c.capital;
  // Holdings are already inside company capital, so investors add only cash.
  for (const auto& inv : investors) total += inv.cash;
  return total;
}

MarketState initial_state(std::size_t num_companies, std::size_t num_investors,
                          double company_capital, double investor_capital,
                          std::span<const double> esg_preferences, double initial_vulnerability,
                          double resilience_efficiency, const climate::ClimateParams& climate) {
  MarketState state;
  state.risks = climate.base;
  state.companies.resize(num_companies);
  for (auto& c : state.companies) {
    c.capital = company_capital;
    c.vulnerability = initial_vulnerability;
    c.initial_vulnerability = initial_vulnerability;
    c.resilience_efficiency = resilience_efficiency;
  }
  state.investors.resize(num_investors);
  for (std::size_t j = 0; j < num_investors; ++j) {
    auto& inv = state.investors[j];
    inv.holdings.assign(num_companies, 0.0);
    inv.cash = investor_capital;
    inv.esg_preference = j < esg_preferences.size() ? esg_preferences[j] : 0.0;
  }
  return state;
}

void mask_actions(std::span<CompanyAction> company_actions, std::span<InvestorAction> investor_actions,
                  std::span<const CompanyState> companies, const MarketParams& params) {
  for (std::size_t i = 0; i < company_actions.size(); ++i) {
    auto& a = company_actions[i];
    if (companies[i].bankrupt) {
      a = CompanyAction{};
      continue;
    }
    if (!params.greenwash_enabled) a.greenwash = 0.0;
    if (!params.resilience_enabled) a.resilience = 0.0;
  }
  for (auto& inv : investor_actions) {
    for (std::size_t i = 0; i < inv.invest.size(); ++i) {
      inv.invest[i] = (inv.invest[i] != 0 && !companies[i].bankrupt) ? 1 : 0;
    }
  }
}

Redistribution redistribute(const MarketState& state, std::span<const InvestorAction> actions) {
  const std::size_t m = state.num_companies();
  const std::size_t n = state.num_investors();
  Redistribution out;
  out.investor_capital.resize(n);
  out.share.assign(n, 0.0);
  out.cash.assign(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const double k = state.investors[j].total_capital();
    const int chosen = actions[j].count();
    out.investor_capital[j] = k;
    if (chosen == 0) {
      out.cash[j] = k;
    } else {
      out.share[j] = k / chosen;
    }
  }
  out.interim.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    double withdrawn = 0.0;
    double invested = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      withdrawn += state.investors[j].holdings[i];
      if (actions[j].invest[i] != 0) invested += out.share[j];
    }
    out.interim[i] = state.companies[i].capital - withdrawn + invested;
  }
  return out;
}

SpendingResult apply_spending(double interim, const CompanyAction& action, const CompanyState& company) {
  SpendingResult r;
  r.cumulative_resilience = company.cumulative_resilience;
  if (action.mitigation + action.greenwash + action.resilience > 1.0) {
    r.overspend = true;
    return r;
  }
  r.mitigation_spend = action.mitigation * interim;
  r.cumulative_resilience = company.cumulative_resilience + action.resilience * interim;
  return r;
}

double update_vulnerability(const CompanyState& company, double resilience_frac, double interim) {
  if (!(interim > 0.0))
    throw InvariantViolation("active company with non-positive interim capital");
  const double ratio = (company.cumulative_resilience + resilience_frac * interim) / interim;
  return company.initial_vulnerability * std::exp(-company.resilience_efficiency * ratio);
}

double compute_esg(const CompanyAction& action, double greenwash_coeff, bool disclosure_enabled) {
  if (!disclosure_enabled) return 0.0;
  return action.mitigation + greenwash_coeff * action.greenwash;
}

double profit_margin(const CompanyAction& action, double growth_rate, double event_loss) {
  const double retained = 1.0 - action.mitigation - action.greenwash - action.resilience;
  return retained * (1.0 + growth_rate) * (1.0 - event_loss) - 1.0;
}

double event_loss(const climate::EventOutcome& events, double vulnerability,
                  std::span<const double> normals, double sigma) {
  if (normals.empty()) return events.count * vulnerability;
  double loss = 0.0;
  for (std::size_t e = 0; e < climate::kNumEvents; ++e) {
    if (events.occurred(e)) loss += climate::clamp_probability(vulnerability + sigma * normals[e]);
  }
  return loss;
}

int settle(MarketState& state, const Redistribution& redist, std::span<const InvestorAction> actions,
           std::span<const double> margins) {
  const std::size_t m = state.num_companies();
  int failed = 0;
  for (std::size_t i = 0; i < m; ++i) {
    auto& c = state.companies[i];
    if (c.bankrupt) {
      c.capital = 0.0;
      continue;
    }
    const double next = (1.0 + margins[i]) * redist.interim[i];
    if (next <= 0.0) {
      c.bankrupt = true;
      c.capital = 0.0;
      ++failed;
    } else {
      c.capital = next;
    }
  }
  for (std::size_t j = 0; j < state.num_investors(); ++j) {
    auto& inv = state.investors[j];
    for (std::size_t i = 0; i < m; ++i) {
      const bool held = actions[j].invest[i] != 0 && !state.companies[i].bankrupt;
      inv.holdings[i] = held ? (1.0 + margins[i]) * redist.share[j] : 0.0;
    }
    inv.cash = redist.cash[j];
  }
  return failed;
}

double company_reward(double capital_next, double interim) { return capital_next - interim; }

double investor_reward(double capital_before, const InvestorState& after,
                       std::span<const double> esg_scores) {
  if (!(capital_before > 0.0)) return 0.0;
  const double capital_after = after.total_capital();
  const double ret = (capital_after - capital_before) / capital_before;
  if (!(capital_after > 0.0) || after.esg_preference == 0.0) return ret;
  double weighted = 0.0;
  for (std::size_t i = 0; i < after.holdings.size(); ++i) weighted += after.holdings[i] * esg_scores[i];
  return ret + after.esg_preference * (weighted / capital_after);
}

bool check_strict_bankruptcy(std::span<const double> margin_history) {
  if (margin_history.size() < kStrictWindow) return false;
  return std::all_of(margin_history.end() - kStrictWindow, margin_history.end(),
                     [](double m) { return m < kStrictMarginThreshold; });
}

namespace {

void validate_actions(const MarketState& state, std::span<const CompanyAction> company_actions,
                      std::span<const InvestorAction> investor_actions) {
  if (company_actions.size() != state.num_companies())
    throw std::invalid_argument("expected " + std::to_string(state.num_companies()) +
                                " company actions, got " + std::to_string(company_actions.size()));
  if (investor_actions.size() != state.num_investors())
    throw std::invalid_argument("expected " + std::to_string(state.num_investors()) +
                                " investor actions, got " + std::to_string(investor_actions.size()));
  auto in_unit = [](double x) { return x >= 0.0 && x <= 1.0; };
  for (const auto& a : company_actions) {
    if (!in_unit(a.mitigation) || !in_unit(a.greenwash) || !in_unit(a.resilience))
      throw std::invalid_argument("company action components must lie in [0,1]");
  }
  for (const auto& a : investor_actions) {
    if (a.invest.size() != state.num_companies())
      throw std::invalid_argument("investor action length must equal the number of companies");
  }
}

}  // namespace

StepResult step(MarketState& state, std::vector<CompanyAction> company_actions,
                std::vector<InvestorAction> investor_actions, const PeriodDraws& draws,
                const MarketParams& params) {
  if (state.period >= params.climate.horizon)
    throw EpisodeCompleteError("episode already reached its horizon of " +
                               std::to_string(params.climate.horizon) + " periods");
  validate_actions(state, company_actions, investor_actions);
  const std::size_t m = state.num_companies();
  const std::size_t n = state.num_investors();

  mask_actions(company_actions, investor_actions, state.companies, params);

  StepResult out;
  out.company_rewards.assign(m, 0.0);
  out.investor_rewards.assign(n, 0.0);
  out.margins.assign(m, 0.0);

  std::vector<bool> active(m);
  for (std::size_t i = 0; i < m; ++i) active[i] = !state.companies[i].bankrupt;

  const Redistribution redist = redistribute(state, investor_actions);

  // Spending. Overspenders fail before anything is booked.
  for (std::size_t i = 0; i < m; ++i) {
    if (!active[i]) continue;
    auto& c = state.companies[i];
    const auto spend = apply_spending(redist.interim[i], company_actions[i], c);
    if (spend.overspend) {
      c.bankrupt = true;
      company_actions[i] = CompanyAction{};
      ++out.new_bankruptcies;
      continue;
    }
    state.cumulative_mitigation += spend.mitigation_spend;
    out.mitigation_spend += spend.mitigation_spend;
    out.greenwash_spend += company_actions[i].greenwash * redist.interim[i];
    out.resilience_spend += company_actions[i].resilience * redist.interim[i];
    c.vulnerability = update_vulnerability(c, company_actions[i].resilience, redist.interim[i]);
    c.cumulative_resilience = spend.cumulative_resilience;
    c.esg_score = compute_esg(company_actions[i], params.greenwash_coeff, params.disclosure);
  }

  state.risks = climate::risk_at(state.period + 1, state.cumulative_mitigation, params.climate);
  out.events = climate::sample_events(state.risks, draws.uniforms);

  for (std::size_t i = 0; i < m; ++i) {
    const auto& c = state.companies[i];
    if (c.bankrupt) continue;
    std::span<const double> normals;
    if (params.gaussian_damage) normals = draws.damage_normals.subspan(i * climate::kNumEvents, climate::kNumEvents);
    const double loss = event_loss(out.events, c.vulnerability, normals, params.damage_sigma);
    out.margins[i] = profit_margin(company_actions[i], params.growth_rate, loss);
  }

  out.new_bankruptcies += settle(state, redist, investor_actions, out.margins);

  for (std::size_t i = 0; i < m; ++i) {
    if (active[i]) out.company_rewards[i] = company_reward(state.companies[i].capital, redist.interim[i]);
  }
  std::vector<double> esg(m);
  for (std::size_t i = 0; i < m; ++i) esg[i] = state.companies[i].esg_score;
  for (std::size_t j = 0; j < n; ++j)
    out.investor_rewards[j] = investor_reward(redist.investor_capital[j], state.investors[j], esg);

  for (std::size_t i = 0; i < m; ++i) {
    auto& c = state.companies[i];
    if (c.bankrupt) continue;
    c.margin_history.push_back(out.margins[i]);
    if (c.margin_history.size() > kStrictWindow) c.margin_history.erase(c.margin_history.begin());
    if (params.strict_bankruptcy && check_strict_bankruptcy(c.margin_history)) {
      c.bankrupt = true;
      c.capital = 0.0;
      for (auto& inv : state.investors) inv.holdings[i] = 0.0;
      ++out.new_bankruptcies;
    }
  }

  out.interim = redist.interim;
  out.applied_actions = std::move(company_actions);
  state.last_events = out.events;
  ++state.period;
  return out;
}

std::size_t observation_size(std::size_t num_companies, std::size_t num_investors, bool more_info) {
  return 3 * num_companies + (num_companies + 1) * num_investors + (more_info ? 6 : 0);
}

std::vector<double> observe(const MarketState& state, const MarketParams& params, bool more_info) {
  std::vector<double> obs;
  obs.reserve(observation_size(state.num_companies(), state.num_investors(), more_info));
  for (const auto& c : state.companies) {
    if (c.bankrupt) {
      obs.insert(obs.end(), {0.0, 0.0, 0.0});
      continue;
    }
    obs.push_back(c.capital);
    obs.push_back(params.disclosure ? c.esg_score : 0.0);
    obs.push_back(c.vulnerability);
  }
  for (const auto& inv : state.investors) {
    obs.insert(obs.end(), inv.holdings.begin(), inv.holdings.end());
    obs.push_back(inv.cash);
  }
  if (more_info) {
    obs.push_back(state.risks.heat);
    obs.push_back(state.risks.precip);
    obs.push_back(state.risks.drought);
    obs.push_back(state.last_events.heat ? 1.0 : 0.0);
    obs.push_back(state.last_events.precip ? 1.0 : 0.0);
    obs.push_back(state.last_events.drought ? 1.0 : 0.0);
  }
  return obs;
}

}  // namespace investesg::market
