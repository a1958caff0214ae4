#include "investesg/episode.hpp"

#include <random>

namespace investesg {

std::size_t seeded_company_count(std::size_t num_companies) { return (num_companies + 1) / 2; }

ScriptedController::ScriptedController(std::vector<policies::ScriptedCompanyPolicy> companies,
                                       std::vector<policies::ScriptedInvestorPolicy> investors)
    : companies_(std::move(companies)), investors_(std::move(investors)) {}

ScriptedController::ScriptedController(const ScenarioConfig& config)
    : ScriptedController(company_policies(config), investor_policies(config)) {}

void ScriptedController::act(const DecisionContext& ctx, PolicyRng& /*rng*/,
                             std::vector<market::CompanyAction>& companies,
                             std::vector<market::InvestorAction>& investors) {
  if (companies_.size() != ctx.active.size() || investors_.size() != ctx.state->num_investors())
    throw std::invalid_argument("scripted policy count does not match the agent count");
  companies.resize(companies_.size());
  for (std::size_t i = 0; i < companies_.size(); ++i)
    companies[i] = policies::company_action(companies_[i], !ctx.active[i]);
  investors.resize(investors_.size());
  for (std::size_t j = 0; j < investors_.size(); ++j)
    investors[j] = policies::investor_action(investors_[j], ctx.disclosed_esg, ctx.active);
}

Episode::Episode(const ScenarioConfig& config, SeedPair seeds, bool record_rows)
    : config_(config), seeds_(seeds), record_rows_(record_rows) {
  config_.validate();
  params_ = market_params(config_);
  state_ = initial_state(config_);
  stream_ = ClimateStream(seeds.climate, config_.horizon, state_.num_companies(),
                          config_.features.gaussian_damage.enabled);
  policy_rng_ = make_policy_rng(seeds.policy);
  const auto& seeding = config_.features.real_data_seeding;
  if (seeding.enabled) {
    std::uniform_real_distribution<double> draw(seeding.low, seeding.high);
    seeded_fraction_ = draw(policy_rng_);
  }
  company_returns_.assign(state_.num_companies(), 0.0);
  investor_returns_.assign(state_.num_investors(), 0.0);
  disclosed_.assign(state_.num_companies(), 0.0);
  active_ = std::make_unique<bool[]>(state_.num_companies());
  refresh_context();
}

bool Episode::company_decision_period() const {
  const int lock = config_.features.lock_in_years;
  return lock <= 0 || locked_.empty() || state_.period % lock == 0;
}

std::optional<double> Episode::seeded_mitigation(std::size_t company) const {
  const auto& seeding = config_.features.real_data_seeding;
  if (!seeding.enabled || state_.period >= seeding.periods) return std::nullopt;
  if (company >= seeded_company_count(state_.num_companies())) return std::nullopt;
  return seeded_fraction_;
}

void Episode::refresh_context() {
  for (std::size_t i = 0; i < state_.num_companies(); ++i) {
    const auto& c = state_.companies[i];
    active_[i] = !c.bankrupt;
    disclosed_[i] = params_.disclosure && !c.bankrupt ? c.esg_score : 0.0;
  }
}

DecisionContext Episode::context() const {
  return DecisionContext{state_.period, &state_, disclosed_,
                         std::span<const bool>(active_.get(), state_.num_companies())};
}

std::vector<double> Episode::observation() const {
  return market::observe(state_, params_, config_.features.more_info);
}

const market::StepResult& Episode::step(std::vector<market::CompanyAction> companies,
                                        std::vector<market::InvestorAction> investors) {
  if (done())
    throw market::EpisodeCompleteError("episode already reached its horizon of " +
                                       std::to_string(params_.climate.horizon) + " periods");
  if (companies.size() != state_.num_companies())
    throw std::invalid_argument("expected " + std::to_string(state_.num_companies()) + " company actions, got " +
                                std::to_string(companies.size()));
  if (company_decision_period()) {
    locked_ = companies;
  } else {
    companies = locked_;
  }
  for (std::size_t i = 0; i < companies.size(); ++i) {
    if (auto seeded = seeded_mitigation(i)) companies[i].mitigation = *seeded;
  }
  last_ = market::step(state_, std::move(companies), std::move(investors), stream_.draws(state_.period), params_);
  events_total_ += last_.events.count;
  for (std::size_t i = 0; i < company_returns_.size(); ++i) company_returns_[i] += last_.company_rewards[i];
  for (std::size_t j = 0; j < investor_returns_.size(); ++j) investor_returns_[j] += last_.investor_rewards[j];
  if (record_rows_) rows_.push_back(make_row(state_, last_));
  refresh_context();
  return last_;
}

EpisodeSummary Episode::summary() const {
  EpisodeSummary s;
  s.periods = state_.period;
  s.final_risk = climate::overall_risk(state_.risks);
  s.final_wealth = state_.total_wealth();
  s.events_total = events_total_;
  for (const auto& c : state_.companies) s.bankruptcies += c.bankrupt ? 1 : 0;
  s.cumulative_mitigation = state_.cumulative_mitigation;
  s.company_returns = company_returns_;
  s.investor_returns = investor_returns_;
  return s;
}

EpisodeRecord Episode::take_record() {
  EpisodeRecord r;
  r.seeds = seeds_;
  r.summary = summary();
  r.rows = std::move(rows_);
  rows_.clear();
  return r;
}

PeriodRow make_row(const market::MarketState& state, const market::StepResult& step) {
  PeriodRow row;
  row.t = state.period;
  row.risks = state.risks;
  row.overall_risk = climate::overall_risk(state.risks);
  row.events = step.events;
  row.companies.resize(state.num_companies());
  for (std::size_t i = 0; i < state.num_companies(); ++i) {
    const auto& c = state.companies[i];
    row.companies[i] = CompanyRow{c.capital,   c.esg_score, c.vulnerability, step.applied_actions[i],
                                  step.company_rewards[i], c.bankrupt};
  }
  row.investors.resize(state.num_investors());
  for (std::size_t j = 0; j < state.num_investors(); ++j) {
    const auto& inv = state.investors[j];
    row.investors[j] = InvestorRow{inv.holdings, inv.cash, step.investor_rewards[j]};
  }
  return row;
}

double final_risk_from_rows(const std::vector<PeriodRow>& rows, const ScenarioConfig& config) {
  if (rows.empty()) return climate::overall_risk(climate_params(config).base);
  return climate::overall_risk(rows.back().risks);
}

double final_wealth_from_rows(const std::vector<PeriodRow>& rows, const ScenarioConfig& config) {
  if (rows.empty()) return initial_state(config).total_wealth();
  const auto& last = rows.back();
  double total = 0.0;
  for (const auto& c : last.companies) total += c.capital;
  for (const auto& inv : last.investors) total += inv.cash;
  return total;
}

EpisodeRecord run_episode(const ScenarioConfig& config, SeedPair seeds, Controller& controller, bool record_rows) {
  Episode episode(config, seeds, record_rows);
  std::vector<market::CompanyAction> companies;
  std::vector<market::InvestorAction> investors;
  while (!episode.done()) {
    controller.act(episode.context(), episode.policy_rng(), companies, investors);
    episode.step(companies, investors);
  }
  return episode.take_record();
}

EpisodeRecord run_episode(const ScenarioConfig& config, SeedPair seeds, bool record_rows) {
  ScriptedController controller(config);
  return run_episode(config, seeds, controller, record_rows);
}

}  // namespace investesg
