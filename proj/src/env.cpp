#include "investesg/env.hpp"

#include <cmath>

namespace investesg {

Env::Env(const ScenarioConfig& config) : config_(config) {
  config_.validate();
  episode_.emplace(config_, config_.seeds, true);
}

Env Env::from_document(std::string_view text) {
  auto config = parse_config(text);
  config.validate();
  return Env(config);
}

std::vector<double> Env::reset(SeedPair seeds) {
  if (config_.features.fixed_climate_seed) seeds.climate = config_.seeds.climate;
  episode_.emplace(config_, seeds, true);
  return episode_->observation();
}

std::size_t Env::observation_size() const {
  return market::observation_size(static_cast<std::size_t>(config_.num_companies),
                                  static_cast<std::size_t>(config_.num_investors), config_.features.more_info);
}

std::size_t Env::company_action_size() const { return 3 * static_cast<std::size_t>(config_.num_companies); }

std::size_t Env::investor_action_size() const {
  return static_cast<std::size_t>(config_.num_companies) * static_cast<std::size_t>(config_.num_investors);
}

Env::StepOutput Env::step(std::span<const double> company_actions, std::span<const double> investor_actions) {
  if (company_actions.size() != company_action_size())
    throw std::invalid_argument("company action array has length " + std::to_string(company_actions.size()) +
                                ", expected " + std::to_string(company_action_size()));
  if (investor_actions.size() != investor_action_size())
    throw std::invalid_argument("investor action array has length " + std::to_string(investor_actions.size()) +
                                ", expected " + std::to_string(investor_action_size()));
  const auto m = static_cast<std::size_t>(config_.num_companies);
  const auto n = static_cast<std::size_t>(config_.num_investors);
  std::vector<market::CompanyAction> companies(m);
  for (std::size_t i = 0; i < m; ++i)
    companies[i] = {company_actions[3 * i], company_actions[3 * i + 1], company_actions[3 * i + 2]};
  std::vector<market::InvestorAction> investors(n);
  for (std::size_t j = 0; j < n; ++j) {
    investors[j].invest.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
      const double v = investor_actions[j * m + i];
      if (!std::isfinite(v)) throw std::invalid_argument("investor action values must be finite");
      investors[j].invest[i] = v > 0.5 ? 1 : 0;
    }
  }
  const auto& result = episode_->step(std::move(companies), std::move(investors));
  StepOutput out;
  out.observation = episode_->observation();
  out.company_rewards = result.company_rewards;
  out.investor_rewards = result.investor_rewards;
  out.done = episode_->done();
  out.row = episode_->rows().back();
  return out;
}

}  // namespace investesg
