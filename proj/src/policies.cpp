#include "investesg/policies.hpp"

#include <algorithm>
#include <array>
#include <utility>

namespace investesg::policies {

namespace {

constexpr std::array<std::pair<CompanyKind, std::string_view>, 5> kCompanyNames{{
    {CompanyKind::Cooperator, "cooperator"},
    {CompanyKind::Defector, "defector"},
    {CompanyKind::ResilienceDefector, "resilience_defector"},
    {CompanyKind::Greenwasher, "greenwasher"},
    {CompanyKind::Custom, "custom"},
}};

constexpr std::array<std::pair<InvestorKind, std::string_view>, 2> kInvestorNames{{
    {InvestorKind::ProfitDriven, "profit_driven"},
    {InvestorKind::InfinitelyConscious, "infinitely_conscious"},
}};

}  // namespace

market::CompanyAction ScriptedCompanyPolicy::fractions() const {
  switch (kind) {
    case CompanyKind::Cooperator: return kCooperatorAction;
    case CompanyKind::Defector: return kDefectorAction;
    case CompanyKind::ResilienceDefector: return kResilienceDefectorAction;
    case CompanyKind::Greenwasher: return kGreenwasherAction;
    case CompanyKind::Custom: return custom;
  }
  return kDefectorAction;
}

market::CompanyAction company_action(const ScriptedCompanyPolicy& policy, bool bankrupt) {
  if (bankrupt) return {};
  return policy.fractions();
}

market::InvestorAction investor_action(const ScriptedInvestorPolicy& policy,
                                       std::span<const double> esg_scores,
                                       std::span<const bool> active) {
  market::InvestorAction action;
  action.invest.assign(active.size(), 0);
  if (policy.kind == InvestorKind::ProfitDriven) {
    for (std::size_t i = 0; i < active.size(); ++i) action.invest[i] = active[i] ? 1 : 0;
    return action;
  }
  bool any = false;
  double best = 0.0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (!active[i]) continue;
    if (!any || esg_scores[i] > best) best = esg_scores[i];
    any = true;
  }
  if (!any) return action;
  for (std::size_t i = 0; i < active.size(); ++i) action.invest[i] = (active[i] && esg_scores[i] == best) ? 1 : 0;
  return action;
}

void mask_actions(std::span<market::CompanyAction> company_actions,
                  std::span<market::InvestorAction> investor_actions,
                  std::span<const bool> bankrupt) {
  for (std::size_t i = 0; i < company_actions.size(); ++i)
    if (bankrupt[i]) company_actions[i] = {};
  for (auto& inv : investor_actions)
    for (std::size_t i = 0; i < inv.invest.size(); ++i)
      if (bankrupt[i]) inv.invest[i] = 0;
}

std::string_view to_string(CompanyKind kind) {
  for (const auto& [k, name] : kCompanyNames)
    if (k == kind) return name;
  return "unknown";
}

std::string_view to_string(InvestorKind kind) {
  for (const auto& [k, name] : kInvestorNames)
    if (k == kind) return name;
  return "unknown";
}

std::optional<CompanyKind> parse_company_kind(std::string_view name) {
  auto it = std::find_if(kCompanyNames.begin(), kCompanyNames.end(),
                         [&](const auto& p) { return p.second == name; });
  if (it == kCompanyNames.end()) return std::nullopt;
  return it->first;
}

std::optional<InvestorKind> parse_investor_kind(std::string_view name) {
  auto it = std::find_if(kInvestorNames.begin(), kInvestorNames.end(),
                         [&](const auto& p) { return p.second == name; });
  if (it == kInvestorNames.end()) return std::nullopt;
  return it->first;
}

}  // namespace investesg::policies
