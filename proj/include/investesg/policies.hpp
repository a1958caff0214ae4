#pragma once

// Scripted company and investor policies used for Schelling analysis and
// baseline scenarios.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "investesg/market.hpp"

namespace investesg::policies {

enum class CompanyKind { Cooperator, Defector, ResilienceDefector, Greenwasher, Custom };
enum class InvestorKind { ProfitDriven, InfinitelyConscious };

struct ScriptedCompanyPolicy {
  CompanyKind kind = CompanyKind::Defector;
  market::CompanyAction custom{};  // used only by Custom

  [[nodiscard]] market::CompanyAction fractions() const;
  friend bool operator==(const ScriptedCompanyPolicy&, const ScriptedCompanyPolicy&) = default;
};

struct ScriptedInvestorPolicy {
  InvestorKind kind = InvestorKind::ProfitDriven;
  friend bool operator==(const ScriptedInvestorPolicy&, const ScriptedInvestorPolicy&) = default;
};

inline constexpr market::CompanyAction kCooperatorAction{0.005, 0.0, 0.0};
inline constexpr market::CompanyAction kDefectorAction{0.0, 0.0, 0.0};
inline constexpr market::CompanyAction kResilienceDefectorAction{0.0, 0.0, 0.005};
inline constexpr market::CompanyAction kGreenwasherAction{0.0, 0.003, 0.0};

/// Fixed fraction triple for the policy; zero for a bankrupt company.
market::CompanyAction company_action(const ScriptedCompanyPolicy& policy, bool bankrupt);

/// ProfitDriven invests in every active company. InfinitelyConscious invests
/// in every active company whose score equals the active maximum.
market::InvestorAction investor_action(const ScriptedInvestorPolicy& policy,
                                       std::span<const double> esg_scores,
                                       std::span<const bool> active);

/// Free-function form of market::mask_actions without the disabled-dimension
/// rule.
void mask_actions(std::span<market::CompanyAction> company_actions,
                  std::span<market::InvestorAction> investor_actions,
                  std::span<const bool> bankrupt);

std::string_view to_string(CompanyKind kind);
std::string_view to_string(InvestorKind kind);
std::optional<CompanyKind> parse_company_kind(std::string_view name);
std::optional<InvestorKind> parse_investor_kind(std::string_view name);

}  // namespace investesg::policies
