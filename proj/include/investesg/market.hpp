#pragma once

// State transition of the company/investor market game.
//
// Units: capital, holdings, cash and cumulative spend are trillions of USD.
// Periods are years; state period 0 is the start of 2021.

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "investesg/climate.hpp"

namespace investesg::market {

class EpisodeCompleteError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Raised when the step function finds a state it should never reach.
class InvariantViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline constexpr double kStrictMarginThreshold = -0.10;
inline constexpr std::size_t kStrictWindow = 3;

struct CompanyAction {
  double mitigation = 0.0;
  double greenwash = 0.0;
  double resilience = 0.0;

  [[nodiscard]] double total() const { return mitigation + greenwash + resilience; }
  friend bool operator==(const CompanyAction&, const CompanyAction&) = default;
};

struct InvestorAction {
  std::vector<int> invest;  // 0/1 per company

  [[nodiscard]] int count() const;
  friend bool operator==(const InvestorAction&, const InvestorAction&) = default;
};

struct CompanyState {
  double capital = 0.0;
  double esg_score = 0.0;
  double vulnerability = 0.0;
  double cumulative_resilience = 0.0;
  double initial_vulnerability = 0.0;
  double resilience_efficiency = 1.0;
  bool bankrupt = false;
  // Most recent margins, oldest first; at most kStrictWindow entries.
  std::vector<double> margin_history;
};

struct InvestorState {
  std::vector<double> holdings;
  double cash = 0.0;
  double esg_preference = 0.0;

  [[nodiscard]] double total_capital() const;
};

struct MarketState {
  int period = 0;
  climate::ClimateRisks risks{};
  double cumulative_mitigation = 0.0;
  climate::EventOutcome last_events{};
  std::vector<CompanyState> companies;
  std::vector<InvestorState> investors;

  [[nodiscard]] std::size_t num_companies() const { return companies.size(); }
  [[nodiscard]] std::size_t num_investors() const { return investors.size(); }
  /// Company capital plus uninvested investor cash. Investor holdings sit
  /// inside company capital and are not counted twice.
  [[nodiscard]] double total_wealth() const;
};

/// Everything the transition needs besides state and actions.
struct MarketParams {
  climate::ClimateParams climate{};
  double growth_rate = 0.10;
  double greenwash_coeff = 2.0;
  bool disclosure = false;
  bool greenwash_enabled = false;
  bool resilience_enabled = false;
  bool strict_bankruptcy = false;
  bool gaussian_damage = false;
  double damage_sigma = 0.0;
};

/// Exogenous randomness for one period: event uniforms, plus (in Gaussian
/// damage mode) standard-normal draws per company and event.
struct PeriodDraws {
  std::array<double, climate::kNumEvents> uniforms{};
  std::span<const double> damage_normals{};  // num_companies * 3, company-major
};

struct Redistribution {
  std::vector<double> interim;                // per company
  std::vector<double> investor_capital;       // K^I before redistribution
  std::vector<double> share;                  // K^I / ||a||_1, 0 if opted out
  std::vector<double> cash;                   // cash after redistribution
};

struct SpendingResult {
  double mitigation_spend = 0.0;          // contribution to U_m
  double cumulative_resilience = 0.0;     // U_r after this period
  bool overspend = false;
};

struct StepResult {
  std::vector<double> company_rewards;
  std::vector<double> investor_rewards;
  std::vector<double> interim;
  std::vector<double> margins;
  std::vector<CompanyAction> applied_actions;  // after masking
  climate::EventOutcome events{};
  double mitigation_spend = 0.0;               // this period, all companies
  double greenwash_spend = 0.0;
  double resilience_spend = 0.0;
  int new_bankruptcies = 0;
};

/// Initial state with every company at `company_capital`, every investor all
/// cash, risks at their base level.
MarketState initial_state(std::size_t num_companies, std::size_t num_investors,
                          double company_capital, double investor_capital,
                          std::span<const double> esg_preferences, double initial_vulnerability,
                          double resilience_efficiency, const climate::ClimateParams& climate);

/// Zeroes actions of bankrupt companies, investor flags toward them, and any
/// action dimension the params disable.
void mask_actions(std::span<CompanyAction> company_actions, std::span<InvestorAction> investor_actions,
                  std::span<const CompanyState> companies, const MarketParams& params);

Redistribution redistribute(const MarketState& state, std::span<const InvestorAction> actions);

SpendingResult apply_spending(double interim, const CompanyAction& action, const CompanyState& company);

double update_vulnerability(const CompanyState& company, double resilience_frac, double interim);

double compute_esg(const CompanyAction& action, double greenwash_coeff, bool disclosure_enabled);

double profit_margin(const CompanyAction& action, double growth_rate, double event_loss);
inline double profit_margin(const CompanyAction& action, double growth_rate, int event_count,
                            double vulnerability) {
  return profit_margin(action, growth_rate, event_count * vulnerability);
}

/// Fraction of capital lost in a period. Gaussian mode draws a per-event
/// vulnerability around `vulnerability` and clips it to [0,1].
double event_loss(const climate::EventOutcome& events, double vulnerability,
                  std::span<const double> normals, double sigma);

/// Applies the settlement equations in place. Companies whose capital
/// reaches zero or below become bankrupt; capital of every bankrupt company
/// and all holdings in it are written off. Returns the number of companies
/// that failed during this settlement.
int settle(MarketState& state, const Redistribution& redist, std::span<const InvestorAction> actions,
           std::span<const double> margins);

double company_reward(double capital_next, double interim);

double investor_reward(double capital_before, const InvestorState& after,
                       std::span<const double> esg_scores);

bool check_strict_bankruptcy(std::span<const double> margin_history);

/// Advances one period: mask, redistribute, spend, update risks and
/// vulnerability, score ESG, sample events, settle, reward, then apply the
/// strict-bankruptcy rule. Throws EpisodeCompleteError past the horizon.
StepResult step(MarketState& state, std::vector<CompanyAction> company_actions,
                std::vector<InvestorAction> investor_actions, const PeriodDraws& draws,
                const MarketParams& params);

/// Flat observation: per company (K, Q, L), per investor (H_1..H_M, C),
/// optionally followed by the risk triple and last event triple.
std::vector<double> observe(const MarketState& state, const MarketParams& params, bool more_info);
std::size_t observation_size(std::size_t num_companies, std::size_t num_investors, bool more_info);

}  // namespace investesg::market
