#pragma once

// Single-episode orchestration: controllers choose actions, the episode
// applies environment-level rules (lock-in, seeded mitigation), steps the
// market and records one row per period.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "investesg/config.hpp"
#include "investesg/market.hpp"
#include "investesg/policies.hpp"
#include "investesg/streams.hpp"

namespace investesg {

inline constexpr int kFirstYear = 2021;

/// Calendar year of the period that ends at state index `t` (t=1 is 2021).
inline int calendar_year(int t) { return kFirstYear - 1 + t; }

struct CompanyRow {
  double capital = 0.0;
  double esg_score = 0.0;
  double vulnerability = 0.0;
  market::CompanyAction action{};
  double reward = 0.0;
  bool bankrupt = false;
  friend bool operator==(const CompanyRow&, const CompanyRow&) = default;
};

struct InvestorRow {
  std::vector<double> holdings;
  double cash = 0.0;
  double reward = 0.0;
  friend bool operator==(const InvestorRow&, const InvestorRow&) = default;
};

/// State after one period. `t` counts completed periods.
struct PeriodRow {
  int t = 0;
  climate::ClimateRisks risks{};
  double overall_risk = 0.0;
  climate::EventOutcome events{};
  std::vector<CompanyRow> companies;
  std::vector<InvestorRow> investors;
  friend bool operator==(const PeriodRow&, const PeriodRow&) = default;
};

struct EpisodeSummary {
  int periods = 0;
  double final_risk = 0.0;    // P at the end of the episode
  double final_wealth = 0.0;  // W at the end of the episode
  int events_total = 0;
  int bankruptcies = 0;
  double cumulative_mitigation = 0.0;
  std::vector<double> company_returns;   // undiscounted reward sums
  std::vector<double> investor_returns;
  friend bool operator==(const EpisodeSummary&, const EpisodeSummary&) = default;
};

struct EpisodeRecord {
  SeedPair seeds;
  std::vector<PeriodRow> rows;
  EpisodeSummary summary;
};

/// Recomputes P and W from the last row; returns the initial values when
/// there are no rows.
double final_risk_from_rows(const std::vector<PeriodRow>& rows, const ScenarioConfig& config);
double final_wealth_from_rows(const std::vector<PeriodRow>& rows, const ScenarioConfig& config);

/// What a controller sees when choosing actions for the coming period.
struct DecisionContext {
  int period = 0;
  const market::MarketState* state = nullptr;
  std::span<const double> disclosed_esg;  // zero when disclosure is off
  std::span<const bool> active;
};

class Controller {
 public:
  virtual ~Controller() = default;
  /// Fills one action per company and per investor.
  virtual void act(const DecisionContext& ctx, PolicyRng& rng, std::vector<market::CompanyAction>& companies,
                   std::vector<market::InvestorAction>& investors) = 0;
};

class ScriptedController final : public Controller {
 public:
  ScriptedController(std::vector<policies::ScriptedCompanyPolicy> companies,
                     std::vector<policies::ScriptedInvestorPolicy> investors);
  explicit ScriptedController(const ScenarioConfig& config);

  void act(const DecisionContext& ctx, PolicyRng& rng, std::vector<market::CompanyAction>& companies,
           std::vector<market::InvestorAction>& investors) override;

 private:
  std::vector<policies::ScriptedCompanyPolicy> companies_;
  std::vector<policies::ScriptedInvestorPolicy> investors_;
};

class Episode {
 public:
  /// Validates the config. The climate stream always uses `seeds.climate`.
  Episode(const ScenarioConfig& config, SeedPair seeds, bool record_rows = true);

  [[nodiscard]] bool done() const { return state_.period >= params_.climate.horizon; }
  [[nodiscard]] int period() const { return state_.period; }
  [[nodiscard]] const market::MarketState& state() const { return state_; }
  [[nodiscard]] const market::MarketParams& params() const { return params_; }
  [[nodiscard]] const ScenarioConfig& config() const { return config_; }
  [[nodiscard]] SeedPair seeds() const { return seeds_; }
  PolicyRng& policy_rng() { return policy_rng_; }

  /// Whether companies may change their actions this period under lock-in.
  [[nodiscard]] bool company_decision_period() const;
  /// Mitigation fraction forced on seeded companies, or nullopt outside the
  /// seeding window (and for companies outside the seeded set).
  [[nodiscard]] std::optional<double> seeded_mitigation(std::size_t company) const;

  [[nodiscard]] DecisionContext context() const;
  [[nodiscard]] std::vector<double> observation() const;

  /// Applies lock-in and seeding to the proposed actions, then steps the
  /// market. Throws EpisodeCompleteError past the horizon.
  const market::StepResult& step(std::vector<market::CompanyAction> companies,
                                 std::vector<market::InvestorAction> investors);

  [[nodiscard]] const market::StepResult& last_step() const { return last_; }
  [[nodiscard]] const std::vector<PeriodRow>& rows() const { return rows_; }
  [[nodiscard]] EpisodeSummary summary() const;
  EpisodeRecord take_record();

 private:
  void refresh_context();

  ScenarioConfig config_;
  market::MarketParams params_;
  SeedPair seeds_;
  bool record_rows_;
  market::MarketState state_;
  ClimateStream stream_;
  PolicyRng policy_rng_;
  double seeded_fraction_ = 0.0;
  std::vector<market::CompanyAction> locked_;
  market::StepResult last_;
  std::vector<PeriodRow> rows_;
  int events_total_ = 0;
  std::vector<double> company_returns_;
  std::vector<double> investor_returns_;
  std::vector<double> disclosed_;
  std::unique_ptr<bool[]> active_;
};

/// Number of companies forced to the seeded mitigation fraction.
std::size_t seeded_company_count(std::size_t num_companies);

EpisodeRecord run_episode(const ScenarioConfig& config, SeedPair seeds, Controller& controller,
                          bool record_rows = true);
/// Runs the config's scripted policy assignment.
EpisodeRecord run_episode(const ScenarioConfig& config, SeedPair seeds, bool record_rows = true);

PeriodRow make_row(const market::MarketState& state, const market::StepResult& step);

}  // namespace investesg
