#pragma once

// Scenario configuration: one JSON document fully describes an experiment.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "investesg/climate.hpp"
#include "investesg/market.hpp"
#include "investesg/policies.hpp"

namespace investesg {

/// Validation or parse failure; `path()` names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string path, const std::string& message)
      : std::invalid_argument(path + ": " + message), path_(std::move(path)) {}
  [[nodiscard]] const std::string& path() const { return path_; }

 private:
  std::string path_;
};

struct SeedPair {
  std::uint64_t climate = 0;
  std::uint64_t policy = 0;
  friend bool operator==(const SeedPair&, const SeedPair&) = default;
};

struct ClimateCalibration {
  climate::ClimateRisks base = climate::kDefaultBase;
  climate::ClimateRisks no_mitigation_at_80 = climate::kNoMitigationAt80;
  double mitigation_budget = 2.3;  // trillions USD per year
  // Target at period 80 under the budget, as a fraction of the no-mitigation
  // rise. Ignored when `target_at_80` is set.
  double target_fraction = 0.75;
  std::optional<climate::ClimateRisks> target_at_80;
};

struct GaussianDamage {
  bool enabled = false;
  std::optional<double> sigma;  // defaults to half the initial vulnerability
};

struct RealDataSeeding {
  bool enabled = false;
  int periods = 10;
  double low = 0.005;
  double high = 0.01;
};

struct Features {
  bool disclosure = false;
  bool greenwash = false;
  bool resilience = false;
  bool more_info = false;
  bool fixed_climate_seed = true;
  int lock_in_years = 0;
  bool strict_bankruptcy = false;
  GaussianDamage gaussian_damage;
  RealDataSeeding real_data_seeding;
};

struct PolicyAssignment {
  std::vector<policies::ScriptedCompanyPolicy> companies;  // empty: all defectors
  std::vector<policies::ScriptedInvestorPolicy> investors;  // empty: all profit-driven
};

struct LearnerSettings {
  int iterations = 400;
  int episodes_per_iteration = 4;
  double company_learning_rate = 0.5;
  double investor_learning_rate = 0.5;
  double baseline_decay = 0.9;  // moving-average weight on the old baseline
  double discount = 0.9;        // reward-to-go discount used for updates
  int report_window = 50;
  double init_logit_scale = 0.0;

  // Reference deep-RL trainer hyperparameters, recorded for external trainers.
  struct Reference {
    std::vector<int> hidden_layers{256, 128};
    std::string activation = "tanh";
    int n_steps = 500;
    double learning_rate = 3e-5;
    double entropy_coef = 0.01;
    double clip_range = 0.2;
    int episodes = 30000;
  } reference;
};

struct ScenarioConfig {
  std::string name = "default";
  int num_companies = 5;
  int num_investors = 3;
  double company_capital = 10.0;
  double investor_capital = 16.0;
  double growth_rate = 0.10;
  double greenwash_coeff = 2.0;
  double initial_vulnerability = 0.05;
  double resilience_efficiency = 5.0;
  std::vector<double> esg_preference;  // per investor; missing entries are 0
  int horizon = 100;
  ClimateCalibration climate;
  Features features;
  PolicyAssignment policies;
  SeedPair seeds;
  int batch_size = 1;
  int threads = 1;
  LearnerSettings learner;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;

  [[nodiscard]] double esg_preference_of(std::size_t investor) const {
    return investor < esg_preference.size() ? esg_preference[investor] : 0.0;
  }
  [[nodiscard]] double damage_sigma() const {
    return features.gaussian_damage.sigma.value_or(0.5 * initial_vulnerability);
  }
  [[nodiscard]] double initial_wealth() const {
    return num_companies * company_capital + num_investors * investor_capital;
  }
};

climate::ClimateParams climate_params(const ScenarioConfig& config);
market::MarketParams market_params(const ScenarioConfig& config);
market::MarketState initial_state(const ScenarioConfig& config);

/// Per-agent scripted policies with defaults filled in to the agent counts.
std::vector<policies::ScriptedCompanyPolicy> company_policies(const ScenarioConfig& config);
std::vector<policies::ScriptedInvestorPolicy> investor_policies(const ScenarioConfig& config);

nlohmann::json to_json(const ScenarioConfig& config);

/// Parses a config document on top of the defaults. Unknown keys and type
/// mismatches raise ConfigError with the key path. Does not validate.
ScenarioConfig config_from_json(const nlohmann::json& doc);
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::string& path);

/// Named experiment presets.
const std::vector<std::string>& preset_names();
ScenarioConfig scenario_preset(std::string_view name);

}  // namespace investesg
