#pragma once

// Flat-array environment surface for external trainers. Actions and
// observations are plain double arrays; layouts follow market::observe.

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "investesg/config.hpp"
#include "investesg/episode.hpp"

namespace investesg {

class Env {
 public:
  /// Validates the config and starts at t=0 with the config's seeds.
  explicit Env(const ScenarioConfig& config);
  /// Parses and validates a JSON config document.
  static Env from_document(std::string_view text);

  /// Restarts the episode. With fixed_climate_seed the configured climate
  /// seed is kept and only the policy seed changes.
  std::vector<double> reset(SeedPair seeds);

  struct StepOutput {
    std::vector<double> observation;
    std::vector<double> company_rewards;
    std::vector<double> investor_rewards;
    bool done = false;
    PeriodRow row;
  };

  /// `company_actions` holds (u_m, u_g, u_r) per company (length 3M);
  /// `investor_actions` holds one flag per investor and company, investor
  /// major (length N*M), where any value above 0.5 means invest.
  /// Throws std::invalid_argument on wrong lengths and EpisodeCompleteError
  /// once the horizon is reached.
  StepOutput step(std::span<const double> company_actions, std::span<const double> investor_actions);

  [[nodiscard]] std::vector<double> observation() const { return episode_->observation(); }
  [[nodiscard]] std::size_t observation_size() const;
  [[nodiscard]] std::size_t company_action_size() const;
  [[nodiscard]] std::size_t investor_action_size() const;
  [[nodiscard]] bool done() const { return episode_->done(); }
  [[nodiscard]] const Episode& episode() const { return *episode_; }
  [[nodiscard]] const ScenarioConfig& config() const { return config_; }

 private:
  ScenarioConfig config_;
  std::optional<Episode> episode_;
};

}  // namespace investesg
