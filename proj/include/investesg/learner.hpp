#pragma once

// Independent score-function learners. Companies draw each enabled spending
// fraction from its own state-independent categorical over a 0.1% grid; investors
// flip one Bernoulli coin per company whose logit is a per-company bias plus
// a shared weight on how far that company's disclosed ESG score sits above
// the mean over active companies.

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "investesg/batch.hpp"
#include "investesg/config.hpp"
#include "investesg/episode.hpp"

namespace investesg::learner {

inline constexpr int kGridLevels = 11;      // 0, 0.001, ..., 0.01
inline constexpr double kGridStep = 0.001;
inline constexpr double kEsgFeatureScale = 0.01;  // disclosed score per unit of ESG feature

class LearnerDivergence : public std::runtime_error {
 public:
  LearnerDivergence(int iteration, const std::string& what)
      : std::runtime_error("learner diverged at iteration " + std::to_string(iteration) + ": " + what),
        iteration_(iteration) {}
  [[nodiscard]] int iteration() const { return iteration_; }

 private:
  int iteration_;
};

/// Product of per-dimension categoricals. Logits hold kGridLevels entries per
/// enabled dimension in the order mitigation, greenwash, resilience. Joint
/// action indices run over the full grid with the last enabled dimension
/// varying fastest.
struct CompanyPolicy {
  bool greenwash = false;   // dimension enabled
  bool resilience = false;  // dimension enabled
  std::vector<double> logits;

  [[nodiscard]] int dims() const { return 1 + (greenwash ? 1 : 0) + (resilience ? 1 : 0); }
  [[nodiscard]] std::size_t num_actions() const {
    std::size_t n = 1;
    for (int d = 0; d < dims(); ++d) n *= kGridLevels;
    return n;
  }
  [[nodiscard]] std::vector<int> levels(std::size_t index) const;
  [[nodiscard]] std::size_t index_of(const std::vector<int>& levels) const;
  [[nodiscard]] market::CompanyAction action(std::size_t index) const;
  [[nodiscard]] std::vector<double> probabilities(int dim) const;
  [[nodiscard]] std::vector<double> joint_probabilities() const;
  /// Per-dimension mode; ties go to the lowest level.
  [[nodiscard]] std::size_t greedy() const;
  std::size_t sample(PolicyRng& rng) const;
  friend bool operator==(const CompanyPolicy&, const CompanyPolicy&) = default;
};

struct InvestorPolicy {
  std::vector<double> logits;  // per company
  double esg_weight = 0.0;

  [[nodiscard]] double logit(std::size_t company, double esg_feature) const {
    return logits[company] + esg_weight * esg_feature;
  }
  friend bool operator==(const InvestorPolicy&, const InvestorPolicy&) = default;
};

struct PolicyParams {
  std::vector<CompanyPolicy> companies;
  std::vector<InvestorPolicy> investors;
  friend bool operator==(const PolicyParams&, const PolicyParams&) = default;
};

double grid_value(int level);

/// Per-company ESG feature: (Q_i - mean active Q) / kEsgFeatureScale, zero
/// for inactive companies.
std::vector<double> esg_features(std::span<const double> disclosed_esg, std::span<const bool> active);

/// Uniform company policies over the enabled grid and zero investor logits;
/// with init_logit_scale > 0 logits get N(0, scale^2) noise from `seed`.
PolicyParams initial_params(const ScenarioConfig& config, std::uint64_t seed = 0);

/// One sampled episode with the information the gradient needs.
struct Trace {
  int periods = 0;
  std::vector<std::vector<int>> company_choice;      // [i][t]; -1 when the sample was not applied
  std::vector<std::vector<double>> company_reward;   // [i][t]
  std::vector<std::vector<std::vector<signed char>>> investor_flag;  // [j][t][i]; -1 when masked
  std::vector<std::vector<double>> esg_feature;      // [t][i]
  std::vector<std::vector<double>> investor_reward;  // [j][t]
  EpisodeSummary summary;
};

Trace sample_trace(const ScenarioConfig& config, const PolicyParams& params, SeedPair seeds);

/// Per-period baselines, indexed like the rewards: [agent][t].
struct Baselines {
  std::vector<std::vector<double>> company;
  std::vector<std::vector<double>> investor;
};

struct Gradient {
  std::vector<std::vector<double>> company;          // d/d logits, same layout as CompanyPolicy::logits
  std::vector<std::vector<double>> investor_logits;  // d/d per-company logits
  std::vector<double> investor_esg;                  // d/d esg weight
};

/// Likelihood-ratio estimate of d E[sum of own rewards] / d params per
/// agent: the mean over traces of sum_t (G_t - b_t) grad log pi(a_t), with
/// G_t the discounted reward-to-go. A null baseline means b = 0.
Gradient reinforce_gradient(const PolicyParams& params, const std::vector<Trace>& traces,
                            const Baselines* baselines = nullptr, double discount = 1.0);

struct TrainReport {
  int iterations = 0;
  int window = 0;
  // Trailing-window means over the last `window` iterations.
  double mitigation_spend = 0.0;
  double final_risk = 0.0;
  double final_wealth = 0.0;
  // Per-iteration means over the iteration's episodes.
  std::vector<double> mitigation_curve;
  std::vector<double> risk_curve;
  std::vector<double> wealth_curve;
  std::vector<std::vector<double>> company_return_curves;   // [i][iteration]
  std::vector<std::vector<double>> investor_return_curves;  // [j][iteration]
};

struct TrainResult {
  PolicyParams params;
  TrainReport report;
};

using IterationCallback = std::function<void(int iteration, const PolicyParams& params)>;

/// Trains every agent on its own reward. With fixed_climate_seed every
/// training episode reuses `seeds.climate`; otherwise episode e uses
/// `seeds.climate + e`. Action sampling is driven by `seeds.policy`.
TrainResult train_independent(const ScenarioConfig& config, SeedPair seeds,
                              const IterationCallback& on_iteration = {});

/// Controller that plays each agent's mode: argmax company action and
/// investor flag = logit > 0.
class GreedyController final : public Controller {
 public:
  explicit GreedyController(PolicyParams params) : params_(std::move(params)) {}
  void act(const DecisionContext& ctx, PolicyRng& rng, std::vector<market::CompanyAction>& companies,
           std::vector<market::InvestorAction>& investors) override;

 private:
  PolicyParams params_;
};

BatchResult evaluate(const PolicyParams& params, const ScenarioConfig& config, const std::vector<SeedPair>& seeds,
                     int threads = 1);

nlohmann::json report_json(const TrainReport& report);
nlohmann::json params_json(const PolicyParams& params);

}  // namespace investesg::learner
