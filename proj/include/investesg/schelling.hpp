#pragma once

// Empirical Schelling diagrams: focal company payoff as a cooperator and as
// a defector against k cooperating and M-1-k defecting other companies.

#include <cstdint>
#include <string>
#include <vector>

#include "investesg/batch.hpp"
#include "investesg/config.hpp"
#include "investesg/policies.hpp"

namespace investesg::schelling {

struct Setup {
  policies::ScriptedCompanyPolicy cooperator{policies::CompanyKind::Cooperator, {}};
  policies::ScriptedCompanyPolicy defector{policies::CompanyKind::Defector, {}};
  std::vector<policies::ScriptedInvestorPolicy> investors;  // empty: the config's assignment
  std::vector<std::uint64_t> seeds{0, 1, 2};
  int threads = 1;
};

/// Payoffs for one k. Company 0 is the focal agent. Every seed s runs with
/// climate and policy seeds both equal to s, for both focal roles.
struct Point {
  int k = 0;
  std::vector<double> cooperate;           // focal return per seed
  std::vector<double> defect;              // focal return per seed
  std::vector<double> average_when_defect; // mean company return per seed, focal defecting
  Aggregate cooperate_stats;
  Aggregate defect_stats;
  Aggregate average_stats;
};

struct Curve {
  std::vector<Point> points;  // k = 0..M-1
  std::vector<std::uint64_t> seeds;
  int horizon = 0;
};

/// Throws std::out_of_range unless 0 <= k <= M-1.
Point cell(const ScenarioConfig& config, const Setup& setup, int k);
Curve curve(const ScenarioConfig& config, const Setup& setup);

struct Verdict {
  bool social_dilemma = false;
  bool defect_dominates = false;
  bool average_increasing = false;
  std::vector<int> non_dominated_k;     // k where mean defect <= mean cooperate
  std::vector<int> non_increasing_k;    // k where average(k) <= average(k-1)
  [[nodiscard]] std::string describe() const;
};

/// Social dilemma: mean defect payoff beats mean cooperate payoff at every k
/// and the mean all-company payoff with a defecting focal agent strictly
/// increases with k.
Verdict is_social_dilemma(const Curve& curve);

/// Columns: k, coop_mean, coop_stderr, defect_mean, defect_stderr, avg_defect_mean.
std::string table(const Curve& curve);

}  // namespace investesg::schelling
