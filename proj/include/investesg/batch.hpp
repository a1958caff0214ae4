#pragma once

// Many independent episodes at once. Scripted-policy batches run on a
// structure-of-arrays stepper whose lanes are episodes; the arithmetic goes
// through the lane kernels, so results match the sequential runner exactly.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "investesg/config.hpp"
#include "investesg/episode.hpp"
#include "investesg/simd/kernels.hpp"

namespace investesg {

struct Aggregate {
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(n); 0 for n = 1
};

Aggregate aggregate(const std::vector<double>& values);

struct BatchResult {
  std::vector<SeedPair> seeds;
  std::vector<EpisodeSummary> episodes;
  std::vector<EpisodeRecord> records;  // filled only when rows were requested
  Aggregate final_risk;
  Aggregate final_wealth;
  Aggregate events_total;
  Aggregate bankruptcies;
  Aggregate cumulative_mitigation;
};

BatchResult summarize(std::vector<SeedPair> seeds, std::vector<EpisodeSummary> episodes);

struct BatchOptions {
  int threads = 1;
  std::optional<simd::Isa> isa;  // default: active_kernels()
  bool record_rows = false;
};

/// Seeds {base.climate + k, base.policy + k} for k = 0..count-1.
std::vector<SeedPair> consecutive_seeds(SeedPair base, int count);

/// Runs the config's scripted policies on the vectorized stepper.
BatchResult run_batch(const ScenarioConfig& config, const std::vector<SeedPair>& seeds,
                      const BatchOptions& options = {});

/// Runs each seed through run_episode with a fresh controller from `factory`.
/// Episodes may run on several threads; output order follows `seeds`.
BatchResult run_sequential(const ScenarioConfig& config, const std::vector<SeedPair>& seeds,
                           const std::function<std::unique_ptr<Controller>()>& factory, int threads = 1,
                           bool record_rows = false);

/// Lane-parallel stepper over episodes that share a config.
class BatchStepper {
 public:
  BatchStepper(const ScenarioConfig& config, std::vector<SeedPair> seeds, const simd::KernelTable& kernels,
               bool record_rows);
  ~BatchStepper();
  BatchStepper(const BatchStepper&) = delete;
  BatchStepper& operator=(const BatchStepper&) = delete;

  [[nodiscard]] bool done() const;
  void step();
  void run();

  [[nodiscard]] std::size_t lanes() const;
  [[nodiscard]] EpisodeSummary summary(std::size_t lane) const;
  EpisodeRecord take_record(std::size_t lane);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace investesg
