#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstring>

#include "investesg/batch.hpp"
#include "investesg/config.hpp"
#include "investesg/episode.hpp"

using namespace investesg;

namespace {

std::unique_ptr<Controller> scripted(const ScenarioConfig& c) { return std::make_unique<ScriptedController>(c); }

bool bitwise_equal(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

bool bitwise_equal(const EpisodeSummary& a, const EpisodeSummary& b) {
  if (a.periods != b.periods || a.events_total != b.events_total || a.bankruptcies != b.bankruptcies) return false;
  if (!bitwise_equal(a.final_risk, b.final_risk) || !bitwise_equal(a.final_wealth, b.final_wealth) ||
      !bitwise_equal(a.cumulative_mitigation, b.cumulative_mitigation))
    return false;
  if (a.company_returns.size() != b.company_returns.size() || a.investor_returns.size() != b.investor_returns.size())
    return false;
  for (std::size_t i = 0; i < a.company_returns.size(); ++i)
    if (!bitwise_equal(a.company_returns[i], b.company_returns[i])) return false;
  for (std::size_t j = 0; j < a.investor_returns.size(); ++j)
    if (!bitwise_equal(a.investor_returns[j], b.investor_returns[j])) return false;
  return true;
}

// A mix of scripted behaviours so every code path in the stepper runs.
std::vector<ScenarioConfig> scenarios() {
  std::vector<ScenarioConfig> out;
  for (const char* name : {"status_quo", "mandate", "conscious_10", "greenwash_beta2", "resilience", "lockin",
                           "uncertain_damage", "strict_bankruptcy", "realdata_seed", "no_investor_info", "scale_10x10"})
    out.push_back(scenario_preset(name));

  auto mixed = scenario_preset("greenwash_beta10");
  mixed.policies.companies = {{policies::CompanyKind::Cooperator, {}},
                              {policies::CompanyKind::Greenwasher, {}},
                              {policies::CompanyKind::ResilienceDefector, {}},
                              {policies::CompanyKind::Defector, {}},
                              {policies::CompanyKind::Custom, {0.004, 0.001, 0.0}}};
  mixed.policies.investors = {{policies::InvestorKind::InfinitelyConscious},
                              {policies::InvestorKind::ProfitDriven},
                              {policies::InvestorKind::InfinitelyConscious}};
  mixed.features.resilience = true;
  mixed.name = "mixed";
  out.push_back(mixed);

  // Heavy spenders fail under the strict rule, one overspends outright.
  auto failing = scenario_preset("strict_bankruptcy");
  failing.policies.companies = {{policies::CompanyKind::Custom, {0.2, 0.0, 0.0}},
                                {policies::CompanyKind::Custom, {0.6, 0.0, 0.5}},
                                {policies::CompanyKind::Cooperator, {}},
                                {policies::CompanyKind::Custom, {0.05, 0.0, 0.0}},
                                {policies::CompanyKind::Defector, {}}};
  failing.features.resilience = true;
  failing.initial_vulnerability = 0.3;
  failing.name = "failing";
  out.push_back(failing);
  return out;
}

}  // namespace

TEST_CASE("vectorized batches reproduce sequential episodes exactly") {
  std::vector<simd::Isa> isas{simd::Isa::Scalar};
  if (simd::avx2_kernels() != nullptr) isas.push_back(simd::Isa::Avx2);
  for (const auto& config : scenarios()) {
    CAPTURE(config.name);
    const auto seeds = consecutive_seeds({17, 40}, 8);
    const auto reference = run_sequential(
        config, seeds, [&] { return scripted(config); }, 1, true);
    for (auto isa : isas) {
      for (int threads : {1, 3}) {
        CAPTURE(simd::to_string(isa));
        CAPTURE(threads);
        BatchOptions options;
        options.threads = threads;
        options.isa = isa;
        options.record_rows = true;
        const auto batch = run_batch(config, seeds, options);
        REQUIRE(batch.episodes.size() == seeds.size());
        REQUIRE(batch.records.size() == seeds.size());
        for (std::size_t e = 0; e < seeds.size(); ++e) {
          CHECK(batch.seeds[e] == seeds[e]);
          CHECK(bitwise_equal(batch.episodes[e], reference.episodes[e]));
          CHECK(batch.records[e].rows == reference.records[e].rows);
        }
        CHECK(bitwise_equal(batch.final_wealth.mean, reference.final_wealth.mean));
        CHECK(bitwise_equal(batch.final_risk.std_error, reference.final_risk.std_error));
      }
    }
  }
}

TEST_CASE("a batch of one equals run_episode") {
  const auto config = scenario_preset("conscious_1");
  const auto single = run_episode(config, {5, 6});
  const auto batch = run_batch(config, {{5, 6}});
  CHECK(bitwise_equal(batch.episodes[0], single.summary));
  CHECK(batch.final_risk.std_error == 0.0);
}

TEST_CASE("runs are reproducible and seeds matter") {
  const auto config = scenario_preset("uncertain_damage");
  const auto seeds = consecutive_seeds({0, 0}, 4);
  const auto a = run_batch(config, seeds);
  const auto b = run_batch(config, seeds);
  for (std::size_t e = 0; e < seeds.size(); ++e) CHECK(bitwise_equal(a.episodes[e], b.episodes[e]));
  CHECK(a.episodes[0].events_total != a.episodes[1].events_total);
}

TEST_CASE("consecutive seeds and aggregates") {
  const auto s = consecutive_seeds({10, 20}, 3);
  REQUIRE(s.size() == 3);
  CHECK(s[2] == SeedPair{12, 22});
  const auto agg = aggregate({1.0, 2.0, 3.0, 6.0});
  CHECK(agg.mean == 3.0);
  CHECK(agg.std_error == doctest::Approx(std::sqrt(14.0 / 3.0) / 2.0));
  CHECK(aggregate({4.0}).std_error == 0.0);
}

TEST_CASE("a 5 x 3 episode runs within the desk-scale budget") {
  const auto config = scenario_preset("mandate");
  double best = 1e9;
  for (int rep = 0; rep < 5; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_episode(config, {static_cast<std::uint64_t>(rep), 0}, false);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    CHECK(r.summary.periods == 100);
    best = std::min(best, ms);
  }
  MESSAGE("fastest 100-period 5x3 episode: " << best << " ms");
  WARN(best < 5.0);
}
