#include <doctest.h>

#include <cmath>
#include <random>

#include "investesg/climate.hpp"
#include "investesg/config.hpp"
#include "oracles.hpp"

using namespace investesg;
using namespace investesg::climate;

namespace {

const ClimateParams& defaults() {
  static const ClimateParams p = climate_params(ScenarioConfig{});
  return p;
}

}  // namespace

TEST_CASE("no-mitigation risks hit the 2100 endpoint at period 80") {
  const auto r = risk_at(80, 0.0, defaults());
  CHECK(std::fabs(r.heat - 0.94) <= 1e-12);
  CHECK(std::fabs(r.precip - 0.27) <= 1e-12);
  CHECK(std::fabs(r.drought - 0.41) <= 1e-12);
  const double expected = oracle::overall(0.94, 0.27, 0.41);
  CHECK(std::fabs(overall_risk(r) - expected) <= 1e-12);
  CHECK(std::fabs(overall_risk(r) - 0.9742) < 0.5e-4);  // 0.974158
}

TEST_CASE("risks start at the base levels") {
  const auto r = risk_at(0, 0.0, defaults());
  CHECK(r.heat == 0.28);
  CHECK(r.precip == 0.13);
  CHECK(r.drought == 0.17);
  CHECK(std::fabs(overall_risk(r) - oracle::overall(0.28, 0.13, 0.17)) <= 1e-15);
  // 1 - 0.72 * 0.87 * 0.83 = 0.480088, which is 0.48 to within 1e-4.
  CHECK(std::fabs(overall_risk(r) - 0.48) < 1e-4);
}

TEST_CASE("budget spending reaches the calibrated fraction of the rise") {
  const double fraction = ScenarioConfig{}.climate.target_fraction;
  const auto r = risk_at(80, 2.3 * 80, defaults());
  for (std::size_t e = 0; e < kNumEvents; ++e) {
    const double target = oracle::kBase[e] + fraction * (oracle::kEndAt80[e] - oracle::kBase[e]);
    CHECK(std::fabs(r[e] - target) <= 1e-12);
    CHECK(defaults().elasticity[e] == doctest::Approx(oracle::elasticity(fraction)).epsilon(1e-12));
  }
}

TEST_CASE("explicit calibration targets are honoured") {
  ScenarioConfig c;
  c.climate.target_at_80 = ClimateRisks{0.5, 0.2, 0.3};
  const auto p = climate_params(c);
  const auto r = risk_at(80, 2.3 * 80, p);
  CHECK(r.heat == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.precip == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(r.drought == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("calibration rejects targets outside the no-mitigation band") {
  ScenarioConfig c;
  c.climate.target_at_80 = ClimateRisks{0.2, 0.2, 0.3};  // heat below base
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c.climate.target_at_80 = ClimateRisks{0.95, 0.2, 0.3};  // heat above the no-mitigation endpoint
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("risk matches the closed form and is monotone in time and mitigation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> t_dist(0.0, 200.0), u_dist(0.0, 1000.0);
  const double lambda = oracle::elasticity(ScenarioConfig{}.climate.target_fraction);
  for (int k = 0; k < 2000; ++k) {
    const double t = t_dist(rng), u = u_dist(rng), dt = t_dist(rng) * 0.1, du = u_dist(rng) * 0.1;
    const auto r = risk_at(t, u, defaults());
    const auto later = risk_at(t + dt, u, defaults());
    const auto mitigated = risk_at(t, u + du, defaults());
    for (std::size_t e = 0; e < kNumEvents; ++e) {
      CHECK(oracle::close_rel(r[e], oracle::risk(static_cast<int>(e), t, u, lambda), 1e-13));
      CHECK(r[e] >= 0.0);
      CHECK(r[e] <= 1.0);
      CHECK(later[e] >= r[e]);
      CHECK(mitigated[e] <= r[e]);
    }
  }
}

TEST_CASE("risks clamp at one far past the calibration window") {
  const auto r = risk_at(1000, 0.0, defaults());
  CHECK(r.heat == 1.0);
  CHECK(r.precip == 1.0);
  CHECK(r.drought == 1.0);
  CHECK(overall_risk(r) == 1.0);
}

TEST_CASE("an event occurs exactly when the uniform is below the risk") {
  const ClimateRisks r{0.28, 0.13, 0.17};
  const auto none = sample_events(r, {0.28, 0.13, 0.17});
  CHECK(none.count == 0);
  const auto all = sample_events(r, {0.0, 0.1299999, 0.0});
  CHECK(all.count == 3);
  CHECK(all.heat);
  CHECK(all.precip);
  CHECK(all.drought);
  const auto certain = sample_events({1.0, 0.0, 0.0}, {0.999999, 0.0, 0.0});
  CHECK(certain.heat);
  CHECK_FALSE(certain.precip);
}

TEST_CASE("event counts at base risk average 0.58") {
  const ClimateRisks r{0.28, 0.13, 0.17};
  std::mt19937_64 rng(2021);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 100000;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) sum += sample_events(r, {u(rng), u(rng), u(rng)}).count;
  const double mean = sum / n;
  const double sd = std::sqrt((0.28 * 0.72 + 0.13 * 0.87 + 0.17 * 0.83) / n);
  CHECK(std::fabs(mean - 0.58) <= 3.0 * sd);
}
