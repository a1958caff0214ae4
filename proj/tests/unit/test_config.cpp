#include <doctest.h>

#include <string>
#include <vector>

#include "investesg/config.hpp"

using namespace investesg;

namespace {

std::string error_path(const std::string& doc) {
  try {
    const auto c = parse_config(doc);
    c.validate();
  } catch (const ConfigError& e) {
    return e.path();
  }
  return "<no error>";
}

// Expected switches per preset: disclosure, greenwash, resilience, more_info,
// lock-in years, gaussian damage, strict bankruptcy, real-data seeding,
// M, N, esg preferences, greenwash coefficient.
struct Golden {
  std::string name;
  bool disclosure, greenwash, resilience, more_info;
  int lock_in;
  bool gaussian, strict, realdata;
  int m, n;
  std::vector<double> alpha;
  double beta;
};

const std::vector<Golden>& golden() {
  static const std::vector<Golden> g = {
      {"status_quo", false, false, false, false, 0, false, false, false, 5, 3, {0, 0, 0}, 2},
      {"mandate", true, false, false, false, 0, false, false, false, 5, 3, {0, 0, 0}, 2},
      {"conscious_0.5", true, false, false, false, 0, false, false, false, 5, 3, {0.5, 0.5, 0.5}, 2},
      {"conscious_1", true, false, false, false, 0, false, false, false, 5, 3, {1, 1, 1}, 2},
      {"conscious_10", true, false, false, false, 0, false, false, false, 5, 3, {10, 10, 10}, 2},
      {"heterogeneous", true, false, false, false, 0, false, false, false, 5, 3, {0, 10, 10}, 2},
      {"greenwash_beta2", true, true, false, false, 0, false, false, false, 5, 3, {1, 1, 1}, 2},
      {"greenwash_beta10", true, true, false, false, 0, false, false, false, 5, 3, {1, 1, 1}, 10},
      {"greenwash_beta20", true, true, false, false, 0, false, false, false, 5, 3, {1, 1, 1}, 20},
      {"more_info", true, false, false, true, 0, false, false, false, 5, 3, {0, 0, 0}, 2},
      {"no_investor_info", true, false, false, true, 0, false, false, false, 5, 0, {}, 2},
      {"resilience", true, false, true, false, 0, false, false, false, 5, 3, {10, 10, 10}, 2},
      {"lockin", true, false, false, false, 5, false, false, false, 5, 3, {0, 0, 0}, 2},
      {"uncertain_damage", true, false, false, false, 0, true, false, false, 5, 3, {0, 0, 0}, 2},
      {"strict_bankruptcy", true, false, false, false, 0, false, true, false, 5, 3, {0, 0, 0}, 2},
      {"realdata_seed", true, false, false, false, 0, false, false, true, 5, 3, {0, 0, 0}, 2},
      {"scale_10x10", true, false, false, false, 0, false, false, false, 10, 10, std::vector<double>(10, 0.0), 2},
      {"scale_25x25", true, false, false, false, 0, false, false, false, 25, 25, std::vector<double>(25, 0.0), 2},
  };
  return g;
}

}  // namespace

TEST_CASE("defaults describe the 5 x 3 market with 98 T of wealth") {
  const ScenarioConfig c;
  CHECK(c.num_companies == 5);
  CHECK(c.num_investors == 3);
  CHECK(c.initial_wealth() == 98.0);
  CHECK(initial_state(c).total_wealth() == 98.0);
  CHECK(c.horizon == 100);
  CHECK(c.growth_rate == 0.1);
  CHECK(c.features.fixed_climate_seed);
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("unknown keys are reported with their full path") {
  CHECK(error_path(R"({"bogus": 1})") == "bogus");
  CHECK(error_path(R"({"features": {"disclosure": true, "greenwsh": true}})") == "features.greenwsh");
  CHECK(error_path(R"({"features": {"gaussian_damage": {"sigmaa": 0.1}}})") == "features.gaussian_damage.sigmaa");
  CHECK(error_path(R"({"learner": {"reference": {"layers": [1]}}})") == "learner.reference.layers");
}

TEST_CASE("type and range errors name the field") {
  CHECK(error_path(R"({"num_companies": "five"})") == "num_companies");
  CHECK(error_path(R"({"num_companies": 0})") == "num_companies");
  CHECK(error_path(R"({"num_investors": -1})") == "num_investors");
  CHECK(error_path(R"({"initial_vulnerability": 1.5})") == "initial_vulnerability");
  CHECK(error_path(R"({"esg_preference": [1, 2, 3, 4]})") == "esg_preference");
  CHECK(error_path(R"({"features": {"greenwash": true}, "greenwash_coeff": 1.0})") == "greenwash_coeff");
  CHECK(error_path(R"({"policies": {"companies": ["saint"]}})") == "policies.companies[0]");
  CHECK(error_path(R"({"policies": {"companies": ["cooperator", "defector"]}})") == "policies.companies");
  CHECK(error_path(R"({"climate": {"base": [0.1, 0.2]}})") == "climate.base");
  CHECK(error_path(R"({"learner": {"discount": 0}})") == "learner.discount");
  CHECK(error_path(R"({"threads": 0})") == "threads");
  CHECK(error_path("{ not json")[0] == '<');
}

TEST_CASE("policies and preferences accept broadcast forms") {
  const auto c = parse_config(R"({"esg_preference": 10,
                                  "policies": {"companies": "cooperator", "investors": "infinitely_conscious"}})");
  CHECK(c.esg_preference == std::vector<double>{10, 10, 10});
  REQUIRE(c.policies.companies.size() == 5);
  CHECK(c.policies.companies[4].kind == policies::CompanyKind::Cooperator);
  REQUIRE(c.policies.investors.size() == 3);
  CHECK(c.policies.investors[2].kind == policies::InvestorKind::InfinitelyConscious);

  const auto custom = parse_config(
      R"({"policies": {"companies": [{"kind": "custom", "mitigation": 0.02}, "defector", "greenwasher",
                                      "resilience_defector", "cooperator"]}})");
  CHECK(custom.policies.companies[0].kind == policies::CompanyKind::Custom);
  CHECK(custom.policies.companies[0].custom.mitigation == 0.02);
  CHECK(custom.policies.companies[2].kind == policies::CompanyKind::Greenwasher);
}

TEST_CASE("every preset survives a JSON round trip") {
  for (const auto& name : preset_names()) {
    CAPTURE(name);
    const auto c = scenario_preset(name);
    CHECK_NOTHROW(c.validate());
    const auto doc = to_json(c);
    const auto back = config_from_json(doc);
    CHECK(to_json(back) == doc);
    CHECK(to_json(parse_config(doc.dump())) == doc);
  }
}

TEST_CASE("presets match the scenario table") {
  REQUIRE(preset_names().size() == golden().size());
  for (const auto& g : golden()) {
    CAPTURE(g.name);
    const auto c = scenario_preset(g.name);
    CHECK(c.name == g.name);
    CHECK(c.features.disclosure == g.disclosure);
    CHECK(c.features.greenwash == g.greenwash);
    CHECK(c.features.resilience == g.resilience);
    CHECK(c.features.more_info == g.more_info);
    CHECK(c.features.lock_in_years == g.lock_in);
    CHECK(c.features.gaussian_damage.enabled == g.gaussian);
    CHECK(c.features.strict_bankruptcy == g.strict);
    CHECK(c.features.real_data_seeding.enabled == g.realdata);
    CHECK(c.num_companies == g.m);
    CHECK(c.num_investors == g.n);
    CHECK(c.esg_preference == g.alpha);
    CHECK(c.greenwash_coeff == g.beta);
    CHECK(c.features.fixed_climate_seed);
    CHECK(c.company_capital == 10.0);
    CHECK(c.investor_capital == 16.0);
  }
}

TEST_CASE("unknown preset names list the valid ones") {
  try {
    scenario_preset("status-quo");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("status_quo") != std::string::npos);
    CHECK(what.find("scale_25x25") != std::string::npos);
  }
}

TEST_CASE("derived parameters") {
  ScenarioConfig c;
  CHECK(c.damage_sigma() == 0.025);
  c.features.gaussian_damage.sigma = 0.1;
  CHECK(c.damage_sigma() == 0.1);
  c.esg_preference = {1.0};
  CHECK(c.esg_preference_of(0) == 1.0);
  CHECK(c.esg_preference_of(2) == 0.0);
  const auto companies = company_policies(c);
  const auto investors = investor_policies(c);
  REQUIRE(companies.size() == 5);
  CHECK(companies[0].kind == policies::CompanyKind::Defector);
  REQUIRE(investors.size() == 3);
  CHECK(investors[0].kind == policies::InvestorKind::ProfitDriven);
  const auto mp = market_params(scenario_preset("greenwash_beta10"));
  CHECK(mp.greenwash_enabled);
  CHECK(mp.disclosure);
  CHECK(mp.greenwash_coeff == 10.0);
}
