#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <stdexcept>

#include "investesg/episode.hpp"
#include "investesg/schelling.hpp"
#include "schelling_setups.hpp"

using namespace investesg;

namespace {

schelling::Point flat_point(int k, double payoff) {
  schelling::Point p;
  p.k = k;
  p.cooperate = p.defect = p.average_when_defect = {payoff};
  p.cooperate_stats = p.defect_stats = p.average_stats = aggregate({payoff});
  return p;
}

std::vector<std::uint64_t> seed_range(std::uint64_t from, std::uint64_t count) {
  std::vector<std::uint64_t> s(count);
  std::iota(s.begin(), s.end(), from);
  return s;
}

}  // namespace

TEST_CASE("k outside [0, M-1] is rejected") {
  const auto e = experiments::profit_driven();
  CHECK_THROWS_AS(schelling::cell(e.config, e.setup, -1), std::out_of_range);
  CHECK_THROWS_AS(schelling::cell(e.config, e.setup, 5), std::out_of_range);
  CHECK_NOTHROW(schelling::cell(e.config, e.setup, 4));
}

TEST_CASE("a single company gives a single point") {
  auto e = experiments::profit_driven({0});
  e.config.num_companies = 1;
  e.config.policies.companies.clear();
  const auto c = experiments::run(e);
  REQUIRE(c.points.size() == 1);
  CHECK(c.points[0].k == 0);
  CHECK(c.points[0].cooperate.size() == 1);
}

TEST_CASE("cells pair focal roles on the same seeds") {
  const auto e = experiments::profit_driven({4, 5});
  const auto p = schelling::cell(e.config, e.setup, 2);
  REQUIRE(p.cooperate.size() == 2);
  // With the focal company defecting, the cell is an ordinary episode with
  // two cooperators among the others.
  auto c = e.config;
  c.policies.companies.assign(5, e.setup.defector);
  c.policies.companies[1] = c.policies.companies[2] = e.setup.cooperator;
  c.policies.investors = e.setup.investors;
  const auto record = run_episode(c, {5, 5}, false);
  CHECK(p.defect[1] == record.summary.company_returns[0]);
  double total = 0.0;
  for (double r : record.summary.company_returns) total += r;
  CHECK(p.average_when_defect[1] == total / 5.0);
}

TEST_CASE("flat identical curves are not a dilemma") {
  schelling::Curve flat;
  for (int k = 0; k < 5; ++k) flat.points.push_back(flat_point(k, 3.0));
  const auto v = schelling::is_social_dilemma(flat);
  CHECK_FALSE(v.social_dilemma);
  CHECK(v.non_dominated_k.size() == 5);
  CHECK(v.non_increasing_k.size() == 4);
  CHECK(schelling::is_social_dilemma(schelling::Curve{}).social_dilemma == false);
}

TEST_CASE("profit-driven investors: defection dominates and the average rises with k") {
  const auto curve = experiments::run(experiments::profit_driven());
  const auto v = schelling::is_social_dilemma(curve);
  INFO(v.describe());
  INFO(schelling::table(curve));
  CHECK(v.social_dilemma);
}

TEST_CASE("infinitely conscious investors: cooperation beats defection at every k") {
  const auto curve = experiments::run(experiments::conscious());
  INFO(schelling::table(curve));
  CHECK(experiments::cooperation_dominates(curve));
  CHECK_FALSE(schelling::is_social_dilemma(curve).social_dilemma);
}

TEST_CASE("greenwashing defectors reintroduce the dilemma") {
  const auto curve = experiments::run(experiments::greenwashers());
  const auto v = schelling::is_social_dilemma(curve);
  INFO(v.describe());
  CHECK(v.social_dilemma);
}

TEST_CASE("expected curves over 200 seeds keep the same shape") {
  const auto seeds = seed_range(1000, 200);
  const auto a = experiments::run(experiments::profit_driven(seeds, 4));
  CHECK(schelling::is_social_dilemma(a).social_dilemma);
  const auto c = experiments::run(experiments::conscious(seeds, 4));
  CHECK(experiments::cooperation_dominates(c));
  const auto e = experiments::run(experiments::greenwashers(seeds, 4));
  CHECK(schelling::is_social_dilemma(e).social_dilemma);
}

TEST_CASE("all-cooperator episodes end with lower climate risk than all-defector episodes") {
  auto coop = scenario_preset("mandate");
  coop.policies.companies.assign(5, {policies::CompanyKind::Cooperator, {}});
  auto defect = coop;
  defect.policies.companies.assign(5, {policies::CompanyKind::Defector, {}});
  for (std::uint64_t s = 0; s < 5; ++s) {
    CAPTURE(s);
    CHECK(run_episode(coop, {s, s}, false).summary.final_risk < run_episode(defect, {s, s}, false).summary.final_risk);
  }
}

TEST_CASE("table lists one row per k") {
  const auto curve = experiments::run(experiments::profit_driven({0}));
  const auto text = schelling::table(curve);
  CHECK(text.rfind("k,coop_mean,coop_stderr,defect_mean,defect_stderr,avg_defect_mean\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 6);
}
