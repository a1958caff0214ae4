#include "investesg/schelling.hpp"

#include <stdexcept>

#include "investesg/outputs.hpp"

namespace investesg::schelling {

namespace {

ScenarioConfig cell_config(const ScenarioConfig& config, const Setup& setup, int k, bool focal_cooperates) {
  ScenarioConfig c = config;
  const auto m = static_cast<std::size_t>(config.num_companies);
  c.policies.companies.assign(m, setup.defector);
  c.policies.companies[0] = focal_cooperates ? setup.cooperator : setup.defector;
  for (std::size_t i = 1; i <= static_cast<std::size_t>(k); ++i) c.policies.companies[i] = setup.cooperator;
  if (!setup.investors.empty()) c.policies.investors = setup.investors;
  return c;
}

}  // namespace

Point cell(const ScenarioConfig& config, const Setup& setup, int k) {
  if (k < 0 || k > config.num_companies - 1)
    throw std::out_of_range("k=" + std::to_string(k) + " outside [0, " + std::to_string(config.num_companies - 1) +
                            "]");
  if (setup.seeds.empty()) throw std::invalid_argument("Schelling analysis needs at least one seed");
  std::vector<SeedPair> seeds;
  for (auto s : setup.seeds) seeds.push_back({s, s});
  BatchOptions options;
  options.threads = setup.threads;

  Point p;
  p.k = k;
  const auto coop = run_batch(cell_config(config, setup, k, true), seeds, options);
  const auto defect = run_batch(cell_config(config, setup, k, false), seeds, options);
  for (std::size_t e = 0; e < seeds.size(); ++e) {
    p.cooperate.push_back(coop.episodes[e].company_returns[0]);
    const auto& returns = defect.episodes[e].company_returns;
    p.defect.push_back(returns[0]);
    double total = 0.0;
    for (double r : returns) total += r;
    p.average_when_defect.push_back(total / static_cast<double>(returns.size()));
  }
  p.cooperate_stats = aggregate(p.cooperate);
  p.defect_stats = aggregate(p.defect);
  p.average_stats = aggregate(p.average_when_defect);
  return p;
}

Curve curve(const ScenarioConfig& config, const Setup& setup) {
  config.validate();
  Curve c;
  c.seeds = setup.seeds;
  c.horizon = config.horizon;
  for (int k = 0; k < config.num_companies; ++k) c.points.push_back(cell(config, setup, k));
  return c;
}

Verdict is_social_dilemma(const Curve& curve) {
  Verdict v;
  for (std::size_t n = 0; n < curve.points.size(); ++n) {
    const auto& p = curve.points[n];
    if (!(p.defect_stats.mean > p.cooperate_stats.mean)) v.non_dominated_k.push_back(p.k);
    if (n > 0 && !(p.average_stats.mean > curve.points[n - 1].average_stats.mean)) v.non_increasing_k.push_back(p.k);
  }
  v.defect_dominates = !curve.points.empty() && v.non_dominated_k.empty();
  v.average_increasing = v.non_increasing_k.empty();
  v.social_dilemma = v.defect_dominates && v.average_increasing;
  return v;
}

std::string Verdict::describe() const {
  auto list = [](const std::vector<int>& ks) {
    std::string s;
    for (int k : ks) s += (s.empty() ? "" : ",") + std::to_string(k);
    return s;
  };
  std::string out = social_dilemma ? "social dilemma" : "not a social dilemma";
  if (!non_dominated_k.empty()) out += "; defection does not dominate at k=" + list(non_dominated_k);
  if (!non_increasing_k.empty()) out += "; average payoff does not increase at k=" + list(non_increasing_k);
  return out;
}

std::string table(const Curve& curve) {
  std::string out = "k,coop_mean,coop_stderr,defect_mean,defect_stderr,avg_defect_mean\n";
  for (const auto& p : curve.points) {
    out += std::to_string(p.k);
    for (double v : {p.cooperate_stats.mean, p.cooperate_stats.std_error, p.defect_stats.mean,
                     p.defect_stats.std_error, p.average_stats.mean}) {
      out += ',';
      out += format_number(v);
    }
    out += '\n';
  }
  return out;
}

}  // namespace investesg::schelling
