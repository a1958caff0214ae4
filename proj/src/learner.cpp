#include "investesg/learner.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace investesg::learner {

using nlohmann::json;

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double uniform01(PolicyRng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::vector<double> rewards_to_go(const std::vector<double>& rewards, double discount) {
  std::vector<double> g(rewards.size());
  double acc = 0.0;
  for (std::size_t t = rewards.size(); t-- > 0;) {
    acc = rewards[t] + discount * acc;
    g[t] = acc;
  }
  return g;
}

// advantages[agent][trace][t]
using Advantages = std::vector<std::vector<std::vector<double>>>;

Gradient zero_gradient(const PolicyParams& params) {
  Gradient g;
  for (const auto& c : params.companies) g.company.emplace_back(c.logits.size(), 0.0);
  for (const auto& inv : params.investors) g.investor_logits.emplace_back(inv.logits.size(), 0.0);
  g.investor_esg.assign(params.investors.size(), 0.0);
  return g;
}

// Sums advantage * grad log pi over every applied sample.
Gradient accumulate(const PolicyParams& params, const std::vector<Trace>& traces, const Advantages& company_adv,
                    const Advantages& investor_adv) {
  Gradient g = zero_gradient(params);
  for (std::size_t i = 0; i < params.companies.size(); ++i) {
    const auto& pol = params.companies[i];
    std::vector<std::vector<double>> probs;
    for (int d = 0; d < pol.dims(); ++d) probs.push_back(pol.probabilities(d));
    auto& gi = g.company[i];
    for (std::size_t e = 0; e < traces.size(); ++e) {
      const auto& choice = traces[e].company_choice[i];
      for (std::size_t t = 0; t < choice.size(); ++t) {
        if (choice[t] < 0) continue;
        const double adv = company_adv[i][e][t];
        const auto l = pol.levels(static_cast<std::size_t>(choice[t]));
        for (std::size_t d = 0; d < l.size(); ++d) {
          double* block = gi.data() + d * kGridLevels;
          for (std::size_t a = 0; a < kGridLevels; ++a) block[a] -= adv * probs[d][a];
          block[static_cast<std::size_t>(l[d])] += adv;
        }
      }
    }
  }
  for (std::size_t j = 0; j < params.investors.size(); ++j) {
    const auto& pol = params.investors[j];
    auto& gl = g.investor_logits[j];
    for (std::size_t e = 0; e < traces.size(); ++e) {
      const auto& flags = traces[e].investor_flag[j];
      for (std::size_t t = 0; t < flags.size(); ++t) {
        const double adv = investor_adv[j][e][t];
        for (std::size_t i = 0; i < flags[t].size(); ++i) {
          if (flags[t][i] < 0) continue;
          const double feature = traces[e].esg_feature[t][i];
          const double p = sigmoid(pol.logits[i] + pol.esg_weight * feature);
          const double score = adv * (static_cast<double>(flags[t][i]) - p);
          gl[i] += score;
          g.investor_esg[j] += score * feature;
        }
      }
    }
  }
  return g;
}

Advantages raw_advantages(const std::vector<Trace>& traces, bool company, std::size_t agents,
                          const std::vector<std::vector<double>>* baseline, double discount) {
  Advantages adv(agents, std::vector<std::vector<double>>(traces.size()));
  for (std::size_t a = 0; a < agents; ++a) {
    for (std::size_t e = 0; e < traces.size(); ++e) {
      const auto& rewards = company ? traces[e].company_reward[a] : traces[e].investor_reward[a];
      auto g = rewards_to_go(rewards, discount);
      if (baseline != nullptr)
        for (std::size_t t = 0; t < g.size(); ++t) g[t] -= (*baseline)[a][t];
      adv[a][e] = std::move(g);
    }
  }
  return adv;
}

void check_finite(const PolicyParams& params, int iteration) {
  for (std::size_t i = 0; i < params.companies.size(); ++i)
    for (double x : params.companies[i].logits)
      if (!std::isfinite(x)) throw LearnerDivergence(iteration, "company " + std::to_string(i) + " logits");
  for (std::size_t j = 0; j < params.investors.size(); ++j) {
    const auto& inv = params.investors[j];
    bool ok = std::isfinite(inv.esg_weight);
    for (double x : inv.logits) ok = ok && std::isfinite(x);
    if (!ok) throw LearnerDivergence(iteration, "investor " + std::to_string(j) + " parameters");
  }
}

}  // namespace

double grid_value(int level) { return level * kGridStep; }

std::vector<double> esg_features(std::span<const double> disclosed_esg, std::span<const bool> active) {
  std::vector<double> f(active.size(), 0.0);
  double sum = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < active.size(); ++i) {
    if (!active[i]) continue;
    sum += disclosed_esg[i];
    ++n;
  }
  if (n == 0) return f;
  const double mean = sum / n;
  for (std::size_t i = 0; i < active.size(); ++i)
    if (active[i]) f[i] = (disclosed_esg[i] - mean) / kEsgFeatureScale;
  return f;
}

std::vector<int> CompanyPolicy::levels(std::size_t index) const {
  std::vector<int> l(static_cast<std::size_t>(dims()));
  for (std::size_t d = l.size(); d-- > 0;) {
    l[d] = static_cast<int>(index % kGridLevels);
    index /= kGridLevels;
  }
  return l;
}

std::size_t CompanyPolicy::index_of(const std::vector<int>& levels) const {
  std::size_t index = 0;
  for (int l : levels) index = index * kGridLevels + static_cast<std::size_t>(l);
  return index;
}

market::CompanyAction CompanyPolicy::action(std::size_t index) const {
  const auto l = levels(index);
  market::CompanyAction a;
  std::size_t d = 0;
  a.mitigation = grid_value(l[d++]);
  if (greenwash) a.greenwash = grid_value(l[d++]);
  if (resilience) a.resilience = grid_value(l[d++]);
  return a;
}

std::vector<double> CompanyPolicy::probabilities(int dim) const {
  const auto first = logits.begin() + static_cast<std::ptrdiff_t>(dim) * kGridLevels;
  std::vector<double> p(first, first + kGridLevels);
  const double hi = *std::max_element(p.begin(), p.end());
  double z = 0.0;
  for (double& x : p) {
    x = std::exp(x - hi);
    z += x;
  }
  for (double& x : p) x /= z;
  return p;
}

std::vector<double> CompanyPolicy::joint_probabilities() const {
  std::vector<std::vector<double>> per_dim;
  for (int d = 0; d < dims(); ++d) per_dim.push_back(probabilities(d));
  std::vector<double> p(num_actions());
  for (std::size_t a = 0; a < p.size(); ++a) {
    const auto l = levels(a);
    double q = 1.0;
    for (std::size_t d = 0; d < l.size(); ++d) q *= per_dim[d][static_cast<std::size_t>(l[d])];
    p[a] = q;
  }
  return p;
}

std::size_t CompanyPolicy::greedy() const {
  std::vector<int> l;
  for (int d = 0; d < dims(); ++d) {
    const auto first = logits.begin() + static_cast<std::ptrdiff_t>(d) * kGridLevels;
    l.push_back(static_cast<int>(std::max_element(first, first + kGridLevels) - first));
  }
  return index_of(l);
}

std::size_t CompanyPolicy::sample(PolicyRng& rng) const {
  std::vector<int> l;
  for (int d = 0; d < dims(); ++d) {
    const auto p = probabilities(d);
    const double u = uniform01(rng);
    double acc = 0.0;
    int pick = kGridLevels - 1;
    for (int a = 0; a < kGridLevels; ++a) {
      acc += p[static_cast<std::size_t>(a)];
      if (u < acc) {
        pick = a;
        break;
      }
    }
    l.push_back(pick);
  }
  return index_of(l);
}

PolicyParams initial_params(const ScenarioConfig& config, std::uint64_t seed) {
  PolicyParams params;
  PolicyRng rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double scale = config.learner.init_logit_scale;
  for (int i = 0; i < config.num_companies; ++i) {
    CompanyPolicy c;
    c.greenwash = config.features.greenwash;
    c.resilience = config.features.resilience;
    c.logits.assign(static_cast<std::size_t>(c.dims() * kGridLevels), 0.0);
    if (scale > 0.0)
      for (double& x : c.logits) x = scale * noise(rng);
    params.companies.push_back(std::move(c));
  }
  for (int j = 0; j < config.num_investors; ++j) {
    InvestorPolicy inv;
    inv.logits.assign(static_cast<std::size_t>(config.num_companies), 0.0);
    if (scale > 0.0)
      for (double& x : inv.logits) x = scale * noise(rng);
    params.investors.push_back(std::move(inv));
  }
  return params;
}

Trace sample_trace(const ScenarioConfig& config, const PolicyParams& params, SeedPair seeds) {
  Episode episode(config, seeds, false);
  const auto m = static_cast<std::size_t>(config.num_companies);
  const auto n = static_cast<std::size_t>(config.num_investors);
  const auto horizon = static_cast<std::size_t>(config.horizon);
  if (params.companies.size() != m || params.investors.size() != n)
    throw std::invalid_argument("policy parameters do not match the agent counts");
  Trace tr;
  tr.company_choice.assign(m, std::vector<int>(horizon, -1));
  tr.company_reward.assign(m, std::vector<double>(horizon, 0.0));
  tr.investor_flag.assign(n, std::vector<std::vector<signed char>>(horizon, std::vector<signed char>(m, -1)));
  tr.esg_feature.assign(horizon, std::vector<double>(m, 0.0));
  tr.investor_reward.assign(n, std::vector<double>(horizon, 0.0));

  std::vector<market::CompanyAction> companies(m);
  std::vector<market::InvestorAction> investors(n);
  auto& rng = episode.policy_rng();
  while (!episode.done()) {
    const auto t = static_cast<std::size_t>(episode.period());
    const auto ctx = episode.context();
    const bool decide = episode.company_decision_period();
    for (std::size_t i = 0; i < m; ++i) {
      companies[i] = {};
      if (!ctx.active[i] || !decide) continue;
      const auto idx = params.companies[i].sample(rng);
      companies[i] = params.companies[i].action(idx);
      if (!episode.seeded_mitigation(i)) tr.company_choice[i][t] = static_cast<int>(idx);
    }
    tr.esg_feature[t] = esg_features(ctx.disclosed_esg, ctx.active);
    for (std::size_t j = 0; j < n; ++j) {
      investors[j].invest.assign(m, 0);
      for (std::size_t i = 0; i < m; ++i) {
        if (!ctx.active[i]) continue;
        const double p = sigmoid(params.investors[j].logit(i, tr.esg_feature[t][i]));
        const bool flag = uniform01(rng) < p;
        investors[j].invest[i] = flag ? 1 : 0;
        tr.investor_flag[j][t][i] = flag ? 1 : 0;
      }
    }
    const auto& result = episode.step(companies, investors);
    for (std::size_t i = 0; i < m; ++i) tr.company_reward[i][t] = result.company_rewards[i];
    for (std::size_t j = 0; j < n; ++j) tr.investor_reward[j][t] = result.investor_rewards[j];
  }
  tr.periods = episode.period();
  tr.summary = episode.summary();
  return tr;
}

Gradient reinforce_gradient(const PolicyParams& params, const std::vector<Trace>& traces,
                            const Baselines* baselines, double discount) {
  if (traces.empty()) return zero_gradient(params);
  const auto cadv =
      raw_advantages(traces, true, params.companies.size(), baselines ? &baselines->company : nullptr, discount);
  const auto iadv =
      raw_advantages(traces, false, params.investors.size(), baselines ? &baselines->investor : nullptr, discount);
  Gradient g = accumulate(params, traces, cadv, iadv);
  const double inv = 1.0 / static_cast<double>(traces.size());
  for (auto& v : g.company)
    for (double& x : v) x *= inv;
  for (auto& v : g.investor_logits)
    for (double& x : v) x *= inv;
  for (double& x : g.investor_esg) x *= inv;
  return g;
}

namespace {

// Centers and scales each agent's advantages to zero mean and unit standard
// deviation over the samples that contribute to its gradient, and counts
// those samples.
std::vector<double> normalize(Advantages& adv, const std::vector<Trace>& traces, bool company) {
  std::vector<double> counts(adv.size(), 0.0);
  for (std::size_t a = 0; a < adv.size(); ++a) {
    double sum = 0.0, sq = 0.0, n = 0.0;
    for (std::size_t e = 0; e < traces.size(); ++e) {
      for (std::size_t t = 0; t < adv[a][e].size(); ++t) {
        const bool used = company ? traces[e].company_choice[a][t] >= 0
                                  : std::any_of(traces[e].investor_flag[a][t].begin(),
                                                traces[e].investor_flag[a][t].end(), [](signed char f) { return f >= 0; });
        if (!used) continue;
        sum += adv[a][e][t];
        sq += adv[a][e][t] * adv[a][e][t];
        n += 1.0;
      }
    }
    counts[a] = n;
    if (n < 2.0) continue;
    const double mean = sum / n;
    const double var = std::max(0.0, sq / n - mean * mean);
    const double sd = std::sqrt(var);
    const double scale = sd > 1e-12 ? 1.0 / sd : 0.0;
    for (auto& row : adv[a])
      for (double& x : row) x = (x - mean) * scale;
  }
  return counts;
}

void update_baseline(std::vector<std::vector<double>>& baseline, const std::vector<Trace>& traces, bool company,
                     double decay, double discount, bool first) {
  for (std::size_t a = 0; a < baseline.size(); ++a) {
    std::vector<double> mean(baseline[a].size(), 0.0);
    for (const auto& tr : traces) {
      const auto g = rewards_to_go(company ? tr.company_reward[a] : tr.investor_reward[a], discount);
      for (std::size_t t = 0; t < g.size(); ++t) mean[t] += g[t] / static_cast<double>(traces.size());
    }
    for (std::size_t t = 0; t < mean.size(); ++t)
      baseline[a][t] = first ? mean[t] : decay * baseline[a][t] + (1.0 - decay) * mean[t];
  }
}

}  // namespace

TrainResult train_independent(const ScenarioConfig& config, SeedPair seeds, const IterationCallback& on_iteration) {
  config.validate();
  const auto& ls = config.learner;
  const auto m = static_cast<std::size_t>(config.num_companies);
  const auto n = static_cast<std::size_t>(config.num_investors);
  const auto horizon = static_cast<std::size_t>(config.horizon);

  TrainResult result;
  auto& params = result.params;
  params = initial_params(config, seeds.policy);
  auto& report = result.report;
  report.iterations = ls.iterations;
  report.window = std::min(ls.report_window, ls.iterations);
  report.company_return_curves.assign(m, {});
  report.investor_return_curves.assign(n, {});

  Baselines baselines;
  baselines.company.assign(m, std::vector<double>(horizon, 0.0));
  baselines.investor.assign(n, std::vector<double>(horizon, 0.0));
  PolicyRng sampler(seeds.policy ^ 0x2545f4914f6cdd1dULL);
  std::uint64_t episode_index = 0;

  for (int it = 0; it < ls.iterations; ++it) {
    std::vector<Trace> traces;
    for (int e = 0; e < ls.episodes_per_iteration; ++e, ++episode_index) {
      SeedPair s{config.features.fixed_climate_seed ? seeds.climate : seeds.climate + episode_index, sampler()};
      traces.push_back(sample_trace(config, params, s));
    }
    const bool first = it == 0;
    if (first) {
      update_baseline(baselines.company, traces, true, ls.baseline_decay, ls.discount, true);
      update_baseline(baselines.investor, traces, false, ls.baseline_decay, ls.discount, true);
    }
    auto cadv = raw_advantages(traces, true, m, &baselines.company, ls.discount);
    auto iadv = raw_advantages(traces, false, n, &baselines.investor, ls.discount);
    const auto ccount = normalize(cadv, traces, true);
    const auto icount = normalize(iadv, traces, false);
    const Gradient g = accumulate(params, traces, cadv, iadv);

    for (std::size_t i = 0; i < m; ++i) {
      if (ccount[i] <= 0.0) continue;
      const double step = ls.company_learning_rate / ccount[i];
      for (std::size_t a = 0; a < g.company[i].size(); ++a) params.companies[i].logits[a] += step * g.company[i][a];
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (icount[j] <= 0.0) continue;
      const double step = ls.investor_learning_rate / icount[j];
      for (std::size_t i = 0; i < m; ++i) params.investors[j].logits[i] += step * g.investor_logits[j][i];
      params.investors[j].esg_weight += step * g.investor_esg[j];
    }
    check_finite(params, it);
    if (!first) {
      update_baseline(baselines.company, traces, true, ls.baseline_decay, ls.discount, false);
      update_baseline(baselines.investor, traces, false, ls.baseline_decay, ls.discount, false);
    }

    double mit = 0.0, risk = 0.0, wealth = 0.0;
    std::vector<double> cret(m, 0.0), iret(n, 0.0);
    const double inv = 1.0 / static_cast<double>(traces.size());
    for (const auto& tr : traces) {
      mit += tr.summary.cumulative_mitigation * inv;
      risk += tr.summary.final_risk * inv;
      wealth += tr.summary.final_wealth * inv;
      for (std::size_t i = 0; i < m; ++i) cret[i] += tr.summary.company_returns[i] * inv;
      for (std::size_t j = 0; j < n; ++j) iret[j] += tr.summary.investor_returns[j] * inv;
    }
    report.mitigation_curve.push_back(mit);
    report.risk_curve.push_back(risk);
    report.wealth_curve.push_back(wealth);
    for (std::size_t i = 0; i < m; ++i) report.company_return_curves[i].push_back(cret[i]);
    for (std::size_t j = 0; j < n; ++j) report.investor_return_curves[j].push_back(iret[j]);
    if (on_iteration) on_iteration(it, params);
  }

  if (report.window > 0) {
    const auto tail = [&](const std::vector<double>& v) {
      double s = 0.0;
      for (std::size_t k = v.size() - static_cast<std::size_t>(report.window); k < v.size(); ++k) s += v[k];
      return s / report.window;
    };
    report.mitigation_spend = tail(report.mitigation_curve);
    report.final_risk = tail(report.risk_curve);
    report.final_wealth = tail(report.wealth_curve);
  }
  return result;
}

void GreedyController::act(const DecisionContext& ctx, PolicyRng& /*rng*/,
                           std::vector<market::CompanyAction>& companies,
                           std::vector<market::InvestorAction>& investors) {
  const std::size_t m = ctx.active.size();
  companies.assign(m, {});
  for (std::size_t i = 0; i < m; ++i)
    if (ctx.active[i]) companies[i] = params_.companies[i].action(params_.companies[i].greedy());
  investors.resize(params_.investors.size());
  const auto features = esg_features(ctx.disclosed_esg, ctx.active);
  for (std::size_t j = 0; j < params_.investors.size(); ++j) {
    investors[j].invest.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i)
      investors[j].invest[i] = ctx.active[i] && params_.investors[j].logit(i, features[i]) > 0.0 ? 1 : 0;
  }
}

BatchResult evaluate(const PolicyParams& params, const ScenarioConfig& config, const std::vector<SeedPair>& seeds,
                     int threads) {
  return run_sequential(
      config, seeds, [&params] { return std::make_unique<GreedyController>(params); }, threads);
}

json report_json(const TrainReport& r) {
  return json{{"iterations", r.iterations},
              {"window", r.window},
              {"mitigation_spend", r.mitigation_spend},
              {"final_risk", r.final_risk},
              {"final_wealth", r.final_wealth},
              {"mitigation_curve", r.mitigation_curve},
              {"risk_curve", r.risk_curve},
              {"wealth_curve", r.wealth_curve},
              {"company_return_curves", r.company_return_curves},
              {"investor_return_curves", r.investor_return_curves}};
}

json params_json(const PolicyParams& p) {
  json companies = json::array();
  for (const auto& c : p.companies) {
    const auto a = c.action(c.greedy());
    companies.push_back({{"logits", c.logits},
                         {"greedy_action", {a.mitigation, a.greenwash, a.resilience}},
                         {"greenwash_enabled", c.greenwash},
                         {"resilience_enabled", c.resilience}});
  }
  json investors = json::array();
  for (const auto& inv : p.investors) investors.push_back({{"logits", inv.logits}, {"esg_weight", inv.esg_weight}});
  return json{{"companies", companies}, {"investors", investors}};
}

}  // namespace investesg::learner
