#include "investesg/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace investesg {

using nlohmann::json;

namespace {

json risks_to_json(const climate::ClimateRisks& r) { return json::array({r.heat, r.precip, r.drought}); }

json company_policy_to_json(const policies::ScriptedCompanyPolicy& p) {
  if (p.kind != policies::CompanyKind::Custom) return std::string(policies::to_string(p.kind));
  return json{{"kind", "custom"},
              {"mitigation", p.custom.mitigation},
              {"greenwash", p.custom.greenwash},
              {"resilience", p.custom.resilience}};
}

// Strict reader over one JSON object: every key must be consumed.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
    if (!obj_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  [[nodiscard]] std::string key_path(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  const json* find(const std::string& key) {
    auto it = obj_.find(key);
    if (it == obj_.end()) return nullptr;
    seen_.insert(key);
    return &*it;
  }

  template <class T>
  void read(const std::string& key, T& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v->is_boolean()) throw ConfigError(key_path(key), "expected a boolean");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v->is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v->is_number()) throw ConfigError(key_path(key), "expected a number");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v->is_string()) throw ConfigError(key_path(key), "expected a string");
      }
      out = v->get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(key_path(key), e.what());
    }
  }

  void read_risks(const std::string& key, climate::ClimateRisks& out) {
    const json* v = find(key);
    if (v == nullptr) return;
    out = parse_risks(*v, key_path(key));
  }

  static climate::ClimateRisks parse_risks(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) throw ConfigError(path, "expected an array of 3 numbers");
    std::array<double, 3> a{};
    for (std::size_t e = 0; e < 3; ++e) {
      if (!v[e].is_number()) throw ConfigError(path, "expected an array of 3 numbers");
      a[e] = v[e].get<double>();
    }
    return climate::ClimateRisks::from_array(a);
  }

  ObjectReader child(const std::string& key, const json& fallback) {
    const json* v = find(key);
    return ObjectReader(v != nullptr ? *v : fallback, key_path(key));
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.contains(it.key())) throw ConfigError(key_path(it.key()), "unknown key");
    }
  }

 private:
  const json& obj_;
  std::string path_;
  std::set<std::string> seen_;
};

policies::ScriptedCompanyPolicy parse_company_policy(const json& v, const std::string& path) {
  if (v.is_string()) {
    const auto kind = policies::parse_company_kind(v.get<std::string>());
    if (!kind || *kind == policies::CompanyKind::Custom)
      throw ConfigError(path, "unknown company policy '" + v.get<std::string>() + "'");
    return {*kind, {}};
  }
  ObjectReader r(v, path);
  std::string kind;
  r.read("kind", kind);
  if (kind != "custom") throw ConfigError(r.key_path("kind"), "object policies must have kind 'custom'");
  policies::ScriptedCompanyPolicy p{policies::CompanyKind::Custom, {}};
  r.read("mitigation", p.custom.mitigation);
  r.read("greenwash", p.custom.greenwash);
  r.read("resilience", p.custom.resilience);
  r.finish();
  return p;
}

policies::ScriptedInvestorPolicy parse_investor_policy(const json& v, const std::string& path) {
  if (!v.is_string()) throw ConfigError(path, "expected an investor policy name");
  const auto kind = policies::parse_investor_kind(v.get<std::string>());
  if (!kind) throw ConfigError(path, "unknown investor policy '" + v.get<std::string>() + "'");
  return {*kind};
}

template <class Policy, class Parse>
std::vector<Policy> parse_policy_list(const json& v, const std::string& path, int count, Parse parse) {
  std::vector<Policy> out;
  if (v.is_array()) {
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(parse(v[i], path + "[" + std::to_string(i) + "]"));
  } else {
    out.assign(static_cast<std::size_t>(std::max(count, 0)), parse(v, path));
  }
  return out;
}

}  // namespace

void ScenarioConfig::validate() const {
  auto require = [](bool ok, const char* path, const std::string& msg) {
    if (!ok) throw ConfigError(path, msg);
  };
  auto finite_nonneg = [](double x) { return std::isfinite(x) && x >= 0.0; };
  require(num_companies >= 1, "num_companies", "must be >= 1");
  require(num_investors >= 0, "num_investors", "must be >= 0");
  require(std::isfinite(company_capital) && company_capital > 0.0, "company_capital", "must be > 0");
  require(finite_nonneg(investor_capital), "investor_capital", "must be >= 0");
  require(std::isfinite(growth_rate) && growth_rate > -1.0, "growth_rate", "must be > -1");
  require(std::isfinite(greenwash_coeff) && greenwash_coeff > 0.0, "greenwash_coeff", "must be > 0");
  if (features.greenwash)
    require(greenwash_coeff > 1.0, "greenwash_coeff", "must be > 1 when greenwashing is enabled");
  require(initial_vulnerability >= 0.0 && initial_vulnerability <= 1.0, "initial_vulnerability",
          "must lie in [0,1]");
  require(std::isfinite(resilience_efficiency) && resilience_efficiency > 0.0, "resilience_efficiency",
          "must be > 0");
  require(esg_preference.size() <= static_cast<std::size_t>(num_investors), "esg_preference",
          "has more entries than investors");
  for (double a : esg_preference) require(finite_nonneg(a), "esg_preference", "entries must be finite and >= 0");
  require(horizon >= 0, "horizon", "must be >= 0");
  require(std::isfinite(climate.mitigation_budget) && climate.mitigation_budget > 0.0,
          "climate.mitigation_budget", "must be > 0");
  if (!climate.target_at_80)
    require(climate.target_fraction > 0.0 && climate.target_fraction <= 1.0, "climate.target_fraction",
            "must lie in (0,1]");
  try {
    climate_params(*this).validate();
  } catch (const climate::CalibrationError& e) {
    throw ConfigError("climate", e.what());
  }
  require(features.lock_in_years >= 0, "features.lock_in_years", "must be >= 0");
  if (features.gaussian_damage.sigma)
    require(finite_nonneg(*features.gaussian_damage.sigma), "features.gaussian_damage.sigma", "must be >= 0");
  const auto& rd = features.real_data_seeding;
  require(rd.periods >= 0, "features.real_data_seeding.periods", "must be >= 0");
  require(rd.low >= 0.0 && rd.low <= rd.high && rd.high <= 1.0, "features.real_data_seeding",
          "requires 0 <= low <= high <= 1");
  require(policies.companies.empty() || policies.companies.size() == static_cast<std::size_t>(num_companies),
          "policies.companies", "must list one policy per company");
  require(policies.investors.empty() || policies.investors.size() == static_cast<std::size_t>(num_investors),
          "policies.investors", "must list one policy per investor");
  for (const auto& p : policies.companies) {
    if (p.kind != policies::CompanyKind::Custom) continue;
    const auto& a = p.custom;
    auto unit = [](double x) { return x >= 0.0 && x <= 1.0; };
    require(unit(a.mitigation) && unit(a.greenwash) && unit(a.resilience), "policies.companies",
            "custom fractions must lie in [0,1]");
  }
  require(batch_size >= 1, "batch_size", "must be >= 1");
  require(threads >= 1, "threads", "must be >= 1");
  require(learner.iterations >= 0, "learner.iterations", "must be >= 0");
  require(learner.episodes_per_iteration >= 1, "learner.episodes_per_iteration", "must be >= 1");
  require(learner.company_learning_rate >= 0.0, "learner.company_learning_rate", "must be >= 0");
  require(learner.investor_learning_rate >= 0.0, "learner.investor_learning_rate", "must be >= 0");
  require(learner.baseline_decay >= 0.0 && learner.baseline_decay < 1.0, "learner.baseline_decay",
          "must lie in [0,1)");
  require(learner.discount > 0.0 && learner.discount <= 1.0, "learner.discount", "must lie in (0,1]");
  require(learner.report_window >= 1, "learner.report_window", "must be >= 1");
}

climate::ClimateParams climate_params(const ScenarioConfig& config) {
  climate::ClimateParams params;
  params.base = config.climate.base;
  params.growth = climate::derive_growth_rates(config.climate.base, config.climate.no_mitigation_at_80);
  params.horizon = config.horizon;
  climate::ClimateRisks target;
  if (config.climate.target_at_80) {
    target = *config.climate.target_at_80;
  } else {
    std::array<double, 3> t{};
    for (std::size_t e = 0; e < 3; ++e)
      t[e] = params.base[e] + config.climate.target_fraction * params.growth[e] * climate::kCalibrationPeriod;
    target = climate::ClimateRisks::from_array(t);
  }
  params.elasticity = climate::calibrate_elasticity(config.climate.mitigation_budget, target, params);
  return params;
}

market::MarketParams market_params(const ScenarioConfig& config) {
  market::MarketParams p;
  p.climate = climate_params(config);
  p.growth_rate = config.growth_rate;
  p.greenwash_coeff = config.greenwash_coeff;
  p.disclosure = config.features.disclosure;
  p.greenwash_enabled = config.features.greenwash;
  p.resilience_enabled = config.features.resilience;
  p.strict_bankruptcy = config.features.strict_bankruptcy;
  p.gaussian_damage = config.features.gaussian_damage.enabled;
  p.damage_sigma = config.damage_sigma();
  return p;
}

market::MarketState initial_state(const ScenarioConfig& config) {
  std::vector<double> alphas(static_cast<std::size_t>(config.num_investors));
  for (std::size_t j = 0; j < alphas.size(); ++j) alphas[j] = config.esg_preference_of(j);
  return market::initial_state(static_cast<std::size_t>(config.num_companies),
                               static_cast<std::size_t>(config.num_investors), config.company_capital,
                               config.investor_capital, alphas, config.initial_vulnerability,
                               config.resilience_efficiency, climate_params(config));
}

std::vector<policies::ScriptedCompanyPolicy> company_policies(const ScenarioConfig& config) {
  if (!config.policies.companies.empty()) return config.policies.companies;
  return std::vector<policies::ScriptedCompanyPolicy>(static_cast<std::size_t>(config.num_companies));
}

std::vector<policies::ScriptedInvestorPolicy> investor_policies(const ScenarioConfig& config) {
  if (!config.policies.investors.empty()) return config.policies.investors;
  return std::vector<policies::ScriptedInvestorPolicy>(static_cast<std::size_t>(config.num_investors));
}

json to_json(const ScenarioConfig& c) {
  json companies = json::array();
  for (const auto& p : company_policies(c)) companies.push_back(company_policy_to_json(p));
  json investors = json::array();
  for (const auto& p : investor_policies(c)) investors.push_back(std::string(policies::to_string(p.kind)));
  std::vector<double> alphas(static_cast<std::size_t>(std::max(c.num_investors, 0)));
  for (std::size_t j = 0; j < alphas.size(); ++j) alphas[j] = c.esg_preference_of(j);

  json climate_doc{{"base", risks_to_json(c.climate.base)},
                   {"no_mitigation_at_80", risks_to_json(c.climate.no_mitigation_at_80)},
                   {"mitigation_budget", c.climate.mitigation_budget},
                   {"target_fraction", c.climate.target_fraction},
                   {"target_at_80", c.climate.target_at_80 ? risks_to_json(*c.climate.target_at_80) : json(nullptr)}};
  const auto& f = c.features;
  json features{{"disclosure", f.disclosure},
                {"greenwash", f.greenwash},
                {"resilience", f.resilience},
                {"more_info", f.more_info},
                {"fixed_climate_seed", f.fixed_climate_seed},
                {"lock_in_years", f.lock_in_years},
                {"strict_bankruptcy", f.strict_bankruptcy},
                {"gaussian_damage",
                 {{"enabled", f.gaussian_damage.enabled},
                  {"sigma", f.gaussian_damage.sigma ? json(*f.gaussian_damage.sigma) : json(nullptr)}}},
                {"real_data_seeding",
                 {{"enabled", f.real_data_seeding.enabled},
                  {"periods", f.real_data_seeding.periods},
                  {"low", f.real_data_seeding.low},
                  {"high", f.real_data_seeding.high}}}};
  const auto& l = c.learner;
  json learner{{"iterations", l.iterations},
               {"episodes_per_iteration", l.episodes_per_iteration},
               {"company_learning_rate", l.company_learning_rate},
               {"investor_learning_rate", l.investor_learning_rate},
               {"baseline_decay", l.baseline_decay},
               {"discount", l.discount},
               {"report_window", l.report_window},
               {"init_logit_scale", l.init_logit_scale},
               {"reference",
                {{"hidden_layers", l.reference.hidden_layers},
                 {"activation", l.reference.activation},
                 {"n_steps", l.reference.n_steps},
                 {"learning_rate", l.reference.learning_rate},
                 {"entropy_coef", l.reference.entropy_coef},
                 {"clip_range", l.reference.clip_range},
                 {"episodes", l.reference.episodes}}}};
  return json{{"name", c.name},
              {"num_companies", c.num_companies},
              {"num_investors", c.num_investors},
              {"company_capital", c.company_capital},
              {"investor_capital", c.investor_capital},
              {"growth_rate", c.growth_rate},
              {"greenwash_coeff", c.greenwash_coeff},
              {"initial_vulnerability", c.initial_vulnerability},
              {"resilience_efficiency", c.resilience_efficiency},
              {"esg_preference", alphas},
              {"horizon", c.horizon},
              {"climate", climate_doc},
              {"features", features},
              {"policies", {{"companies", companies}, {"investors", investors}}},
              {"seeds", {{"climate", c.seeds.climate}, {"policy", c.seeds.policy}}},
              {"batch_size", c.batch_size},
              {"threads", c.threads},
              {"learner", learner}};
}

ScenarioConfig config_from_json(const json& doc) {
  ScenarioConfig c;
  const json empty = json::object();
  ObjectReader r(doc, "");
  r.read("name", c.name);
  r.read("num_companies", c.num_companies);
  r.read("num_investors", c.num_investors);
  r.read("company_capital", c.company_capital);
  r.read("investor_capital", c.investor_capital);
  r.read("growth_rate", c.growth_rate);
  r.read("greenwash_coeff", c.greenwash_coeff);
  r.read("initial_vulnerability", c.initial_vulnerability);
  r.read("resilience_efficiency", c.resilience_efficiency);
  if (const json* v = r.find("esg_preference")) {
    if (v->is_number()) {
      c.esg_preference.assign(static_cast<std::size_t>(std::max(c.num_investors, 0)), v->get<double>());
    } else if (v->is_array()) {
      for (const auto& a : *v) {
        if (!a.is_number()) throw ConfigError("esg_preference", "expected numbers");
        c.esg_preference.push_back(a.get<double>());
      }
    } else {
      throw ConfigError("esg_preference", "expected a number or an array of numbers");
    }
  }
  r.read("horizon", c.horizon);
  {
    auto cr = r.child("climate", empty);
    cr.read_risks("base", c.climate.base);
    cr.read_risks("no_mitigation_at_80", c.climate.no_mitigation_at_80);
    cr.read("mitigation_budget", c.climate.mitigation_budget);
    cr.read("target_fraction", c.climate.target_fraction);
    if (const json* v = cr.find("target_at_80"); v != nullptr && !v->is_null())
      c.climate.target_at_80 = ObjectReader::parse_risks(*v, cr.key_path("target_at_80"));
    cr.finish();
  }
  {
    auto fr = r.child("features", empty);
    auto& f = c.features;
    fr.read("disclosure", f.disclosure);
    fr.read("greenwash", f.greenwash);
    fr.read("resilience", f.resilience);
    fr.read("more_info", f.more_info);
    fr.read("fixed_climate_seed", f.fixed_climate_seed);
    fr.read("lock_in_years", f.lock_in_years);
    fr.read("strict_bankruptcy", f.strict_bankruptcy);
    {
      auto gr = fr.child("gaussian_damage", empty);
      gr.read("enabled", f.gaussian_damage.enabled);
      if (const json* v = gr.find("sigma"); v != nullptr && !v->is_null()) {
        if (!v->is_number()) throw ConfigError(gr.key_path("sigma"), "expected a number");
        f.gaussian_damage.sigma = v->get<double>();
      }
      gr.finish();
    }
    {
      auto rr = fr.child("real_data_seeding", empty);
      rr.read("enabled", f.real_data_seeding.enabled);
      rr.read("periods", f.real_data_seeding.periods);
      rr.read("low", f.real_data_seeding.low);
      rr.read("high", f.real_data_seeding.high);
      rr.finish();
    }
    fr.finish();
  }
  {
    auto pr = r.child("policies", empty);
    if (const json* v = pr.find("companies"))
      c.policies.companies = parse_policy_list<policies::ScriptedCompanyPolicy>(
          *v, pr.key_path("companies"), c.num_companies, parse_company_policy);
    if (const json* v = pr.find("investors"))
      c.policies.investors = parse_policy_list<policies::ScriptedInvestorPolicy>(
          *v, pr.key_path("investors"), c.num_investors, parse_investor_policy);
    pr.finish();
  }
  {
    auto sr = r.child("seeds", empty);
    sr.read("climate", c.seeds.climate);
    sr.read("policy", c.seeds.policy);
    sr.finish();
  }
  r.read("batch_size", c.batch_size);
  r.read("threads", c.threads);
  {
    auto lr = r.child("learner", empty);
    auto& l = c.learner;
    lr.read("iterations", l.iterations);
    lr.read("episodes_per_iteration", l.episodes_per_iteration);
    lr.read("company_learning_rate", l.company_learning_rate);
    lr.read("investor_learning_rate", l.investor_learning_rate);
    lr.read("baseline_decay", l.baseline_decay);
    lr.read("discount", l.discount);
    lr.read("report_window", l.report_window);
    lr.read("init_logit_scale", l.init_logit_scale);
    {
      auto rr = lr.child("reference", empty);
      if (const json* v = rr.find("hidden_layers")) {
        try {
          l.reference.hidden_layers = v->get<std::vector<int>>();
        } catch (const json::exception&) {
          throw ConfigError(rr.key_path("hidden_layers"), "expected an array of integers");
        }
      }
      rr.read("activation", l.reference.activation);
      rr.read("n_steps", l.reference.n_steps);
      rr.read("learning_rate", l.reference.learning_rate);
      rr.read("entropy_coef", l.reference.entropy_coef);
      rr.read("clip_range", l.reference.clip_range);
      rr.read("episodes", l.reference.episodes);
      rr.finish();
    }
    lr.finish();
  }
  r.finish();
  return c;
}

ScenarioConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError("<document>", e.what());
  }
  return config_from_json(doc);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

ScenarioConfig mandate(double alpha) {
  ScenarioConfig c;
  c.features.disclosure = true;
  c.esg_preference.assign(3, alpha);
  return c;
}

using PresetFn = std::function<ScenarioConfig()>;

const std::vector<std::pair<std::string, PresetFn>>& preset_table() {
  static const std::vector<std::pair<std::string, PresetFn>> table = {
      {"status_quo", [] {
         ScenarioConfig c;
         c.esg_preference.assign(3, 0.0);
         return c;
       }},
      {"mandate", [] { return mandate(0.0); }},
      {"conscious_0.5", [] { return mandate(0.5); }},
      {"conscious_1", [] { return mandate(1.0); }},
      {"conscious_10", [] { return mandate(10.0); }},
      {"heterogeneous", [] {
         auto c = mandate(0.0);
         c.esg_preference = {0.0, 10.0, 10.0};
         return c;
       }},
      {"greenwash_beta2", [] {
         auto c = mandate(1.0);
         c.features.greenwash = true;
         c.greenwash_coeff = 2.0;
         return c;
       }},
      {"greenwash_beta10", [] {
         auto c = mandate(1.0);
         c.features.greenwash = true;
         c.greenwash_coeff = 10.0;
         return c;
       }},
      {"greenwash_beta20", [] {
         auto c = mandate(1.0);
         c.features.greenwash = true;
         c.greenwash_coeff = 20.0;
         return c;
       }},
      {"more_info", [] {
         auto c = mandate(0.0);
         c.features.more_info = true;
         return c;
       }},
      {"no_investor_info", [] {
         auto c = mandate(0.0);
         c.num_investors = 0;
         c.esg_preference.clear();
         c.features.more_info = true;
         return c;
       }},
      {"resilience", [] {
         auto c = mandate(10.0);
         c.features.resilience = true;
         return c;
       }},
      {"lockin", [] {
         auto c = mandate(0.0);
         c.features.lock_in_years = 5;
         return c;
       }},
      {"uncertain_damage", [] {
         auto c = mandate(0.0);
         c.features.gaussian_damage.enabled = true;
         return c;
       }},
      {"strict_bankruptcy", [] {
         auto c = mandate(0.0);
         c.features.strict_bankruptcy = true;
         return c;
       }},
      {"realdata_seed", [] {
         auto c = mandate(0.0);
         c.features.real_data_seeding.enabled = true;
         return c;
       }},
      {"scale_10x10", [] {
         auto c = mandate(0.0);
         c.num_companies = 10;
         c.num_investors = 10;
         c.esg_preference.assign(10, 0.0);
         return c;
       }},
      {"scale_25x25", [] {
         auto c = mandate(0.0);
         c.num_companies = 25;
         c.num_investors = 25;
         c.esg_preference.assign(25, 0.0);
         return c;
       }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, fn] : preset_table()) out.push_back(name);
    return out;
  }();
  return names;
}

ScenarioConfig scenario_preset(std::string_view name) {
  for (const auto& [preset, fn] : preset_table()) {
    if (preset == name) {
      auto c = fn();
      c.name = preset;
      return c;
    }
  }
  std::string valid;
  for (const auto& n : preset_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw ConfigError("preset", "unknown preset '" + std::string(name) + "'; valid presets: " + valid);
}

}  // namespace investesg
