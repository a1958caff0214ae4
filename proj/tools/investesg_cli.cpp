// Command-line front end: run, batch, schelling, train, presets,
// print-default-config.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "investesg/batch.hpp"
#include "investesg/config.hpp"
#include "investesg/learner.hpp"
#include "investesg/outputs.hpp"
#include "investesg/schelling.hpp"

namespace fs = std::filesystem;
using namespace investesg;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string preset;
  std::string out_dir;
  std::vector<std::string> overrides;  // dotted.path=json
  std::optional<std::uint64_t> climate_seed;
  std::optional<std::uint64_t> policy_seed;
  std::optional<int> horizon;
  std::optional<int> threads;
  std::optional<int> batch_size;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("-c,--config", o.config_path, "Scenario config file (JSON)");
  app->add_option("-p,--preset", o.preset, "Start from a named preset");
  app->add_option("-o,--out-dir", o.out_dir, "Artifact directory (default $INVESTESG_OUT_DIR or ./out)");
  app->add_option("--set", o.overrides, "Override a config value: dotted.key=<json value>");
  app->add_option("--climate-seed", o.climate_seed, "Climate event seed");
  app->add_option("--policy-seed", o.policy_seed, "Policy and learner seed");
  app->add_option("--horizon", o.horizon, "Number of periods");
  app->add_option("--threads", o.threads, "Worker threads");
  app->add_option("--batch-size", o.batch_size, "Episodes per batch");
}

void apply_override(nlohmann::json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(assignment, "override must look like key=value");
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    value = text;  // bare words are strings
  }
  nlohmann::json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (!node->is_object()) throw ConfigError(path, "cannot descend into a non-object");
    if (dot == std::string::npos) {
      (*node)[key] = value;
      return;
    }
    node = &(*node)[key];
    start = dot + 1;
  }
}

ScenarioConfig resolve_config(const CommonOptions& o) {
  ScenarioConfig base = o.preset.empty() ? ScenarioConfig{} : scenario_preset(o.preset);
  nlohmann::json doc = to_json(base);
  if (!o.config_path.empty()) {
    const auto file = load_config(o.config_path);  // validates keys
    std::ifstream in(o.config_path);
    const auto user = nlohmann::json::parse(in);
    doc.merge_patch(user);
    (void)file;
  }
  for (const auto& assignment : o.overrides) apply_override(doc, assignment);
  if (o.climate_seed) doc["seeds"]["climate"] = *o.climate_seed;
  if (o.policy_seed) doc["seeds"]["policy"] = *o.policy_seed;
  if (o.horizon) doc["horizon"] = *o.horizon;
  if (o.threads) doc["threads"] = *o.threads;
  if (o.batch_size) doc["batch_size"] = *o.batch_size;
  auto config = config_from_json(doc);
  config.validate();
  return config;
}

fs::path out_dir(const CommonOptions& o) {
  if (!o.out_dir.empty()) return o.out_dir;
  if (const char* env = std::getenv("INVESTESG_OUT_DIR")) return env;
  return "out";
}

void print_summary(const EpisodeSummary& s) {
  std::cout << "P100=" << format_number(s.final_risk) << " W100=" << format_number(s.final_wealth)
            << " events_total=" << s.events_total << " bankruptcies=" << s.bankruptcies
            << " cumulative_mitigation=" << format_number(s.cumulative_mitigation) << "\n";
}

void print_aggregate(const char* name, const Aggregate& a) {
  std::cout << name << " mean=" << format_number(a.mean) << " stderr=" << format_number(a.std_error) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"InvestESG climate-investment market simulator"};
  app.require_subcommand(1);
  CommonOptions opts;

  auto* run = app.add_subcommand("run", "Run a single episode with the scripted policies");
  add_common(run, opts);

  auto* batch = app.add_subcommand("batch", "Run batch_size episodes on consecutive seeds");
  add_common(batch, opts);
  bool rows = false;
  batch->add_flag("--rows", rows, "Also write one per-period table per episode");

  auto* schell = app.add_subcommand("schelling", "Schelling payoff curve for company 0");
  add_common(schell, opts);
  std::string investor_kind = "profit_driven";
  std::string defector_kind = "defector";
  std::string cooperator_kind = "cooperator";
  int seed_count = 3;
  schell->add_option("--investors", investor_kind, "Investor policy for every investor");
  schell->add_option("--defector", defector_kind, "Defecting company policy");
  schell->add_option("--cooperator", cooperator_kind, "Cooperating company policy");
  schell->add_option("--seeds", seed_count, "Number of seeds (0..n-1)");

  auto* train = app.add_subcommand("train", "Train independent learners, then evaluate greedily");
  add_common(train, opts);
  int eval_episodes = 3;
  train->add_option("--eval-episodes", eval_episodes, "Greedy evaluation episodes");

  auto* presets = app.add_subcommand("presets", "List scenario presets");
  auto* print_default = app.add_subcommand("print-default-config", "Print the full config with defaults");
  add_common(print_default, opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (presets->parsed()) {
      for (const auto& name : preset_names()) std::cout << name << "\n";
      return 0;
    }
    const ScenarioConfig config = resolve_config(opts);
    if (print_default->parsed()) {
      std::cout << to_json(config).dump(2) << "\n";
      return 0;
    }
    const fs::path dir = out_dir(opts);
    if (run->parsed()) {
      const auto record = run_episode(config, config.seeds);
      const auto paths = write_outputs(record, config, dir);
      print_summary(record.summary);
      std::cout << "wrote " << paths.table.string() << " and " << paths.summary.string() << "\n";
    } else if (batch->parsed()) {
      BatchOptions bo;
      bo.threads = config.threads;
      bo.record_rows = rows;
      const auto result = run_batch(config, consecutive_seeds(config.seeds, config.batch_size), bo);
      const auto path = write_outputs(result, config, dir);
      print_aggregate("P100", result.final_risk);
      print_aggregate("W100", result.final_wealth);
      print_aggregate("events_total", result.events_total);
      print_aggregate("bankruptcies", result.bankruptcies);
      std::cout << "wrote " << path.string() << "\n";
    } else if (schell->parsed()) {
      schelling::Setup setup;
      const auto inv = policies::parse_investor_kind(investor_kind);
      const auto def = policies::parse_company_kind(defector_kind);
      const auto coop = policies::parse_company_kind(cooperator_kind);
      if (!inv) throw ConfigError("--investors", "unknown investor policy '" + investor_kind + "'");
      if (!def || *def == policies::CompanyKind::Custom)
        throw ConfigError("--defector", "unknown company policy '" + defector_kind + "'");
      if (!coop || *coop == policies::CompanyKind::Custom)
        throw ConfigError("--cooperator", "unknown company policy '" + cooperator_kind + "'");
      if (seed_count < 1) throw ConfigError("--seeds", "must be >= 1");
      setup.investors.assign(static_cast<std::size_t>(config.num_investors), {*inv});
      setup.defector = {*def, {}};
      setup.cooperator = {*coop, {}};
      setup.seeds.clear();
      for (int s = 0; s < seed_count; ++s) setup.seeds.push_back(static_cast<std::uint64_t>(s));
      setup.threads = config.threads;
      const auto curve = schelling::curve(config, setup);
      const auto text = schelling::table(curve);
      write_text(dir / "schelling.csv", text);
      std::cout << text << schelling::is_social_dilemma(curve).describe() << "\n";
      std::cout << "wrote " << (dir / "schelling.csv").string() << "\n";
    } else if (train->parsed()) {
      const auto result = learner::train_independent(config, config.seeds);
      write_text(dir / "train_report.json", learner::report_json(result.report).dump(2) + "\n");
      write_text(dir / "policy_params.json", learner::params_json(result.params).dump(2) + "\n");
      const auto eval = learner::evaluate(result.params, config, consecutive_seeds(config.seeds, eval_episodes),
                                          config.threads);
      write_outputs(eval, config, dir);
      std::cout << "trailing-window mitigation=" << format_number(result.report.mitigation_spend)
                << " P_end=" << format_number(result.report.final_risk)
                << " W_end=" << format_number(result.report.final_wealth) << "\n";
      print_aggregate("greedy P100", eval.final_risk);
      print_aggregate("greedy W100", eval.final_wealth);
      std::cout << "wrote " << (dir / "train_report.json").string() << "\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
