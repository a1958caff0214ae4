#include "investesg/outputs.hpp"

#include <charconv>
#include <fstream>

namespace investesg {

using nlohmann::json;

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::vector<std::string> table_header(std::size_t num_companies, std::size_t num_investors) {
  std::vector<std::string> h{"t", "year", "risk_h", "risk_p", "risk_d", "risk_overall", "ev_h", "ev_p", "ev_d"};
  for (std::size_t i = 1; i <= num_companies; ++i) {
    const auto n = std::to_string(i);
    for (const char* f : {"K", "Q", "L", "um", "ug", "ur", "rew", "bankrupt"}) h.push_back(f + n);
  }
  for (std::size_t j = 1; j <= num_investors; ++j) {
    const auto n = std::to_string(j);
    for (std::size_t i = 1; i <= num_companies; ++i) h.push_back("H" + n + "_" + std::to_string(i));
    h.push_back("C" + n);
    h.push_back("rew" + n);
  }
  return h;
}

std::string episode_table(const EpisodeRecord& record, std::size_t num_companies, std::size_t num_investors) {
  std::string out;
  const auto header = table_header(num_companies, num_investors);
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k > 0) out += ',';
    out += header[k];
  }
  out += '\n';
  for (const auto& row : record.rows) {
    if (row.companies.size() != num_companies || row.investors.size() != num_investors)
      throw OutputError("row at t=" + std::to_string(row.t) + " does not match the agent counts");
    out += std::to_string(row.t) + ',' + std::to_string(calendar_year(row.t));
    for (double v : {row.risks.heat, row.risks.precip, row.risks.drought, row.overall_risk}) {
      out += ',';
      out += format_number(v);
    }
    for (bool e : {row.events.heat, row.events.precip, row.events.drought}) out += e ? ",1" : ",0";
    for (const auto& c : row.companies) {
      for (double v : {c.capital, c.esg_score, c.vulnerability, c.action.mitigation, c.action.greenwash,
                       c.action.resilience, c.reward}) {
        out += ',';
        out += format_number(v);
      }
      out += c.bankrupt ? ",1" : ",0";
    }
    for (const auto& inv : row.investors) {
      for (double h : inv.holdings) {
        out += ',';
        out += format_number(h);
      }
      out += ',' + format_number(inv.cash) + ',' + format_number(inv.reward);
    }
    out += '\n';
  }
  return out;
}

json summary_json(const EpisodeSummary& s) {
  return json{{"periods", s.periods},
              {"P100", s.final_risk},
              {"W100", s.final_wealth},
              {"events_total", s.events_total},
              {"bankruptcies", s.bankruptcies},
              {"cumulative_mitigation", s.cumulative_mitigation},
              {"company_returns", s.company_returns},
              {"investor_returns", s.investor_returns}};
}

namespace {
json aggregate_json(const Aggregate& a) { return json{{"mean", a.mean}, {"stderr", a.std_error}}; }
}  // namespace

json batch_json(const BatchResult& r) {
  json episodes = json::array();
  for (std::size_t e = 0; e < r.episodes.size(); ++e) {
    auto doc = summary_json(r.episodes[e]);
    doc["climate_seed"] = r.seeds[e].climate;
    doc["policy_seed"] = r.seeds[e].policy;
    episodes.push_back(std::move(doc));
  }
  return json{{"episodes", episodes},
              {"aggregate",
               {{"P100", aggregate_json(r.final_risk)},
                {"W100", aggregate_json(r.final_wealth)},
                {"events_total", aggregate_json(r.events_total)},
                {"bankruptcies", aggregate_json(r.bankruptcies)},
                {"cumulative_mitigation", aggregate_json(r.cumulative_mitigation)}}}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw OutputError(path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw OutputError(path.string() + ": cannot open for writing");
  out << text;
  out.flush();
  if (!out) throw OutputError(path.string() + ": write failed");
}

EpisodePaths write_outputs(const EpisodeRecord& record, const ScenarioConfig& config,
                           const std::filesystem::path& dir, const std::string& stem) {
  EpisodePaths paths{dir / (stem + ".csv"), dir / (stem + "_summary.json")};
  write_text(paths.table, episode_table(record, static_cast<std::size_t>(config.num_companies),
                                        static_cast<std::size_t>(config.num_investors)));
  auto doc = summary_json(record.summary);
  doc["scenario"] = config.name;
  doc["climate_seed"] = record.seeds.climate;
  doc["policy_seed"] = record.seeds.policy;
  write_text(paths.summary, doc.dump(2) + "\n");
  return paths;
}

std::filesystem::path write_outputs(const BatchResult& result, const ScenarioConfig& config,
                                    const std::filesystem::path& dir) {
  auto doc = batch_json(result);
  doc["scenario"] = config.name;
  const auto path = dir / "batch_summary.json";
  write_text(path, doc.dump(2) + "\n");
  for (std::size_t e = 0; e < result.records.size(); ++e)
    write_outputs(result.records[e], config, dir, "episode_" + std::to_string(e));
  return path;
}

}  // namespace investesg
