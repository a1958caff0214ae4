#pragma once

// Artifact writers. Numbers are written in shortest round-trip form so a
// file read back reproduces the recorded doubles exactly.

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "investesg/batch.hpp"
#include "investesg/episode.hpp"

namespace investesg {

class OutputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_number(double value);

/// Per-period table header: t, year, risk_h, risk_p, risk_d, risk_overall,
/// ev_h, ev_p, ev_d, then Ki, Qi, Li, umi, ugi, uri, rewi, bankrupti per
/// company (1-based), then Hj_1..Hj_M, Cj, rewj per investor.
std::vector<std::string> table_header(std::size_t num_companies, std::size_t num_investors);

std::string episode_table(const EpisodeRecord& record, std::size_t num_companies, std::size_t num_investors);

nlohmann::json summary_json(const EpisodeSummary& summary);
nlohmann::json batch_json(const BatchResult& result);

/// Writes `text` to `path`, creating parent directories.
void write_text(const std::filesystem::path& path, const std::string& text);

struct EpisodePaths {
  std::filesystem::path table;
  std::filesystem::path summary;
};

/// Writes `<stem>.csv` and `<stem>_summary.json` into `dir`.
EpisodePaths write_outputs(const EpisodeRecord& record, const ScenarioConfig& config,
                           const std::filesystem::path& dir, const std::string& stem = "episode");

/// Writes `batch_summary.json` plus one table per recorded episode.
std::filesystem::path write_outputs(const BatchResult& result, const ScenarioConfig& config,
                                    const std::filesystem::path& dir);

}  // namespace investesg
