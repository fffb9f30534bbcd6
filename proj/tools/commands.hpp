#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "run_config.hpp"

namespace torushom::cli {

/// Rows for CSV export.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

struct CommandOutput {
  /// Deterministic given the config; timing lives in the caller's metadata.
  nlohmann::json result;
  Table table;
  /// 0 unless the command itself detected a mismatch (then 4).
  int exit_code = 0;
};

CommandOutput run_analyze(const RunConfig& cfg);
CommandOutput run_count(const RunConfig& cfg);
CommandOutput run_sample(const RunConfig& cfg);
CommandOutput run_influence(const RunConfig& cfg);
CommandOutput run_conjecture(const RunConfig& cfg);
CommandOutput run_identities(const RunConfig& cfg);
/// Runs every golden file in cfg.dir and diffs the result (or rewrites it when cfg.write).
CommandOutput run_corpus(const RunConfig& cfg);

/// Dispatches on cfg.command.
CommandOutput run_command(const RunConfig& cfg);

}  // namespace torushom::cli
