#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace torushom::cli {

/// Flat string settings as they appear in a config file or on the command line.
using Settings = std::map<std::string, std::string>;

/// Everything one command needs. Built from Settings; to_settings() inverts it.
struct RunConfig {
  std::string command;

  // instance
  std::string h;
  std::string weights;
  int m = 2;
  int d = 2;

  // exact counting
  std::string method = "auto";
  double brute_budget = 1e8;
  double transfer_budget = 1e7;
  unsigned threads = 0;
  bool bounds = false;

  // sampling
  std::uint64_t steps = 100000;
  std::uint64_t burn_in = 0;
  std::uint64_t thin = 1;
  std::uint64_t seed = 1;
  std::size_t chains = 1;
  std::string init = "greedy";
  std::string pin;
  double defect_cap = 0.1;
  double balance_tol = 0.2;
  std::string epsilon_mode = "all";
  std::string trace;
  bool verbose = false;

  // influence
  std::string x = "antipodal";
  std::string y;
  std::string k;
  std::string l;
  double tolerance = 0.05;

  // conjecture and identities
  std::vector<int> ds{1, 2, 3, 4};
  std::vector<int> ms{2, 4};
  std::uint64_t max_nodes = 200'000'000;

  // corpus
  std::string dir;
  bool write = false;

  // output
  std::string output;
  std::string csv;

  /// Throws Error(Config) on unknown keys or malformed values.
  static RunConfig from_settings(const Settings& s);
  Settings to_settings() const;
};

/// Reads key=value lines ('#' comments) or a flat JSON object.
Settings read_settings_file(const std::string& path);
Settings parse_settings_text(const std::string& text, const std::string& name = "config");
Settings parse_settings_json(const nlohmann::json& doc, const std::string& name = "config");

/// key=value lines in key order.
std::string format_settings(const Settings& s);

/// Every key accepted by from_settings().
const std::vector<std::string>& known_keys();

}  // namespace torushom::cli
