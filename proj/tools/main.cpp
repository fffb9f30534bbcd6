#include <chrono>
#include <deque>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "run_config.hpp"
#include "torushom/errors.hpp"

namespace {

using torushom::cli::Settings;

/// A string-valued flag that lands in the settings map only when given.
struct Bound {
  CLI::Option* option = nullptr;
  std::string key;
  std::string value;
  bool is_flag = false;
  bool flag_value = false;
};

class SettingsCollector {
 public:
  void option(CLI::App* app, const std::string& key, const std::string& help) {
    Bound& b = bound_.emplace_back();
    b.key = key;
    b.option = app->add_option("--" + dashed(key), b.value, help);
  }

  void flag(CLI::App* app, const std::string& key, const std::string& help) {
    Bound& b = bound_.emplace_back();
    b.key = key;
    b.is_flag = true;
    b.option = app->add_flag("--" + dashed(key), b.flag_value, help);
  }

  void apply(Settings& s) const {
    for (const auto& b : bound_) {
      if (b.option->count() == 0) continue;
      s[b.key] = b.is_flag ? (b.flag_value ? "true" : "false") : b.value;
    }
  }

 private:
  static std::string dashed(std::string key) {
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
  }

  std::deque<Bound> bound_;
};

void add_instance(SettingsCollector& c, CLI::App* app, bool torus) {
  c.option(app, "h", "constraint graph: preset (ind, kq:<q>, k<q>loop, wr, cycle:<n>, path:<n>, a+b) or file");
  c.option(app, "weights", "comma-separated color weights, e.g. 3/2,1,1");
  if (torus) {
    c.option(app, "m", "torus side length (even)");
    c.option(app, "d", "torus dimension");
  }
}

void add_budget(SettingsCollector& c, CLI::App* app) {
  c.option(app, "brute_budget", "largest brute-force search space");
  c.option(app, "transfer_budget", "largest transfer-matrix layer state space");
  c.option(app, "threads", "worker threads (0 = TORUSHOM_THREADS or hardware)");
}

void add_chain(SettingsCollector& c, CLI::App* app) {
  c.option(app, "steps", "Glauber updates per chain");
  c.option(app, "burn_in", "updates discarded before recording");
  c.option(app, "thin", "record every thin-th state");
  c.option(app, "seed", "base seed");
  c.option(app, "init", "greedy, pure or pure:<pair index>");
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw torushom::Error(torushom::ErrorCode::Config, "cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted H-colorings of even discrete tori"};
  // --h names the constraint graph, so help is long-form only.
  app.set_help_flag("--help", "print help and exit");
  app.require_subcommand(1);
  SettingsCollector collector;
  std::string config_path;

  struct Command {
    const char* name;
    const char* help;
  };
  const Command commands[] = {
      {"analyze", "eta, maximal pairs, support, blow-up and equipartition class of H"},
      {"count", "exact partition function on Z_m^d"},
      {"sample", "Glauber dynamics with phase classification"},
      {"influence", "conditional vs unconditional occupation at x given f(y) = l"},
      {"conjecture", "weight and coloring-count predictions against exact counts"},
      {"identities", "column identities and the gap delta"},
      {"corpus", "run and diff the golden instances in a directory"},
  };
  for (const auto& cmd : commands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->set_help_flag("--help", "print help and exit");
    sub->add_option("--config", config_path, "key=value or JSON settings file; flags override it");
    collector.option(sub, "output", "write the JSON report here instead of stdout");
    collector.option(sub, "csv", "also write the table as CSV");
    const std::string name = cmd.name;
    if (name == "analyze") {
      add_instance(collector, sub, false);
    } else if (name == "count") {
      add_instance(collector, sub, true);
      add_budget(collector, sub);
      collector.option(sub, "method", "auto, brute, transfer or both");
      collector.flag(sub, "bounds", "check the global eta bounds (all-1 weights)");
    } else if (name == "sample") {
      add_instance(collector, sub, true);
      add_chain(collector, sub);
      collector.option(sub, "chains", "independent chains");
      collector.option(sub, "threads", "worker threads");
      collector.option(sub, "pin", "pin a vertex: <coords>=<color>");
      collector.option(sub, "defect_cap", "largest non-ideal vertex fraction for a pure label");
      collector.option(sub, "balance_tol", "relative tolerance for balanced labels");
      collector.option(sub, "epsilon_mode", "all or single");
      collector.option(sub, "trace", "JSONL sample stream path");
      collector.flag(sub, "verbose", "include run-length encoded colorings in the trace");
    } else if (name == "influence") {
      add_instance(collector, sub, true);
      add_budget(collector, sub);
      add_chain(collector, sub);
      collector.option(sub, "x", "antipodal, farthest-same, farthest-cross or coordinates");
      collector.option(sub, "y", "conditioning vertex (default origin)");
      collector.option(sub, "k", "color to report separately");
      collector.option(sub, "l", "conditioning color");
      collector.option(sub, "tolerance", "long-range threshold on |ratio - 1|");
    } else if (name == "conjecture") {
      add_instance(collector, sub, false);
      add_budget(collector, sub);
      collector.option(sub, "m", "torus side length (even)");
      collector.option(sub, "ds", "dimensions, e.g. 1..4");
    } else if (name == "identities") {
      add_instance(collector, sub, false);
      collector.option(sub, "ms", "column lengths, e.g. 2,4,6");
      collector.option(sub, "max_nodes", "search node cap");
    } else if (name == "corpus") {
      collector.option(sub, "dir", "directory of golden .json files");
      collector.option(sub, "threads", "worker threads");
      collector.flag(sub, "write", "rewrite expected outputs instead of diffing");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const auto start = std::chrono::steady_clock::now();
    Settings settings;
    if (!config_path.empty()) settings = torushom::cli::read_settings_file(config_path);
    collector.apply(settings);
    settings["command"] = command;
    const auto cfg = torushom::cli::RunConfig::from_settings(settings);
    const auto out = torushom::cli::run_command(cfg);

    nlohmann::json doc = {{"command", command}, {"settings", cfg.to_settings()}, {"result", out.result}};
    const std::string text = doc.dump(2) + "\n";
    if (cfg.output.empty()) std::cout << text;
    else write_text(cfg.output, text);
    if (!cfg.csv.empty()) write_text(cfg.csv, out.table.to_csv());

    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const nlohmann::json metadata = {{"metadata", {{"command", command}, {"runtime_ms", ms}}}};
    std::cerr << metadata.dump() << '\n';
    return out.exit_code;
  } catch (const torushom::Error& e) {
    std::cerr << "error (" << torushom::error_name(e.code()) << "): " << e.what() << '\n';
    return torushom::exit_status(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
