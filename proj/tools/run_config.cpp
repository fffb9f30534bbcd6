#include "run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "torushom/errors.hpp"

namespace torushom::cli {

namespace {

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& what) {
  throw Error(ErrorCode::Config, "setting '" + key + "' = '" + value + "': " + what);
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(out)) bad(key, v, "not a number");
    return out;
  } catch (const std::logic_error&) {
    bad(key, v, "not a number");
  }
}

/// Accepts plain integers and exact scientific forms like 1e6.
std::uint64_t to_count(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec == std::errc() && ptr == v.data() + v.size()) return out;
  const double x = to_double(key, v);
  if (x < 0 || x > 1.8e19 || std::floor(x) != x) bad(key, v, "not a nonnegative integer");
  return static_cast<std::uint64_t>(x);
}

int to_int(const std::string& key, const std::string& v) {
  const std::uint64_t x = to_count(key, v);
  if (x > 1'000'000) bad(key, v, "too large");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  bad(key, v, "expected true or false");
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream in(v);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (const auto dots = item.find(".."); dots != std::string::npos) {
      const int lo = to_int(key, item.substr(0, dots));
      const int hi = to_int(key, item.substr(dots + 2));
      if (hi < lo || hi - lo > 64) bad(key, v, "bad range");
      for (int i = lo; i <= hi; ++i) out.push_back(i);
    } else {
      out.push_back(to_int(key, item));
    }
  }
  if (out.empty()) bad(key, v, "empty list");
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

std::string format_double(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

void one_of(const std::string& key, const std::string& v, std::initializer_list<const char*> allowed) {
  for (const char* a : allowed)
    if (v == a) return;
  bad(key, v, "unsupported value");
}

}  // namespace

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys{
      "command",   "h",       "weights",   "m",         "d",          "method",       "brute_budget", "transfer_budget",
      "threads",   "bounds",  "steps",     "burn_in",   "thin",       "seed",         "chains",       "init",
      "pin",       "defect_cap", "balance_tol", "epsilon_mode", "trace", "verbose",    "x",            "y",
      "k",         "l",       "tolerance", "ds",        "ms",         "max_nodes",    "dir",          "write",
      "output",    "csv"};
  return keys;
}

RunConfig RunConfig::from_settings(const Settings& s) {
  RunConfig c;
  for (const auto& [key, v] : s) {
    if (key == "command") c.command = v;
    else if (key == "h") c.h = v;
    else if (key == "weights") c.weights = v;
    else if (key == "m") c.m = to_int(key, v);
    else if (key == "d") c.d = to_int(key, v);
    else if (key == "method") {
      one_of(key, v, {"auto", "brute", "transfer", "both"});
      c.method = v;
    } else if (key == "brute_budget") c.brute_budget = to_double(key, v);
    else if (key == "transfer_budget") c.transfer_budget = to_double(key, v);
    else if (key == "threads") c.threads = static_cast<unsigned>(to_int(key, v));
    else if (key == "bounds") c.bounds = to_bool(key, v);
    else if (key == "steps") c.steps = to_count(key, v);
    else if (key == "burn_in") c.burn_in = to_count(key, v);
    else if (key == "thin") c.thin = to_count(key, v);
    else if (key == "seed") c.seed = to_count(key, v);
    else if (key == "chains") c.chains = to_count(key, v);
    else if (key == "init") {
      if (v != "greedy" && v != "pure" && !v.starts_with("pure:")) bad(key, v, "expected greedy, pure or pure:<index>");
      c.init = v;
    } else if (key == "pin") c.pin = v;
    else if (key == "defect_cap") c.defect_cap = to_double(key, v);
    else if (key == "balance_tol") c.balance_tol = to_double(key, v);
    else if (key == "epsilon_mode") {
      one_of(key, v, {"all", "single"});
      c.epsilon_mode = v;
    } else if (key == "trace") c.trace = v;
    else if (key == "verbose") c.verbose = to_bool(key, v);
    else if (key == "x") c.x = v;
    else if (key == "y") c.y = v;
    else if (key == "k") c.k = v;
    else if (key == "l") c.l = v;
    else if (key == "tolerance") c.tolerance = to_double(key, v);
    else if (key == "ds") c.ds = to_int_list(key, v);
    else if (key == "ms") c.ms = to_int_list(key, v);
    else if (key == "max_nodes") c.max_nodes = to_count(key, v);
    else if (key == "dir") c.dir = v;
    else if (key == "write") c.write = to_bool(key, v);
    else if (key == "output") c.output = v;
    else if (key == "csv") c.csv = v;
    else throw Error(ErrorCode::Config, "unknown setting '" + key + "'");
  }
  if (c.chains == 0) throw Error(ErrorCode::Config, "chains must be positive");
  return c;
}

Settings RunConfig::to_settings() const {
  const RunConfig defaults;
  Settings s;
  auto put = [&](const std::string& key, const std::string& value, const std::string& fallback) {
    if (value != fallback) s[key] = value;
  };
  put("command", command, defaults.command);
  put("h", h, defaults.h);
  put("weights", weights, defaults.weights);
  put("m", std::to_string(m), std::to_string(defaults.m));
  put("d", std::to_string(d), std::to_string(defaults.d));
  put("method", method, defaults.method);
  put("brute_budget", format_double(brute_budget), format_double(defaults.brute_budget));
  put("transfer_budget", format_double(transfer_budget), format_double(defaults.transfer_budget));
  put("threads", std::to_string(threads), std::to_string(defaults.threads));
  put("bounds", bounds ? "true" : "false", "false");
  put("steps", std::to_string(steps), std::to_string(defaults.steps));
  put("burn_in", std::to_string(burn_in), std::to_string(defaults.burn_in));
  put("thin", std::to_string(thin), std::to_string(defaults.thin));
  put("seed", std::to_string(seed), std::to_string(defaults.seed));
  put("chains", std::to_string(chains), std::to_string(defaults.chains));
  put("init", init, defaults.init);
  put("pin", pin, defaults.pin);
  put("defect_cap", format_double(defect_cap), format_double(defaults.defect_cap));
  put("balance_tol", format_double(balance_tol), format_double(defaults.balance_tol));
  put("epsilon_mode", epsilon_mode, defaults.epsilon_mode);
  put("trace", trace, defaults.trace);
  put("verbose", verbose ? "true" : "false", "false");
  put("x", x, defaults.x);
  put("y", y, defaults.y);
  put("k", k, defaults.k);
  put("l", l, defaults.l);
  put("tolerance", format_double(tolerance), format_double(defaults.tolerance));
  put("ds", join(ds), join(defaults.ds));
  put("ms", join(ms), join(defaults.ms));
  put("max_nodes", std::to_string(max_nodes), std::to_string(defaults.max_nodes));
  put("dir", dir, defaults.dir);
  put("write", write ? "true" : "false", "false");
  put("output", output, defaults.output);
  put("csv", csv, defaults.csv);
  return s;
}

Settings parse_settings_text(const std::string& text, const std::string& name) {
  Settings s;
  std::istringstream in(text);
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    const std::string line = trim(raw);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::Config, name + ": line " + std::to_string(line_no) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
      throw Error(ErrorCode::Config, name + ": line " + std::to_string(line_no) + ": unknown setting '" + key + "'");
    s[key] = trim(line.substr(eq + 1));
  }
  return s;
}

Settings parse_settings_json(const nlohmann::json& doc, const std::string& name) {
  if (!doc.is_object()) throw Error(ErrorCode::Config, name + ": expected a JSON object");
  Settings s;
  for (const auto& [key, value] : doc.items()) {
    if (std::find(known_keys().begin(), known_keys().end(), key) == known_keys().end())
      throw Error(ErrorCode::Config, name + ": unknown setting '" + key + "'");
    if (value.is_string()) s[key] = value.get<std::string>();
    else if (value.is_boolean()) s[key] = value.get<bool>() ? "true" : "false";
    else if (value.is_number_integer() || value.is_number_unsigned()) s[key] = value.dump();
    else if (value.is_number_float()) s[key] = format_double(value.get<double>());
    else if (value.is_array()) {
      std::string joined;
      for (const auto& item : value) joined += (joined.empty() ? "" : ",") + (item.is_string() ? item.get<std::string>() : item.dump());
      s[key] = joined;
    } else {
      throw Error(ErrorCode::Config, name + ": setting '" + key + "' has an unsupported type");
    }
  }
  return s;
}

Settings read_settings_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Config, "cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      return parse_settings_json(nlohmann::json::parse(text), path);
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::Config, path + ": " + e.what());
    }
  }
  return parse_settings_text(text, path);
}

std::string format_settings(const Settings& s) {
  std::string out;
  for (const auto& [k, v] : s) out += k + "=" + v + "\n";
  return out;
}

}  // namespace torushom::cli
