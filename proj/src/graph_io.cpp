#include "torushom/graph_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

#include "torushom/errors.hpp"

namespace torushom {

namespace {

[[noreturn]] void fail_line(const std::string& name, std::size_t line, const std::string& what) {
  throw Error(ErrorCode::Config, name + ": line " + std::to_string(line) + ": " + what);
}

int parse_small_int(std::string_view text, std::string_view what) {
  if (text.empty()) throw Error(ErrorCode::Config, "missing " + std::string(what));
  int value = 0;
  for (char c : text) {
    if (c < '0' || c > '9' || value > 100000)
      throw Error(ErrorCode::Config, "bad " + std::string(what) + " '" + std::string(text) + "'");
    value = value * 10 + (c - '0');
  }
  return value;
}

WeightedGraph make(std::size_t h, const std::vector<std::pair<int, int>>& edges, std::vector<std::string> labels,
                   std::string name) {
  ConstraintGraph g(h, edges, std::move(labels));
  return {std::move(g), WeightSet::uniform(h), std::move(name)};
}

std::vector<std::string> numbered_labels(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 1; i <= n; ++i) labels.push_back(std::to_string(i));
  return labels;
}

WeightedGraph complete(std::size_t q, bool looped, std::string name) {
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i < q; ++i)
    for (std::size_t j = looped ? i : i + 1; j < q; ++j) edges.emplace_back(int(i), int(j));
  return make(q, edges, numbered_labels(q), std::move(name));
}

WeightedGraph single_preset(std::string_view spec) {
  const std::string name(spec);
  if (spec == "ind") return make(2, {{0, 1}, {1, 1}}, {"in", "out"}, name);
  if (spec == "wr") return make(3, {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {1, 2}}, numbered_labels(3), name);
  if (spec == "loop") return make(1, {{0, 0}}, {"1"}, name);
  if (spec.starts_with("kq:")) return complete(parse_small_int(spec.substr(3), "q"), false, name);
  if (spec.starts_with("cycle:")) {
    const int n = parse_small_int(spec.substr(6), "cycle length");
    if (n < 3) throw Error(ErrorCode::Config, "cycle needs at least 3 vertices");
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
    return make(std::size_t(n), edges, numbered_labels(std::size_t(n)), name);
  }
  if (spec.starts_with("path:")) {
    const int n = parse_small_int(spec.substr(5), "path length");
    if (n < 1) throw Error(ErrorCode::Config, "path needs at least 1 vertex");
    std::vector<std::pair<int, int>> edges;
    for (int i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return make(std::size_t(n), edges, numbered_labels(std::size_t(n)), name);
  }
  if (spec.size() >= 2 && spec.front() == 'k' && spec[1] >= '0' && spec[1] <= '9') {
    std::string_view digits = spec.substr(1);
    bool looped = false;
    if (digits.ends_with("loop")) {
      looped = true;
      digits.remove_suffix(4);
    }
    return complete(parse_small_int(digits, "q"), looped, name);
  }
  throw Error(ErrorCode::Config, "unknown constraint graph preset '" + name + "'");
}

}  // namespace

WeightedGraph parse_graph_text(std::istream& in, std::string name) {
  std::optional<std::size_t> colors;
  std::vector<std::pair<std::size_t, Rational>> weights;
  std::vector<std::pair<int, int>> edges;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream line(raw);
    std::string key;
    if (!(line >> key)) continue;
    try {
      if (key == "colors") {
        std::string h;
        line >> h;
        if (colors) fail_line(name, line_no, "duplicate 'colors' header");
        colors = std::size_t(parse_small_int(h, "color count"));
      } else if (key == "w") {
        std::string k, value;
        line >> k >> value;
        weights.emplace_back(std::size_t(parse_small_int(k, "color index")), parse_rational(value));
        if (colors && weights.back().first >= *colors) fail_line(name, line_no, "weight for a color out of range");
      } else if (key == "e") {
        std::string i, j;
        line >> i >> j;
        edges.emplace_back(parse_small_int(i, "color index"), parse_small_int(j, "color index"));
        if (colors && (std::size_t(edges.back().first) >= *colors || std::size_t(edges.back().second) >= *colors))
          fail_line(name, line_no, "edge endpoint out of range for " + std::to_string(*colors) + " colors");
      } else {
        fail_line(name, line_no, "unknown directive '" + key + "'");
      }
      std::string extra;
      if (line >> extra) fail_line(name, line_no, "trailing token '" + extra + "'");
    } catch (const Error& e) {
      if (std::string(e.what()).starts_with(name + ": line")) throw;
      fail_line(name, line_no, e.what());
    }
    if (!colors) fail_line(name, line_no, "'colors h' header must come first");
  }
  if (!colors) throw Error(ErrorCode::Config, name + ": missing 'colors h' header");
  ConstraintGraph g(*colors, edges);
  std::vector<Rational> w(*colors, Rational(1));
  for (auto& [k, value] : weights) {
    if (k >= *colors) throw Error(ErrorCode::Config, name + ": weight for color " + std::to_string(k) + " out of range");
    w[k] = value;
  }
  return {std::move(g), WeightSet(std::move(w)), std::move(name)};
}

WeightedGraph parse_graph_json(const nlohmann::json& doc, std::string name) {
  try {
    const std::size_t h = doc.at("colors").get<std::size_t>();
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : doc.value("edges", nlohmann::json::array()))
      edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    std::vector<std::string> labels;
    if (doc.contains("labels")) labels = doc.at("labels").get<std::vector<std::string>>();
    std::vector<Rational> w(h, Rational(1));
    if (doc.contains("weights")) {
      const auto& ws = doc.at("weights");
      if (ws.size() != h) throw Error(ErrorCode::Config, name + ": expected " + std::to_string(h) + " weights");
      for (std::size_t k = 0; k < h; ++k)
        w[k] = ws[k].is_string() ? parse_rational(ws[k].get<std::string>()) : parse_rational(ws[k].dump());
    }
    return {ConstraintGraph(h, edges, std::move(labels)), WeightSet(std::move(w)), std::move(name)};
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, name + ": " + e.what());
  }
}

WeightedGraph disjoint_union(const WeightedGraph& left, const WeightedGraph& right) {
  const std::size_t offset = left.graph.num_colors();
  auto edges = left.graph.edge_list();
  for (auto [i, j] : right.graph.edge_list()) edges.emplace_back(i + int(offset), j + int(offset));

  std::vector<std::string> labels = left.graph.labels();
  const auto& rhs = right.graph.labels();
  const bool clash = std::any_of(rhs.begin(), rhs.end(), [&](const std::string& l) {
    return std::find(labels.begin(), labels.end(), l) != labels.end();
  });
  for (const auto& l : rhs) labels.push_back(clash ? right.name + ":" + l : l);

  std::vector<Rational> w = left.weights.values();
  for (const auto& x : right.weights.values()) w.push_back(x);
  return {ConstraintGraph(offset + right.graph.num_colors(), edges, std::move(labels)), WeightSet(std::move(w)),
          left.name + "+" + right.name};
}

WeightedGraph preset_graph(std::string_view spec) {
  std::optional<WeightedGraph> acc;
  std::size_t start = 0;
  while (start <= spec.size()) {
    std::size_t plus = spec.find('+', start);
    if (plus == std::string_view::npos) plus = spec.size();
    WeightedGraph part = single_preset(spec.substr(start, plus - start));
    acc = acc ? disjoint_union(*acc, part) : std::move(part);
    start = plus + 1;
  }
  return *acc;
}

WeightedGraph load_graph(std::string_view spec) {
  const std::filesystem::path path{std::string(spec)};
  std::error_code ec;
  if (std::filesystem::is_regular_file(path, ec)) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::Config, "cannot open " + path.string());
    if (path.extension() == ".json") {
      nlohmann::json doc;
      try {
        in >> doc;
      } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::Config, path.string() + ": " + e.what());
      }
      return parse_graph_json(doc, path.filename().string());
    }
    return parse_graph_text(in, path.filename().string());
  }
  return preset_graph(spec);
}

WeightSet parse_weight_list(std::string_view text, std::size_t expected) {
  std::vector<Rational> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t comma = text.find(',', start);
    if (comma == std::string_view::npos) comma = text.size();
    out.push_back(parse_rational(text.substr(start, comma - start)));
    start = comma + 1;
  }
  if (out.size() != expected)
    throw Error(ErrorCode::Config, "expected " + std::to_string(expected) + " weights, got " + std::to_string(out.size()));
  return WeightSet(std::move(out));
}

nlohmann::json to_json(const WeightedGraph& wg) {
  nlohmann::json doc;
  doc["name"] = wg.name;
  doc["colors"] = wg.graph.num_colors();
  doc["labels"] = wg.graph.labels();
  auto weights = nlohmann::json::array();
  for (const auto& w : wg.weights.values()) weights.push_back(to_string(w));
  doc["weights"] = weights;
  auto edges = nlohmann::json::array();
  for (auto [i, j] : wg.graph.edge_list()) edges.push_back({i, j});
  doc["edges"] = edges;
  return doc;
}

}  // namespace torushom
