#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "torushom/constraint_graph.hpp"

namespace torushom {

/// A constraint graph together with its color weights.
struct WeightedGraph {
  ConstraintGraph graph;
  WeightSet weights;
  std::string name;
};

/// Text format:
///   colors <h>
///   w <k> <p/q>      (optional; unlisted weights default to 1)
///   e <i> <j>        (i == j declares a loop)
/// '#' starts a comment. Errors carry the offending line number.
WeightedGraph parse_graph_text(std::istream& in, std::string name = "file");

/// {"colors": h, "weights": ["p/q" | number, ...], "edges": [[i, j], ...], "labels": [...]}
WeightedGraph parse_graph_json(const nlohmann::json& doc, std::string name = "json");

/// Named presets: ind, k<q> / kq:<q>, k<q>loop, loop, wr, cycle:<n>, path:<n>;
/// "a+b" forms the disjoint union.
WeightedGraph preset_graph(std::string_view spec);

/// Preset name, or a path to a .json / text file.
WeightedGraph load_graph(std::string_view spec);

WeightedGraph disjoint_union(const WeightedGraph& left, const WeightedGraph& right);

/// Comma-separated rationals, e.g. "3/2,1,1".
WeightSet parse_weight_list(std::string_view text, std::size_t expected);

nlohmann::json to_json(const WeightedGraph& wg);

}  // namespace torushom
