#include <doctest.h>

#include <sstream>

#include "torushom/errors.hpp"
#include "torushom/graph_io.hpp"

using namespace torushom;

TEST_CASE("text format") {
  std::istringstream in(
      "# Looped star\n"
      "colors 3\n"
      "w 0 3/2\n"
      "e 0 1\n"
      "e 0 2\n"
      "e 0 0   # loop\n");
  const auto wg = parse_graph_text(in);
  CHECK(wg.graph.num_colors() == 3);
  CHECK(wg.graph.has_loop(0));
  CHECK_FALSE(wg.graph.has_loop(1));
  CHECK(wg.graph.adjacent(2, 0));
  CHECK_FALSE(wg.graph.adjacent(1, 2));
  CHECK(wg.weights[0] == Rational(3, 2));
  CHECK(wg.weights[1] == 1);
}

TEST_CASE("text format errors carry line numbers") {
  std::istringstream in("colors 2\ne 0 1\ne 0 5\n");
  try {
    parse_graph_text(in);
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  std::istringstream bad_weight("colors 2\nw 1 -3\n");
  CHECK_THROWS_AS(parse_graph_text(bad_weight), Error);
  std::istringstream no_header("e 0 1\n");
  CHECK_THROWS_AS(parse_graph_text(no_header), Error);
}

TEST_CASE("json format round trip") {
  const auto doc = nlohmann::json::parse(R"({"colors": 2, "weights": ["1/3", 1], "edges": [[0, 1], [1, 1]],
                                              "labels": ["in", "out"]})");
  const auto wg = parse_graph_json(doc);
  CHECK(wg.graph.label(0) == "in");
  CHECK(wg.weights[0] == Rational(1, 3));
  const auto again = parse_graph_json(to_json(wg));
  CHECK(again.graph.edge_list() == wg.graph.edge_list());
  CHECK(again.weights.values() == wg.weights.values());
  CHECK(again.graph.labels() == wg.graph.labels());
}

TEST_CASE("presets") {
  CHECK(preset_graph("ind").graph.edge_list() == std::vector<std::pair<int, int>>{{0, 1}, {1, 1}});
  CHECK(preset_graph("k3").graph.edge_list().size() == 3);
  CHECK(preset_graph("kq:7").graph.num_colors() == 7);
  CHECK(preset_graph("k4loop").graph.edge_list().size() == 10);
  CHECK(preset_graph("cycle:5").graph.edge_list().size() == 5);
  CHECK(preset_graph("path:4").graph.edge_list().size() == 3);
  const auto wr = preset_graph("wr");
  CHECK_FALSE(wr.graph.adjacent(0, 2));
  CHECK(wr.graph.has_loop(0));
  CHECK(wr.graph.has_loop(2));
  CHECK_THROWS_AS(preset_graph("nonsense"), Error);
}

TEST_CASE("disjoint unions") {
  const auto u = preset_graph("ind+k3");
  CHECK(u.graph.num_colors() == 5);
  CHECK(u.graph.adjacent(2, 3));
  CHECK_FALSE(u.graph.adjacent(1, 2));
  const auto clash = preset_graph("k4loop+k8");
  CHECK(clash.graph.num_colors() == 12);
  CHECK(clash.graph.find_label("k8:1").has_value());
}

TEST_CASE("weight lists") {
  const auto w = parse_weight_list("3/2, 1, 0.25", 3);
  CHECK(w[0] == Rational(3, 2));
  CHECK(w[2] == Rational(1, 4));
  CHECK_THROWS_AS(parse_weight_list("1,1", 3), Error);
  CHECK_THROWS_AS(parse_weight_list("1,x,1", 3), Error);
}

TEST_CASE("rational parsing") {
  CHECK(parse_rational("6/4") == Rational(3, 2));
  CHECK(parse_rational("-2") == -2);
  CHECK(parse_rational("1.125") == Rational(9, 8));
  CHECK(to_string(Rational(6, 4)) == "3/2");
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational(""), Error);
}
