#include <doctest.h>

#include <cmath>

#include "corpus.hpp"
#include "oracles.hpp"
#include "torushom/errors.hpp"
#include "torushom/exact.hpp"
#include "torushom/graph_io.hpp"

using namespace torushom;

namespace {

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::Config;
}

}  // namespace

TEST_CASE("coloring weight") {
  const TorusGraph c4(4, 1);
  const auto k3 = preset_graph("k3");
  CHECK(coloring_weight(c4, k3.graph, k3.weights, {0, 1, 0, 2}) == 1);
  const auto w = parse_weight_list("3/2,1,1", 3);
  CHECK(coloring_weight(c4, k3.graph, w, {0, 1, 0, 1}) == Rational(9, 4));
  const auto ind = preset_graph("ind");
  const auto lw = parse_weight_list("5/3,1", 2);
  CHECK(coloring_weight(c4, ind.graph, lw, {0, 1, 0, 1}) == Rational(25, 9));
  CHECK(code_of([&] { coloring_weight(c4, k3.graph, k3.weights, {0, 0, 1, 2}); }) == ErrorCode::InvalidColoring);
}

TEST_CASE("brute force on the 4-cycle") {
  const TorusGraph q2(2, 2);
  const auto k3 = preset_graph("k3");
  const auto r = brute_force_partition_function(q2, k3.graph, k3.weights);
  CHECK(r.z == 18);
  CHECK(r.method == CountMethod::Brute);
  const auto ind = preset_graph("ind");
  CHECK(brute_force_partition_function(q2, ind.graph, ind.weights).z == 7);
  for (const char* lambda : {"1/2", "3", "7/5"}) {
    const Rational l = parse_rational(lambda);
    const WeightSet w({l, Rational(1)});
    CHECK(brute_force_partition_function(q2, ind.graph, w).z == 1 + 4 * l + 2 * l * l);
  }
}

TEST_CASE("transfer matrix examples") {
  const auto k3 = preset_graph("k3");
  CHECK(transfer_matrix_partition_function(TorusGraph(4, 1), k3.graph, k3.weights).z == 18);
  const auto k4l = preset_graph("k4loop");
  CHECK(transfer_matrix_partition_function(TorusGraph(2, 3), k4l.graph, k4l.weights).z == 65536);
  const auto wr = preset_graph("wr");
  const TorusGraph q2(2, 2);
  CHECK(transfer_matrix_partition_function(q2, wr.graph, wr.weights).z ==
        brute_force_partition_function(q2, wr.graph, wr.weights).z);
}

TEST_CASE("brute force, transfer matrix and plain enumeration agree") {
  std::vector<WeightedGraph> graphs;
  for (const auto& p : corpus::small_presets()) graphs.push_back(preset_graph(p));
  for (const auto& w : corpus::weighted()) graphs.push_back(corpus::load(w));
  int compared = 0;
  for (const auto& wg : graphs) {
    for (auto [m, d] : std::vector<std::pair<int, int>>{{2, 1}, {2, 2}, {2, 3}, {4, 1}, {4, 2}, {6, 1}}) {
      const TorusGraph t(m, d);
      const double raw = std::pow(static_cast<double>(wg.graph.num_colors()), static_cast<double>(t.num_vertices()));
      if (raw > 2e6) continue;
      CAPTURE(wg.name);
      CAPTURE(t.descriptor());
      const auto brute = brute_force_partition_function(t, wg.graph, wg.weights);
      const auto transfer = transfer_matrix_partition_function(t, wg.graph, wg.weights);
      CHECK(brute.z == transfer.z);
      if (raw <= 2e5) CHECK(brute.z == oracle::naive_z(m, d, wg.graph, wg.weights));
      ++compared;
    }
  }
  CHECK(compared >= 40);
}

TEST_CASE("transfer matrix with restrictions and threads") {
  const auto wr = preset_graph("wr");
  const TorusGraph t(4, 2);
  Restriction r(t.num_vertices(), wr.graph.all());
  r[3] = ColorSet::of({0});
  r[6] = ColorSet::of({1, 2});
  const auto brute = brute_force_partition_function(t, wr.graph, wr.weights, {}, r);
  CountBudget one, two;
  one.threads = 1;
  two.threads = 3;
  CHECK(transfer_matrix_partition_function(t, wr.graph, wr.weights, one, r).z == brute.z);
  CHECK(transfer_matrix_partition_function(t, wr.graph, wr.weights, two, r).z == brute.z);
}

TEST_CASE("for_each_coloring visits exactly the valid colorings") {
  const TorusGraph t(2, 3);
  const auto wr = preset_graph("wr");
  std::size_t count = 0;
  for_each_coloring(t, wr.graph, {}, {}, [&](const Coloring& f) {
    CHECK(is_valid(t, wr.graph, f));
    ++count;
  });
  CHECK(Rational(static_cast<unsigned long>(count)) == oracle::naive_z(2, 3, wr.graph, wr.weights));
}

TEST_CASE("disjoint-union law") {
  struct Case {
    const char* left;
    const char* right;
    int m, d;
  };
  for (const auto& c : {Case{"ind", "k3", 2, 2}, Case{"ind", "k3", 2, 3}, Case{"k4loop", "k8", 2, 2},
                        Case{"k4loop", "k8", 2, 3}, Case{"ind", "k3", 4, 2}}) {
    const TorusGraph t(c.m, c.d);
    const auto u = preset_graph(std::string(c.left) + "+" + c.right);
    const auto l = preset_graph(c.left);
    const auto r = preset_graph(c.right);
    CHECK(partition_function(t, u.graph, u.weights).z ==
          partition_function(t, l.graph, l.weights).z + partition_function(t, r.graph, r.weights).z);
  }
}

TEST_CASE("near-pure colorings of K_8") {
  const auto k8 = preset_graph("k8");
  const ColorSet a = ColorSet::of({0, 1, 2, 3}), b = ColorSet::of({4, 5, 6, 7});
  for (int d : {2, 3}) {
    const TorusGraph t(2, d);
    const BigInt n_half = power(BigInt(2), static_cast<unsigned long>(d - 1));
    // (1/2)(3/2)^d 16^(2^(d-1))
    const Rational expected = Rational(1, 2) * power(Rational(3, 2), d) * Rational(power(BigInt(16), n_half.get_ui()));

    // Direct count: odd side inside B, exactly one even vertex in B.
    Restriction r(t.num_vertices(), k8.graph.all());
    for (std::size_t x = 0; x < t.num_vertices(); ++x)
      if (!t.is_even(Vertex(x))) r[x] = b;
    CountBudget budget;
    budget.brute_states = 1e13;
    unsigned long direct = 0;
    for_each_coloring(t, k8.graph, r, budget, [&](const Coloring& f) {
      int in_b = 0;
      for (std::size_t x = 0; x < f.size(); ++x)
        if (t.is_even(Vertex(x)) && b.contains(f[x])) ++in_b;
      direct += in_b == 1;
    });
    CHECK(Rational(direct) == expected);

    // Sum of restricted partition functions over the position of the exceptional vertex.
    Rational by_pinning = 0;
    for (std::size_t v = 0; v < t.num_vertices(); ++v) {
      if (!t.is_even(Vertex(v))) continue;
      Restriction rv = r;
      for (std::size_t x = 0; x < t.num_vertices(); ++x)
        if (t.is_even(Vertex(x))) rv[x] = x == v ? b : a;
      by_pinning += transfer_matrix_partition_function(t, k8.graph, k8.weights, {}, rv).z;
    }
    CHECK(by_pinning == expected);
  }
}

TEST_CASE("pure coloring weight") {
  const TorusGraph q2(2, 2);
  const auto k3 = preset_graph("k3");
  CHECK(pure_coloring_weight(q2, k3.weights, {ColorSet::of({0}), ColorSet::of({1, 2})}) == 4);
  const auto k4l = preset_graph("k4loop");
  CHECK(pure_coloring_weight(TorusGraph(2, 3), k4l.weights, {ColorSet::full(4), ColorSet::full(4)}) == 65536);
  const WeightSet w({Rational(2, 3), Rational(1)});
  CHECK(pure_coloring_weight(q2, w, {ColorSet::of({0, 1}), ColorSet::of({1})}) == Rational(25, 9));
}

TEST_CASE("global bounds report") {
  const auto k3 = preset_graph("k3");
  const auto q2 = check_global_bounds(TorusGraph(2, 2), k3.graph, k3.weights);
  CHECK(q2.count == 18);
  CHECK(q2.eta == 2);
  CHECK(q2.lower_holds);
  CHECK_FALSE(q2.upper_holds);
  CHECK(q2.lower_slack == doctest::Approx(18.0 / 4.0));

  const auto k4l = preset_graph("k4loop");
  const auto q3 = check_global_bounds(TorusGraph(2, 3), k4l.graph, k4l.weights);
  CHECK(q3.count == 65536);
  CHECK(q3.lower_holds);
  CHECK(q3.upper_holds);
  CHECK(q3.lower_slack == doctest::Approx(1.0));

  const auto loop = preset_graph("loop");
  const auto one = check_global_bounds(TorusGraph(4, 2), loop.graph, loop.weights);
  CHECK(one.count == 1);
  CHECK(one.lower_holds);
  CHECK(one.upper_holds);

  CHECK_THROWS_AS(check_global_bounds(TorusGraph(2, 2), k3.graph, parse_weight_list("2,1,1", 3)), Error);
}

TEST_CASE("exact marginals") {
  const TorusGraph q2(2, 2);
  const auto k3 = preset_graph("k3");
  for (Vertex x = 0; x < 4; ++x)
    for (Color k = 0; k < 3; ++k) CHECK(exact_marginal(q2, k3.graph, k3.weights, x, k) == Rational(1, 3));
  CHECK(exact_marginal(q2, k3.graph, k3.weights, 2, 1, Pin{2, 1}) == 1);

  const TorusGraph c4(4, 1);
  const auto ind = preset_graph("ind");
  for (Vertex x = 0; x < 4; ++x) CHECK(exact_marginal(c4, ind.graph, ind.weights, x, 0) == Rational(2, 7));

  const auto occ = exact_occupation(c4, ind.graph, ind.weights, 0, Pin{2, 0});
  CHECK(occ[0] + occ[1] == 1);
  CHECK(occ[0] == Rational(1, 2));  // given the opposite vertex is occupied: {0,2} or {2}

  const ConstraintGraph isolated(2, {{1, 1}});
  CHECK(code_of([&] { exact_marginal(c4, isolated, WeightSet::uniform(2), 0, 1, Pin{1, 0}); }) ==
        ErrorCode::ZeroConditioningEvent);
}

TEST_CASE("marginals sum to one and are translation invariant") {
  const auto wr = preset_graph("wr");
  const auto w = parse_weight_list("1/2,1,3/4", 3);
  const TorusGraph t(4, 2);
  std::vector<Rational> reference;
  for (std::size_t x = 0; x < t.num_vertices(); ++x) {
    const auto occ = exact_occupation(t, wr.graph, w, Vertex(x));
    Rational total = 0;
    for (const auto& p : occ) total += p;
    CHECK(total == 1);
    if (x == 0) reference = occ;
    CHECK(occ == reference);
  }
  const auto shifted = exact_occupation(t, wr.graph, w, t.step(5, 0, 1), Pin{t.step(0, 0, 1), 2});
  CHECK(shifted == exact_occupation(t, wr.graph, w, 5, Pin{0, 2}));
}

TEST_CASE("budgets are hard errors") {
  const auto k3 = preset_graph("k3");
  CountBudget tiny;
  tiny.brute_states = 100;
  tiny.transfer_states = 10;
  CHECK(code_of([&] { brute_force_partition_function(TorusGraph(2, 3), k3.graph, k3.weights, tiny); }) ==
        ErrorCode::BudgetExceeded);
  CHECK(code_of([&] { transfer_matrix_partition_function(TorusGraph(4, 2), k3.graph, k3.weights, tiny); }) ==
        ErrorCode::BudgetExceeded);
  CHECK(code_of([&] { partition_function(TorusGraph(4, 2), k3.graph, k3.weights, tiny); }) ==
        ErrorCode::BudgetExceeded);
}

TEST_CASE("partition function picks a method") {
  const auto k3 = preset_graph("k3");
  CHECK(partition_function(TorusGraph(4, 2), k3.graph, k3.weights).method == CountMethod::Transfer);
  CountBudget no_transfer;
  no_transfer.transfer_states = 1;
  const auto r = partition_function(TorusGraph(2, 2), k3.graph, k3.weights, no_transfer);
  CHECK(r.method == CountMethod::Brute);
  CHECK(r.z == 18);
}
