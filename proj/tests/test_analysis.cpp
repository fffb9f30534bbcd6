#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "torushom/analysis.hpp"
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

std::vector<Rational> rationals(std::initializer_list<Rational> v) { return v; }

WeightedGraph hard_core(const Rational& lambda) {
  auto wg = preset_graph("ind");
  wg.weights = WeightSet({lambda, Rational(1)});
  return wg;
}

}  // namespace

TEST_CASE("occupation targets") {
  for (const char* text : {"1", "3/2", "1/3", "5"}) {
    const Rational l = parse_rational(text);
    const auto wg = hard_core(l);
    for (Side side : {Side::Even, Side::Odd}) {
      CHECK(theorem_occupation_vector(wg.graph, wg.weights, side) ==
            rationals({l / (2 * (1 + l)), (2 + l) / (2 * (1 + l))}));
    }
  }
  for (int q = 2; q <= 7; ++q) {
    const auto kq = preset_graph("kq:" + std::to_string(q));
    for (const auto& p : theorem_occupation_vector(kq.graph, kq.weights, Side::Even)) CHECK(p == Rational(1, q));
  }
  const auto wr = preset_graph("wr");
  CHECK(theorem_occupation_vector(wr.graph, wr.weights, Side::Even) ==
        rationals({Rational(1, 4), Rational(1, 2), Rational(1, 4)}));
  CHECK(theorem_occupation_target(wr.graph, wr.weights, Side::Odd, 1) == Rational(1, 2));
}

TEST_CASE("conditional targets: hard-core model") {
  for (const char* text : {"1", "3/2", "1/3"}) {
    const Rational l = parse_rational(text);
    const auto wg = hard_core(l);
    for (Side side : {Side::Even, Side::Odd}) {
      CHECK(theorem_conditional_vector(wg.graph, wg.weights, Relation::SameSide, 0, side) ==
            rationals({l / (1 + l), 1 / (1 + l)}));
      CHECK(theorem_conditional_vector(wg.graph, wg.weights, Relation::CrossSide, 0, side) ==
            rationals({Rational(0), Rational(1)}));
    }
  }
}

TEST_CASE("conditional targets: proper colorings") {
  for (int q = 2; q <= 7; ++q) {
    CAPTURE(q);
    const auto kq = preset_graph("kq:" + std::to_string(q));
    const auto same = theorem_conditional_vector(kq.graph, kq.weights, Relation::SameSide, 0);
    const auto cross = theorem_conditional_vector(kq.graph, kq.weights, Relation::CrossSide, 0);
    CHECK(same[0] == ratio(2, q));
    CHECK(cross[0] == 0);
    for (int k = 1; k < q; ++k) {
      CHECK(same[k] == ratio(q - 2, q * (q - 1)));
      CHECK(cross[k] == Rational(1, q - 1));
    }
  }
}

TEST_CASE("conditional targets: Widom-Rowlinson") {
  const auto wr = preset_graph("wr");
  CHECK(theorem_conditional_vector(wr.graph, wr.weights, Relation::SameSide, 0) ==
        rationals({Rational(1, 2), Rational(1, 2), Rational(0)}));
  CHECK(theorem_conditional_target(wr.graph, wr.weights, Relation::SameSide, 2, 0) == 0);
  // Color 1 on the odd side forces the ({1,2},{1,2}) phase, so the class sums exclude color 3.
  CHECK(theorem_conditional_vector(wr.graph, wr.weights, Relation::CrossSide, 0) ==
        rationals({Rational(1, 2), Rational(1, 2), Rational(0)}));
  CHECK(theorem_conditional_raw(wr.graph, wr.weights, Relation::CrossSide, 0, 0) == Rational(1, 4));
  CHECK(theorem_conditional_raw(wr.graph, wr.weights, Relation::CrossSide, 2, 0) == 0);
}

TEST_CASE("phase mixture reference") {
  const auto k3 = preset_graph("k3");
  CHECK(phase_mixture_conditional(k3.graph, k3.weights, Relation::SameSide, 0, 0) == Rational(3, 4));
  for (const char* name : {"ind", "k4", "k6", "wr"}) {
    const auto wg = preset_graph(name);
    for (Relation rel : {Relation::SameSide, Relation::CrossSide})
      for (std::size_t k = 0; k < wg.graph.num_colors(); ++k) {
        CAPTURE(name);
        CHECK(phase_mixture_conditional(wg.graph, wg.weights, rel, Color(k), 0) ==
              theorem_conditional_target(wg.graph, wg.weights, rel, Color(k), 0));
      }
  }
}

TEST_CASE("target errors") {
  const auto mixed = preset_graph("k4loop+k8");
  CHECK(code_of([&] { theorem_occupation_target(mixed.graph, mixed.weights, Side::Even, 0); }) ==
        ErrorCode::NotEquipartition);
  const ConstraintGraph trap(3, {{0, 1}});
  CHECK(code_of([&] { theorem_conditional_vector(trap, WeightSet::uniform(3), Relation::SameSide, 2); }) ==
        ErrorCode::ZeroConditioningEvent);
  CHECK(theorem_occupation_target(trap, WeightSet::uniform(3), Side::Even, 2) == 0);
}

TEST_CASE("influence ratio") {
  CHECK(influence_ratio(Rational(2, 3), Rational(1, 3)) == 2);
  CHECK(influence_ratio(0.5, 0.25) == doctest::Approx(2.0));
  CHECK(code_of([] { influence_ratio(Rational(1), Rational(0)); }) == ErrorCode::ZeroDenominator);
  CHECK(code_of([] { influence_ratio(1.0, 0.0); }) == ErrorCode::ZeroDenominator);
  CHECK(is_long_range(1.2, 0.1));
  CHECK_FALSE(is_long_range(1.05, 0.1));

  const auto k3 = preset_graph("k3");
  const auto target = theorem_conditional_target(k3.graph, k3.weights, Relation::SameSide, 0, 0);
  const auto marginal = theorem_occupation_target(k3.graph, k3.weights, Side::Even, 0);
  CHECK(influence_ratio(target, marginal) == 2);

  const auto loop = preset_graph("loop");
  const auto r = exact_influence(TorusGraph(4, 2), loop.graph, loop.weights, 10, 0, 0);
  REQUIRE(r.ratio[0].has_value());
  CHECK(*r.ratio[0] == 1);

  const auto ind = preset_graph("ind");
  const auto cross = theorem_conditional_target(ind.graph, ind.weights, Relation::CrossSide, 0, 0);
  CHECK(influence_ratio(cross, theorem_occupation_target(ind.graph, ind.weights, Side::Even, 0)) == 0);
}

TEST_CASE("d_inf") {
  CHECK(d_inf(rationals({Rational(1, 2), Rational(1, 2)}), rationals({Rational(1, 4), Rational(3, 4)})) ==
        doctest::Approx(0.25));
  CHECK(d_inf(std::vector<double>{0.1, 0.9}, rationals({Rational(0), Rational(1)})) == doctest::Approx(0.1));
}

TEST_CASE("farthest vertex by relation") {
  for (auto [m, d] : std::vector<std::pair<int, int>>{{2, 2}, {2, 3}, {2, 4}, {4, 2}, {6, 2}, {4, 3}}) {
    const TorusGraph t(m, d);
    for (Vertex y : {Vertex(0), Vertex(t.num_vertices() - 1)}) {
      for (Relation rel : {Relation::SameSide, Relation::CrossSide}) {
        const Vertex x = farthest_vertex(t, y, rel);
        CHECK((t.is_even(x) == t.is_even(y)) == (rel == Relation::SameSide));
        int best = -1;
        Vertex first = 0;
        for (std::size_t v = 0; v < t.num_vertices(); ++v) {
          if ((t.is_even(Vertex(v)) == t.is_even(y)) != (rel == Relation::SameSide)) continue;
          const int dist = t.distance(Vertex(v), y);
          if (dist > best) {
            best = dist;
            first = Vertex(v);
          }
        }
        CHECK(x == first);
      }
    }
  }
  const TorusGraph q3(2, 3);
  CHECK(farthest_vertex(q3, 0, Relation::CrossSide) == q3.antipode(0));
  CHECK(q3.distance(0, farthest_vertex(q3, 0, Relation::SameSide)) == 2);
}

TEST_CASE("exact influence report") {
  const TorusGraph q2(2, 2);
  const auto ind = preset_graph("ind");
  const auto r = exact_influence(q2, ind.graph, ind.weights, 3, 0, 0);
  CHECK(r.relation == Relation::SameSide);
  CHECK(r.distance == 2);
  CHECK(r.marginal[0] == exact_marginal(q2, ind.graph, ind.weights, 3, 0));
  CHECK(r.conditional[0] == exact_marginal(q2, ind.graph, ind.weights, 3, 0, Pin{0, 0}));
  CHECK(r.conditional[0] == Rational(1, 2));  // {0}, {0,3}
  CHECK(r.marginal[0] == Rational(2, 7));
  REQUIRE(r.ratio[0].has_value());
  CHECK(*r.ratio[0] == Rational(7, 4));
  CHECK(r.target == rationals({Rational(1, 2), Rational(1, 2)}));
  CHECK(r.d_inf_to_target == doctest::Approx(0.0));
}

TEST_CASE("hard-core antipodal conditionals match enumeration") {
  // At these sizes the distance to the limiting vectors still grows with d.
  const auto ind = preset_graph("ind");
  for (int d : {2, 3, 4}) {
    const TorusGraph t(2, d);
    const Vertex x = t.antipode(0);
    const auto r = exact_influence(t, ind.graph, ind.weights, x, 0, 0);
    Rational joint = 0, pinned = 0;
    oracle::enumerate(2, d, ind.graph, [&](const std::vector<Color>& f) {
      if (f[0] != 0) return;
      pinned += 1;
      if (f[x] == 0) joint += 1;
    });
    CHECK(r.conditional[0] == joint / pinned);
    CHECK(r.relation == (d % 2 == 0 ? Relation::SameSide : Relation::CrossSide));
  }
  const TorusGraph q3(2, 3);
  CHECK(exact_influence(q3, ind.graph, ind.weights, q3.antipode(0), 0, 0).conditional[0] == Rational(1, 9));
}

TEST_CASE("conjecture exponent: hard-core model") {
  const auto ind = preset_graph("ind");
  const auto ex = eta_and_maximal_pairs(ind.graph, ind.weights);
  for (int d = 1; d <= 8; ++d) {
    const TorusGraph t(2, d);
    for (const auto& pair : ex.pairs) {
      CHECK(conjecture_L(ind.graph, ind.weights, pair, t) == Rational(1, static_cast<unsigned long>(2) << d));
      const auto p = conjecture_weight_prediction(ind.graph, ind.weights, pair, t);
      CHECK(p.correction_exponent == Rational(1, 2));
      CHECK(p.eta == 2);
      CHECK(p.leading_exponent == BigInt(1) << (d - 1));
    }
  }
}

TEST_CASE("conjecture exponent: proper 3-colorings") {
  const auto k3 = preset_graph("k3");
  const auto ex = eta_and_maximal_pairs(k3.graph, k3.weights);
  for (int d = 1; d <= 8; ++d) {
    const TorusGraph t(2, d);
    for (const auto& pair : ex.pairs)
      CHECK(conjecture_weight_prediction(k3.graph, k3.weights, pair, t).correction_exponent == 1);
  }
  CHECK(ex.pairs.size() == 6);
}

TEST_CASE("conjecture exponent: looped complete graph") {
  const auto k4l = preset_graph("k4loop");
  const MaximalPair full{ColorSet::full(4), ColorSet::full(4)};
  const TorusGraph q3(2, 3);
  CHECK(conjecture_L(k4l.graph, k4l.weights, full, q3) == 0);
  const auto p = conjecture_weight_prediction(k4l.graph, k4l.weights, full, q3);
  CHECK(std::exp(p.log_prediction) == doctest::Approx(65536.0));
}

TEST_CASE("conjecture prediction dominates the pure weight") {
  for (const char* name : {"ind", "wr", "k3", "k4", "k5", "path:3", "cycle:6", "ind+k3"}) {
    const auto wg = preset_graph(name);
    for (const auto& pair : eta_and_maximal_pairs(wg.graph, wg.weights).pairs)
      for (auto [m, d] : std::vector<std::pair<int, int>>{{2, 3}, {4, 2}}) {
        const TorusGraph t(m, d);
        const auto p = conjecture_weight_prediction(wg.graph, wg.weights, pair, t);
        CHECK(p.correction_exponent >= 0);
        CHECK(p.log_prediction >= log_of(pure_coloring_weight(t, wg.weights, pair)) - 1e-9);
      }
  }
}

TEST_CASE("f(q)") {
  for (int d = 1; d <= 10; ++d) {
    CHECK(conjecture_f_q(3, d) == 1);
    CHECK(conjecture_f_q(2, d) == 0);
    CHECK(conjecture_f_q(4, d) == power(Rational(1), d));
  }
  CHECK(conjecture_f_q(5, 2) == Rational(3, 4) * Rational(16, 9) + Rational(1, 3) * 1);
  CHECK_THROWS_AS(conjecture_f_q(1, 2), Error);

  const auto three = coloring_count_prediction(3, 4);
  CHECK(three.prefactor == 6);
  CHECK(three.f == 1);
  CHECK(three.base == 2);
  CHECK(three.base_exponent == 8);
  CHECK(three.log_value == doctest::Approx(std::log(6.0) + 1.0 + 8 * std::log(2.0)));

  const auto two = coloring_count_prediction(2, 3);
  CHECK(two.prefactor == 2);
  CHECK(two.log_value == doctest::Approx(std::log(2.0)));

  const auto four = coloring_count_prediction(4, 2);
  const auto k4 = preset_graph("k4");
  CHECK(partition_function(TorusGraph(2, 2), k4.graph, k4.weights).z == 84);
  CHECK(std::exp(four.log_value) == doctest::Approx(6.0 * 16.0 * std::exp(1.0)));
}

TEST_CASE("L and f(q) agree on complete graphs") {
  for (int q = 2; q <= 8; ++q)
    for (int d = 1; d <= 6; ++d) {
      CAPTURE(q);
      CAPTURE(d);
      CHECK(consistency_L_vs_f(q, d));
    }
}
