#include <doctest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "torushom/errors.hpp"
#include "torushom/exact.hpp"
#include "torushom/graph_io.hpp"
#include "torushom/sampler.hpp"

using namespace torushom;

namespace {

Vertex at(const TorusGraph& t, std::initializer_list<int> c) {
  const std::vector<int> v(c);
  return t.encode(v);
}

/// Exact p(f) for every valid coloring, keyed by the coloring.
std::map<Coloring, double> exact_distribution(const TorusGraph& t, const WeightedGraph& wg, const Restriction& r = {}) {
  std::map<Coloring, Rational> weight;
  Rational z = 0;
  for_each_coloring(t, wg.graph, r, {}, [&](const Coloring& f) {
    const Rational p = coloring_weight(t, wg.graph, wg.weights, f);
    weight[f] = p;
    z += p;
  });
  std::map<Coloring, double> out;
  for (auto& [f, p] : weight) out[f] = Rational(p / z).get_d();
  return out;
}

/// Runs a chain and collects random states reached along the way.
std::vector<Coloring> chain_states(const TorusGraph& t, const WeightedGraph& wg, std::uint64_t seed, int count) {
  ChainConfig cfg;
  cfg.steps = static_cast<std::uint64_t>(count) * 37;
  cfg.thin = 37;
  cfg.seed = seed;
  std::vector<Coloring> out;
  run_chain(t, wg.graph, wg.weights, cfg, InitialState::uniform_greedy(),
            [&](const ChainSample& s) { out.push_back(s.state); });
  return out;
}

}  // namespace

TEST_CASE("splitmix64 reference values") {
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(1) == 0x910a2dec89025cc1ULL);
}

TEST_CASE("bounded draws") {
  Rng rng(5);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) counts[rng.below(7)]++;
  for (int c : counts) CHECK(std::abs(c - 10000) < 500);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("chain configuration") {
  ChainConfig cfg;
  cfg.burn_in = cfg.steps;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.burn_in = 0;
  cfg.thin = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg.thin = 1;
  cfg.steps = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("glauber step examples") {
  const TorusGraph q2(2, 2);
  Rng rng(3);
  const auto loop = preset_graph("loop");
  Coloring f(4, 0);
  for (int i = 0; i < 100; ++i) {
    glauber_step(q2, loop.graph, loop.weights.as_doubles(), f, rng);
    CHECK(f == Coloring(4, 0));
  }

  const auto ind = preset_graph("ind");
  for (int i = 0; i < 200; ++i) {
    Coloring g{0, 1, 1, 1};  // (0,0) occupied
    const auto info = glauber_step(q2, ind.graph, ind.weights.as_doubles(), g, rng);
    if (info.vertex == at(q2, {0, 1}) || info.vertex == at(q2, {1, 0})) {
      CHECK(info.allowed == 1);
      CHECK(g[info.vertex] == 1);
    }
    CHECK(is_valid(q2, ind.graph, g));
  }

  const auto k3 = preset_graph("k3");
  for (int i = 0; i < 200; ++i) {
    Coloring g{0, 1, 2, 0};  // even vertices 0 and 3 see {1, 2}
    const auto info = glauber_step(q2, k3.graph, k3.weights.as_doubles(), g, rng);
    if (q2.is_even(info.vertex)) {
      CHECK(info.allowed == 1);
      CHECK(g[info.vertex] == 0);
    }
  }

  for (int i = 0; i < 50; ++i) {
    Coloring g{0, 1, 1, 1};
    const auto info = glauber_step(q2, ind.graph, ind.weights.as_doubles(), g, rng, Vertex(0));
    CHECK(info.vertex != 0);
  }
}

TEST_CASE("chains are deterministic given the seed") {
  const TorusGraph t(4, 2);
  const auto wr = preset_graph("wr");
  auto run = [&](std::uint64_t seed) {
    ChainConfig cfg;
    cfg.steps = 5000;
    cfg.burn_in = 1000;
    cfg.thin = 7;
    cfg.seed = seed;
    std::vector<Coloring> out;
    const auto stats = run_chain(t, wr.graph, wr.weights, cfg, InitialState::uniform_greedy(),
                                 [&](const ChainSample& s) {
                                   CHECK(is_valid(t, wr.graph, s.state));
                                   out.push_back(s.state);
                                 });
    CHECK(stats.emitted == out.size());
    CHECK(stats.emitted == 4000 / 7);
    return out;
  };
  CHECK(run(11) == run(11));
  CHECK(run(11) != run(12));
}

TEST_CASE("stationarity on the 4-cycle hard-core model") {
  const TorusGraph q2(2, 2);
  const auto ind = preset_graph("ind");
  const auto exact = exact_distribution(q2, ind);
  REQUIRE(exact.size() == 7);
  ChainConfig cfg;
  cfg.steps = 1'000'000;
  cfg.burn_in = 1000;
  cfg.seed = 2024;
  std::map<Coloring, double> seen;
  std::uint64_t total = 0;
  run_chain(q2, ind.graph, ind.weights, cfg, InitialState::uniform_greedy(), [&](const ChainSample& s) {
    seen[s.state] += 1;
    ++total;
  });
  double tv = 0;
  for (auto& [f, p] : exact) tv += std::abs(seen[f] / double(total) - p);
  CHECK(tv / 2 <= 0.01);
}

TEST_CASE("pinned chains sample the conditional measure") {
  const TorusGraph c4(4, 1);
  const auto k3 = preset_graph("k3");
  for (Vertex x : {Vertex(1), Vertex(2)}) {
    const auto want = exact_occupation(c4, k3.graph, k3.weights, x, Pin{0, 0});
    ChainConfig cfg;
    cfg.steps = 400'000;
    cfg.burn_in = 1000;
    cfg.seed = 99 + x;
    cfg.pinned = Pin{0, 0};
    std::vector<double> hist(3, 0);
    double total = 0;
    run_chain(c4, k3.graph, k3.weights, cfg, InitialState::uniform_greedy(), [&](const ChainSample& s) {
      CHECK(s.state[0] == 0);
      hist[s.state[x]] += 1;
      total += 1;
    });
    double tv = 0;
    for (int k = 0; k < 3; ++k) tv += std::abs(hist[k] / total - want[k].get_d());
    CHECK(tv / 2 <= 0.02);
  }
}

TEST_CASE("detailed balance of empirical transitions") {
  const TorusGraph q2(2, 2);
  const auto ind = preset_graph("ind");
  const WeightedGraph weighted{ind.graph, parse_weight_list("3/2,1", 2), "ind"};
  ChainConfig cfg;
  cfg.steps = 600'000;
  cfg.seed = 17;
  std::map<std::pair<Coloring, Coloring>, double> flow;
  Coloring prev;
  run_chain(q2, weighted.graph, weighted.weights, cfg, InitialState::uniform_greedy(), [&](const ChainSample& s) {
    if (!prev.empty() && prev != s.state) flow[{prev, s.state}] += 1;
    prev = s.state;
  });
  int pairs = 0;
  for (const auto& [key, n] : flow) {
    const double back = flow.count({key.second, key.first}) ? flow.at({key.second, key.first}) : 0.0;
    CHECK(std::abs(n - back) <= 5 * std::sqrt(n + back) + 5);
    ++pairs;
  }
  CHECK(pairs > 0);
}

TEST_CASE("greedy initialization falls back to a pure coloring") {
  const TorusGraph t(4, 3);
  // color 2 has no neighbors, so a greedy pass almost surely paints itself into a corner
  const ConstraintGraph trap(3, {{0, 1}});
  ChainConfig cfg;
  cfg.steps = 10;
  const auto stats = run_chain(t, trap, WeightSet::uniform(3), cfg, InitialState::uniform_greedy(), {});
  CHECK(stats.used_fallback);
  CHECK(is_valid(t, trap, stats.initial));

  const auto ind = preset_graph("ind");
  cfg.pinned = Pin{0, 0};
  const auto pinned = run_chain(t, ind.graph, ind.weights, cfg, InitialState::pure(eta_and_maximal_pairs(ind.graph, ind.weights).pairs[1]), {});
  CHECK(pinned.initial[0] == 0);
  CHECK(is_valid(t, ind.graph, pinned.initial));

  const ConstraintGraph isolated(2, {{1, 1}});
  cfg.pinned = Pin{0, 0};
  CHECK_THROWS_AS(run_chain(t, isolated, WeightSet::uniform(2), cfg, InitialState::uniform_greedy(), {}), Error);
}

TEST_CASE("ideal edges") {
  const TorusGraph q2(2, 2);
  const auto ind = preset_graph("ind");
  Coloring f(4, 1);
  f[at(q2, {0, 0})] = 0;
  const Edge e{at(q2, {1, 1}), at(q2, {1, 0})};
  const auto pair = is_ideal_edge(q2, ind.graph, ind.weights, f, e);
  REQUIRE(pair.has_value());
  CHECK(*pair == MaximalPair{ColorSet::of({0, 1}), ColorSet::of({1})});
  CHECK_FALSE(is_ideal_edge(q2, ind.graph, ind.weights, Coloring(4, 1), e).has_value());
  CHECK_THROWS_AS(is_ideal_edge(q2, ind.graph, ind.weights, f, Edge{0, 3}), Error);

  const auto k3 = preset_graph("k3");
  const Coloring pure{0, 1, 2, 0};
  for (const auto& edge : q2.edges()) {
    const auto p = is_ideal_edge(q2, k3.graph, k3.weights, pure, edge);
    REQUIRE(p.has_value());
    CHECK(*p == MaximalPair{ColorSet::of({0}), ColorSet::of({1, 2})});
  }
  const IdealEdgeDetector detector(q2, k3.graph, k3.weights);
  CHECK(detector.not_ideal_fraction(pure) == 0.0);
}

TEST_CASE("classification examples") {
  const TorusGraph q2(2, 2);
  const auto k3 = preset_graph("k3");
  const auto label = classify(q2, k3.graph, k3.weights, {0, 1, 2, 0});
  CHECK(label.pure);
  CHECK(label.pair == MaximalPair{ColorSet::of({0}), ColorSet::of({1, 2})});
  CHECK(label.defect_e.empty());
  CHECK(label.defect_o.empty());
  CHECK(label.ideal_fraction == 1);
  CHECK(label.describe(k3.graph) == "pure({1},{2,3})");

  const auto ind = preset_graph("ind");
  const auto out = classify(q2, ind.graph, ind.weights, Coloring(4, 1));
  CHECK_FALSE(out.pure);
  CHECK(out.ideal_fraction == 0);
  CHECK(out.describe(ind.graph) == "exceptional");

  // Q_3: even side all 0, odd side split so every even vertex sees both 1 and 2.
  const TorusGraph q3(2, 3);
  std::optional<Coloring> found;
  for (std::uint32_t mask = 0; mask < 16 && !found; ++mask) {
    Coloring g(8, 0);
    int j = 0;
    for (std::size_t x = 0; x < 8; ++x)
      if (!q3.is_even(Vertex(x))) g[x] = ((mask >> j++) & 1u) ? 2 : 1;
    bool all_see_both = true;
    for (std::size_t x = 0; x < 8; ++x) {
      if (!q3.is_even(Vertex(x))) continue;
      ColorSet seen;
      for (Vertex y : q3.neighbors(Vertex(x))) seen.insert(g[y]);
      all_see_both = all_see_both && seen == ColorSet::of({1, 2});
    }
    if (all_see_both) found = g;
  }
  REQUIRE(found.has_value());
  ClassifyThresholds tight;
  tight.balance_tol = 0.0;
  const auto q3_label = classify(q3, k3.graph, k3.weights, *found, tight);
  CHECK(q3_label.pure);
  CHECK(q3_label.pair == MaximalPair{ColorSet::of({0}), ColorSet::of({1, 2})});
  CHECK(q3_label.balanced);

  // Four vertices of Z_4^2 with a lone color 2 give an unbalanced odd side.
  const TorusGraph t(4, 2);
  Coloring skewed(16, 0);
  for (std::size_t x = 0; x < 16; ++x)
    if (!t.is_even(Vertex(x))) skewed[x] = 1;
  skewed[at(t, {0, 1})] = 2;
  const auto sk = classify(t, k3.graph, k3.weights, skewed);
  CHECK_FALSE(sk.balanced);

  ClassifyThresholds bad;
  bad.defect_cap = 0.5;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("classification invariants on chain states") {
  struct Case {
    const char* preset;
    const char* weights;
    int m, d;
  };
  for (const auto& c : {Case{"ind", "1", 2, 4}, Case{"ind", "3", 4, 2}, Case{"k3", "", 2, 4}, Case{"wr", "", 4, 2},
                        Case{"k4", "", 2, 4}, Case{"ind+k3", "", 2, 3}}) {
    auto wg = preset_graph(c.preset);
    if (std::string(c.weights) == "1") wg.weights = WeightSet::uniform(2);
    if (std::string(c.weights) == "3") wg.weights = parse_weight_list("3,1", 2);
    const TorusGraph t(c.m, c.d);
    const ClassifyThresholds thresholds;
    const auto autos = automorphisms(wg.graph, wg.weights, 50);
    CAPTURE(c.preset);
    for (const auto& f : chain_states(t, wg, 5, 150)) {
      const auto label = classify(t, wg.graph, wg.weights, f, thresholds);
      const auto swapped = classify(t, wg.graph, wg.weights, parity_swapped(t, f), thresholds);
      CHECK(label.pure == swapped.pure);
      if (label.pure) {
        CHECK(double(label.defect_e.size() + label.defect_o.size()) <=
              thresholds.defect_cap * double(t.num_vertices()) + 1e-9);
        CHECK(swapped.pair == label.pair.swapped());
        for (const auto& phi : autos) {
          const auto mapped = classify(t, wg.graph, wg.weights, recolored(f, phi), thresholds);
          REQUIRE(mapped.pure);
          CHECK(mapped.pair == apply(phi, label.pair));
        }
      }
    }
  }
}

TEST_CASE("exact not-ideal probability") {
  const auto ind = preset_graph("ind");
  const TorusGraph q2(2, 2);
  // Independent sets of C_4 that leave an edge non-ideal, by direct enumeration of the oracle.
  const Edge e = q2.edges().front();
  Rational bad = 0;
  Rational total = 0;
  oracle::enumerate(2, 2, ind.graph, [&](const std::vector<Color>& f) {
    total += 1;
    if (!is_ideal_edge(q2, ind.graph, ind.weights, f, e)) bad += 1;
  });
  CHECK(exact_not_ideal_probability(q2, ind.graph, ind.weights, e) == bad / total);
  CHECK(exact_not_ideal_probability(q2, ind.graph, ind.weights) == bad / total);

  const auto loop = preset_graph("loop");
  CHECK(exact_not_ideal_probability(TorusGraph(4, 2), loop.graph, loop.weights) == 0);

  std::vector<Rational> by_d;
  for (int d : {2, 3, 4}) by_d.push_back(exact_not_ideal_probability(TorusGraph(2, d), ind.graph, ind.weights));
  CHECK(by_d[0] > by_d[1]);
  CHECK(by_d[1] > by_d[2]);
}

TEST_CASE("epsilon estimate agrees with the exact value") {
  const auto ind = preset_graph("ind");
  const TorusGraph q2(2, 2);
  const double exact = exact_not_ideal_probability(q2, ind.graph, ind.weights).get_d();
  ChainConfig cfg;
  cfg.steps = 300'000;
  cfg.burn_in = 1000;
  cfg.seed = 8;
  for (auto mode : {EpsilonMode::AllEdges, EpsilonMode::SingleEdge}) {
    const auto est = epsilon_estimate(q2, ind.graph, ind.weights, cfg, mode);
    CHECK(est.samples == cfg.steps - cfg.burn_in);
    CHECK(est.std_error > 0);
    CHECK(std::abs(est.p_not_ideal - exact) <= 3 * est.std_error);
  }
  const auto loop = preset_graph("loop");
  cfg.steps = 2000;
  CHECK(epsilon_estimate(q2, loop.graph, loop.weights, cfg).p_not_ideal == 0.0);
}

TEST_CASE("batch means standard error") {
  Rng rng(1);
  std::vector<double> iid(90000);
  for (auto& v : iid) v = rng.uniform();
  const double se = batch_means_stderr(iid);
  const double want = std::sqrt(1.0 / 12.0 / double(iid.size()));
  CHECK(se == doctest::Approx(want).epsilon(0.5));
  CHECK(batch_means_stderr(std::vector<double>(100, 0.5)) == 0.0);
}

TEST_CASE("multiple chains are reproducible and thread independent") {
  const TorusGraph t(4, 2);
  const auto wr = preset_graph("wr");
  ChainConfig cfg;
  cfg.steps = 3000;
  cfg.burn_in = 500;
  cfg.seed = 42;
  const auto one = run_chains(t, wr.graph, wr.weights, cfg, 4, InitialState::uniform_greedy(), {}, 1);
  const auto three = run_chains(t, wr.graph, wr.weights, cfg, 4, InitialState::uniform_greedy(), {}, 3);
  REQUIRE(one.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(one[i].index == i);
    CHECK(one[i].seed == (42 ^ splitmix64(i)));
    CHECK(one[i].stats.initial == three[i].stats.initial);
    CHECK(one[i].mean_ideal_fraction == three[i].mean_ideal_fraction);
    CHECK(one[i].phase_counts == three[i].phase_counts);
    CHECK(one[i].epsilon.p_not_ideal == three[i].epsilon.p_not_ideal);
  }
}

TEST_CASE("sample records") {
  const TorusGraph q2(2, 2);
  const auto k3 = preset_graph("k3");
  const Coloring f{0, 1, 2, 0};
  const auto label = classify(q2, k3.graph, k3.weights, f);
  const auto rec = sample_record(q2, k3.graph, 12, f, label, true);
  CHECK(rec.at("step") == 12);
  CHECK(rec.at("phase_label") == "pure({1},{2,3})");
  CHECK(rec.at("ideal_fraction").get<double>() == 1.0);
  CHECK(rec.at("color_histogram_E") == nlohmann::json::array({2, 0, 0}));
  CHECK(rec.at("color_histogram_O") == nlohmann::json::array({0, 1, 1}));
  CHECK(rec.at("coloring") == nlohmann::json::parse("[[0,1],[1,1],[2,1],[0,1]]"));
  CHECK_FALSE(sample_record(q2, k3.graph, 12, f, label, false).contains("coloring"));
  CHECK(run_length_encode({3, 3, 3, 1, 1, 3}) == nlohmann::json::parse("[[3,3],[1,2],[3,1]]"));
}
