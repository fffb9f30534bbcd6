#include "torushom/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "torushom/errors.hpp"

namespace torushom {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t Rng::below(std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  while (true) {
    const std::uint64_t r = next();
    if (r >= threshold) return r % n;
  }
}

void ChainConfig::validate() const {
  if (steps == 0) throw Error(ErrorCode::Config, "steps must be positive");
  if (thin == 0) throw Error(ErrorCode::Config, "thin must be positive");
  if (burn_in >= steps) throw Error(ErrorCode::Config, "burn_in must be smaller than steps");
}

void ClassifyThresholds::validate() const {
  if (!(defect_cap >= 0 && defect_cap < 0.5)) throw Error(ErrorCode::Config, "defect_cap must lie in [0, 0.5)");
  if (!(balance_tol >= 0)) throw Error(ErrorCode::Config, "balance_tol must be nonnegative");
}

namespace {

Color draw_weighted(ColorSet allowed, const std::vector<double>& weights, Rng& rng) {
  double total = 0;
  for (Color c : allowed.members()) total += weights[c];
  double r = rng.uniform() * total;
  Color last = allowed.first();
  for (Color c : allowed.members()) {
    last = c;
    r -= weights[c];
    if (r < 0) return c;
  }
  return last;
}

Color draw_uniform(ColorSet allowed, Rng& rng) {
  const auto members = allowed.members();
  return members[rng.below(members.size())];
}

void check_pin(const TorusGraph& t, const ConstraintGraph& g, const std::optional<Pin>& pinned) {
  if (!pinned) return;
  if (pinned->vertex >= t.num_vertices()) throw Error(ErrorCode::OutOfRange, "pinned vertex outside torus");
  if (pinned->color >= g.num_colors()) throw Error(ErrorCode::OutOfRange, "pinned color outside H");
}

}  // namespace

Coloring pure_coloring(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, const MaximalPair& pair,
                       Rng& rng, std::optional<Pin> pinned) {
  check_pin(t, g, pinned);
  if (pair.a.empty() || pair.b.empty() || !all_adjacent(g, pair.a, pair.b))
    throw Error(ErrorCode::Config, "pure coloring needs nonempty sets with A ~ B");
  const auto weights = w.as_doubles();
  Coloring f(t.num_vertices());
  for (std::size_t x = 0; x < f.size(); ++x)
    f[x] = draw_weighted(t.is_even(Vertex(x)) ? pair.a : pair.b, weights, rng);
  if (pinned) {
    const Vertex y = pinned->vertex;
    const ColorSet own = t.is_even(y) ? pair.a : pair.b;
    const ColorSet other = t.is_even(y) ? pair.b : pair.a;
    f[y] = pinned->color;
    if (!own.contains(pinned->color)) {
      const ColorSet allowed = other & g.neighbors(pinned->color);
      if (allowed.empty())
        throw Error(ErrorCode::NoValidInitial, "pinned color " + g.label(pinned->color) + " has no pure extension");
      for (Vertex z : t.neighbors(y)) f[z] = draw_weighted(allowed, weights, rng);
    }
  }
  return f;
}

std::optional<Coloring> greedy_coloring(const TorusGraph& t, const ConstraintGraph& g, Rng& rng,
                                        std::optional<Pin> pinned, int restarts) {
  check_pin(t, g, pinned);
  const std::size_t n = t.num_vertices();
  std::vector<Vertex> order(n);
  Coloring f(n);
  std::vector<bool> assigned(n);
  for (int attempt = 0; attempt < restarts; ++attempt) {
    std::iota(order.begin(), order.end(), Vertex{0});
    for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    if (pinned) {
      auto it = std::find(order.begin(), order.end(), pinned->vertex);
      std::rotate(order.begin(), it, it + 1);
    }
    std::fill(assigned.begin(), assigned.end(), false);
    bool ok = true;
    for (Vertex v : order) {
      ColorSet allowed = g.all();
      for (Vertex u : t.neighbors(v))
        if (assigned[u]) allowed = allowed & g.neighbors(f[u]);
      if (pinned && v == pinned->vertex) {
        if (!allowed.contains(pinned->color)) {
          ok = false;
          break;
        }
        f[v] = pinned->color;
      } else {
        if (allowed.empty()) {
          ok = false;
          break;
        }
        f[v] = draw_uniform(allowed, rng);
      }
      assigned[v] = true;
    }
    if (ok) return f;
  }
  return std::nullopt;
}

StepInfo glauber_step(const TorusGraph& t, const ConstraintGraph& g, const std::vector<double>& weights,
                      Coloring& f, Rng& rng, std::optional<Vertex> pinned) {
  const std::size_t n = t.num_vertices();
  StepInfo info;
  if (pinned) {
    if (n == 1) return {*pinned, 1, false};
    Vertex v = static_cast<Vertex>(rng.below(n - 1));
    info.vertex = v >= *pinned ? v + 1 : v;
  } else {
    info.vertex = static_cast<Vertex>(rng.below(n));
  }
  ColorSet allowed = g.all();
  for (Vertex u : t.neighbors(info.vertex)) allowed = allowed & g.neighbors(f[u]);
  info.allowed = allowed.size();
  const Color c = draw_weighted(allowed, weights, rng);
  info.changed = c != f[info.vertex];
  f[info.vertex] = c;
  return info;
}

ChainStats run_chain(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, const ChainConfig& cfg,
                     const InitialState& initial, const std::function<void(const ChainSample&)>& emit) {
  cfg.validate();
  check_pin(t, g, cfg.pinned);
  if (w.size() != g.num_colors()) throw Error(ErrorCode::Config, "weight count does not match color count");
  Rng rng(cfg.seed);
  ChainStats stats;
  stats.initializer = initial.kind;
  Coloring f;
  switch (initial.kind) {
    case InitialState::Kind::Given:
      f = initial.coloring;
      if (!is_valid(t, g, f)) throw Error(ErrorCode::InvalidColoring, "initial coloring is not valid");
      if (cfg.pinned && f[cfg.pinned->vertex] != cfg.pinned->color)
        throw Error(ErrorCode::Config, "initial coloring disagrees with the pinned color");
      break;
    case InitialState::Kind::Pure:
      if (!initial.pair) throw Error(ErrorCode::Config, "pure initializer needs a pair");
      f = pure_coloring(t, g, w, *initial.pair, rng, cfg.pinned);
      break;
    case InitialState::Kind::UniformGreedy: {
      auto greedy = greedy_coloring(t, g, rng, cfg.pinned);
      if (greedy) {
        f = std::move(*greedy);
        break;
      }
      stats.used_fallback = true;
      const auto extremal = eta_and_maximal_pairs(g, w);
      bool found = false;
      for (const auto& pair : extremal.pairs) {
        try {
          f = pure_coloring(t, g, w, pair, rng, cfg.pinned);
          found = is_valid(t, g, f);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::NoValidInitial) throw;
        }
        if (found) break;
      }
      if (!found) throw Error(ErrorCode::NoValidInitial, "no valid initial coloring found");
      break;
    }
  }
  stats.initial = f;

  const auto weights = w.as_doubles();
  const std::optional<Vertex> pinned_vertex =
      cfg.pinned ? std::optional<Vertex>(cfg.pinned->vertex) : std::nullopt;
  for (std::uint64_t s = 1; s <= cfg.steps; ++s) {
    const auto info = glauber_step(t, g, weights, f, rng, pinned_vertex);
    stats.changed += info.changed;
    stats.forced += info.allowed == 1;
    if (s > cfg.burn_in && (s - cfg.burn_in) % cfg.thin == 0) {
      ++stats.emitted;
      if (emit) emit({s, f});
    }
  }
  stats.steps = cfg.steps;
  return stats;
}

IdealEdgeDetector::IdealEdgeDetector(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w)
    : IdealEdgeDetector(t, eta_and_maximal_pairs(g, w)) {}

IdealEdgeDetector::IdealEdgeDetector(const TorusGraph& t, const ExtremalStructure& extremal)
    : t_(t), extremal_(extremal) {
  for (std::size_t i = 0; i < extremal_.pairs.size(); ++i) index_of_a_[extremal_.pairs[i].a.bits()] = i;
}

std::vector<ColorSet> IdealEdgeDetector::palettes(const Coloring& f) const {
  std::vector<ColorSet> out(t_.num_vertices());
  for (std::size_t v = 0; v < out.size(); ++v)
    for (Vertex u : t_.neighbors(Vertex(v))) out[v].insert(f[u]);
  return out;
}

std::optional<std::size_t> IdealEdgeDetector::pair_at(const std::vector<ColorSet>& palettes, const Edge& e) const {
  auto it = index_of_a_.find(palettes[e.v].bits());
  if (it == index_of_a_.end()) return std::nullopt;
  if (extremal_.pairs[it->second].b != palettes[e.u]) return std::nullopt;
  return it->second;
}

std::optional<MaximalPair> IdealEdgeDetector::at(const Coloring& f, const Edge& e) const {
  if (e.u >= t_.num_vertices() || e.v >= t_.num_vertices() || !t_.is_even(e.u) || !t_.adjacent(e.u, e.v))
    throw Error(ErrorCode::OutOfRange, "ideal-edge query needs an edge uv with u even");
  const auto idx = pair_at(palettes(f), e);
  if (!idx) return std::nullopt;
  return extremal_.pairs[*idx];
}

double IdealEdgeDetector::not_ideal_fraction(const Coloring& f) const {
  const auto pal = palettes(f);
  std::size_t bad = 0, total = 0;
  for (std::size_t u = 0; u < t_.num_vertices(); ++u) {
    if (!t_.is_even(Vertex(u))) continue;
    for (Vertex v : t_.neighbors(Vertex(u))) {
      ++total;
      bad += !pair_at(pal, {Vertex(u), v}).has_value();
    }
  }
  return static_cast<double>(bad) / static_cast<double>(total);
}

std::optional<MaximalPair> is_ideal_edge(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w,
                                         const Coloring& f, const Edge& e) {
  return IdealEdgeDetector(t, g, w).at(f, e);
}

std::string PhaseLabel::describe(const ConstraintGraph& g) const {
  if (!pure) return "exceptional";
  return "pure(" + g.format(pair.a) + "," + g.format(pair.b) + ")";
}

PhaseLabel classify(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, const Coloring& f,
                    const ClassifyThresholds& thresholds) {
  return classify(t, IdealEdgeDetector(t, g, w), w, f, thresholds);
}

PhaseLabel classify(const TorusGraph& t, const IdealEdgeDetector& detector, const WeightSet& w, const Coloring& f,
                    const ClassifyThresholds& thresholds) {
  thresholds.validate();
  const std::size_t n = t.num_vertices();
  if (f.size() != n) throw Error(ErrorCode::InvalidColoring, "coloring size does not match torus");
  const auto pal = detector.palettes(f);

  std::vector<Vertex> parent(n);
  std::iota(parent.begin(), parent.end(), Vertex{0});
  auto find = [&](Vertex x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::vector<std::pair<Edge, std::size_t>> ideal;
  for (std::size_t u = 0; u < n; ++u) {
    if (!t.is_even(Vertex(u))) continue;
    for (Vertex v : t.neighbors(Vertex(u))) {
      const Edge e{Vertex(u), v};
      if (auto idx = detector.pair_at(pal, e)) {
        ideal.emplace_back(e, *idx);
        const Vertex a = find(e.u), b = find(e.v);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
    }
  }

  PhaseLabel label;
  label.ideal_fraction = ratio(static_cast<unsigned long>(ideal.size()), static_cast<unsigned long>(t.num_edges()));
  label.ideal_fraction.canonicalize();

  std::vector<std::size_t> size(n, 0);
  for (std::size_t x = 0; x < n; ++x) ++size[find(Vertex(x))];
  Vertex giant = 0;
  for (std::size_t x = 0; x < n; ++x)
    if (size[x] > size[giant]) giant = Vertex(x);
  label.giant_size = size[giant];

  std::optional<std::size_t> pair_index;
  bool agree = true;
  for (const auto& [e, idx] : ideal) {
    if (find(e.u) != giant) continue;
    if (!pair_index) pair_index = idx;
    else if (*pair_index != idx) agree = false;
  }
  const double cap = thresholds.defect_cap * static_cast<double>(n);
  if (!pair_index || !agree || static_cast<double>(label.giant_size) < static_cast<double>(n) - cap) return label;

  const MaximalPair pair = detector.extremal().pairs[*pair_index];
  std::vector<std::size_t> count_e(w.size(), 0), count_o(w.size(), 0);
  for (std::size_t x = 0; x < n; ++x) {
    const bool even = t.is_even(Vertex(x));
    (even ? count_e : count_o)[f[x]]++;
    if (even && !pair.a.contains(f[x])) label.defect_e.push_back(Vertex(x));
    if (!even && !pair.b.contains(f[x])) label.defect_o.push_back(Vertex(x));
  }
  if (static_cast<double>(label.defect_e.size() + label.defect_o.size()) > cap) {
    label.defect_e.clear();
    label.defect_o.clear();
    return label;
  }
  label.pure = true;
  label.pair = pair;
  label.balanced = true;
  const double half = static_cast<double>(n) / 2.0;
  auto check_side = [&](ColorSet side, const std::vector<std::size_t>& counts, bool even) {
    const Rational total = subset_weight(w, side);
    for (Color k : side.members()) {
      const double expected = Rational(w[k] / total).get_d();
      const double observed = static_cast<double>(counts[k]) / half;
      const bool within = std::abs(observed - expected) <= thresholds.balance_tol * expected;
      label.balanced = label.balanced && within;
      label.balance.push_back({k, even, observed, expected, within});
    }
  };
  check_side(pair.a, count_e, true);
  check_side(pair.b, count_o, false);
  return label;
}

Coloring parity_swapped(const TorusGraph& t, const Coloring& f) {
  Coloring out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[t.parity_swap(Vertex(x))] = f[x];
  return out;
}

Coloring recolored(const Coloring& f, const Permutation& phi) {
  Coloring out(f.size());
  for (std::size_t x = 0; x < f.size(); ++x) out[x] = phi.at(f[x]);
  return out;
}

double batch_means_stderr(const std::vector<double>& series, std::size_t batches) {
  const std::size_t b = std::min(batches, series.size() / 2);
  if (b < 2) return std::numeric_limits<double>::infinity();
  const std::size_t len = series.size() / b;
  const std::size_t offset = series.size() - b * len;
  std::vector<double> means(b, 0.0);
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = 0; j < len; ++j) means[i] += series[offset + i * len + j];
    means[i] /= static_cast<double>(len);
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / static_cast<double>(b);
  double var = 0;
  for (double m : means) var += (m - mean) * (m - mean);
  var /= static_cast<double>(b - 1);
  return std::sqrt(var / static_cast<double>(b));
}

EpsilonEstimate epsilon_estimate(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w,
                                 const ChainConfig& cfg, EpsilonMode mode, std::optional<Edge> edge,
                                 const InitialState& initial) {
  const IdealEdgeDetector detector(t, g, w);
  Edge target = edge.value_or(t.edges().front());
  if (mode == EpsilonMode::SingleEdge && (!t.is_even(target.u) || !t.adjacent(target.u, target.v)))
    throw Error(ErrorCode::OutOfRange, "epsilon edge must be an edge uv with u even");
  std::vector<double> series;
  run_chain(t, g, w, cfg, initial, [&](const ChainSample& s) {
    if (mode == EpsilonMode::AllEdges) {
      series.push_back(detector.not_ideal_fraction(s.state));
    } else {
      series.push_back(detector.pair_at(detector.palettes(s.state), target) ? 0.0 : 1.0);
    }
  });
  EpsilonEstimate out;
  out.samples = series.size();
  out.p_not_ideal = std::accumulate(series.begin(), series.end(), 0.0) / static_cast<double>(series.size());
  out.std_error = batch_means_stderr(series);
  return out;
}

Rational exact_not_ideal_probability(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w,
                                     std::optional<Edge> edge, const CountBudget& budget) {
  const IdealEdgeDetector detector(t, g, w);
  if (edge && (!t.is_even(edge->u) || !t.adjacent(edge->u, edge->v)))
    throw Error(ErrorCode::OutOfRange, "edge must be an edge uv with u even");
  const auto edges = t.edges();
  const auto scaled = w.scaled();
  BigInt z = 0, bad = 0;
  for_each_coloring(t, g, {}, budget, [&](const Coloring& f) {
    BigInt weight = 1;
    for (Color c : f) weight *= scaled[c];
    const auto pal = detector.palettes(f);
    unsigned long count = 0;
    if (edge) {
      count = detector.pair_at(pal, *edge) ? 0 : 1;
    } else {
      for (const auto& e : edges) count += !detector.pair_at(pal, e).has_value();
    }
    z += weight;
    bad += weight * count;
  });
  if (sgn(z) == 0) throw Error(ErrorCode::ZeroDenominator, "no valid colorings");
  Rational out(bad, z * (edge ? 1ul : static_cast<unsigned long>(edges.size())));
  out.canonicalize();
  return out;
}

std::vector<ChainSummary> run_chains(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w,
                                     const ChainConfig& cfg, std::size_t chains, const InitialState& initial,
                                     const ClassifyThresholds& thresholds, unsigned threads) {
  cfg.validate();
  thresholds.validate();
  const IdealEdgeDetector detector(t, g, w);
  std::vector<ChainSummary> out(chains);
  auto run_one = [&](std::size_t i) {
    ChainConfig local = cfg;
    local.seed = cfg.seed ^ splitmix64(i);
    ChainSummary& s = out[i];
    s.index = i;
    s.seed = local.seed;
    std::vector<double> not_ideal;
    double ideal_sum = 0;
    std::uint64_t exceptional = 0;
    s.stats = run_chain(t, g, w, local, initial, [&](const ChainSample& sample) {
      const auto label = classify(t, detector, w, sample.state, thresholds);
      ideal_sum += label.ideal_fraction.get_d();
      not_ideal.push_back(1.0 - label.ideal_fraction.get_d());
      ++s.phase_counts[label.describe(g)];
      exceptional += !label.pure;
    });
    s.initial_phase = classify(t, detector, w, s.stats.initial, thresholds).describe(g);
    const double emitted = static_cast<double>(std::max<std::uint64_t>(1, s.stats.emitted));
    s.mean_ideal_fraction = ideal_sum / emitted;
    s.exceptional_fraction = static_cast<double>(exceptional) / emitted;
    s.epsilon.samples = not_ideal.size();
    s.epsilon.p_not_ideal = std::accumulate(not_ideal.begin(), not_ideal.end(), 0.0) / emitted;
    s.epsilon.std_error = batch_means_stderr(not_ideal);
  };
  const unsigned workers = std::min<unsigned>(worker_count(threads), static_cast<unsigned>(std::max<std::size_t>(1, chains)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < chains; ++i) run_one(i);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (unsigned id = 0; id < workers; ++id) {
      pool.emplace_back([&, id] {
        try {
          for (std::size_t i = id; i < chains; i += workers) run_one(i);
        } catch (...) {
          errors[id] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
  }
  return out;
}

nlohmann::json run_length_encode(const Coloring& f) {
  nlohmann::json runs = nlohmann::json::array();
  std::size_t i = 0;
  while (i < f.size()) {
    std::size_t j = i;
    while (j < f.size() && f[j] == f[i]) ++j;
    runs.push_back({f[i], j - i});
    i = j;
  }
  return runs;
}

nlohmann::json sample_record(const TorusGraph& t, const ConstraintGraph& g, std::uint64_t step, const Coloring& f,
                             const PhaseLabel& label, bool verbose) {
  std::vector<std::size_t> hist_e(g.num_colors(), 0), hist_o(g.num_colors(), 0);
  for (std::size_t x = 0; x < f.size(); ++x) (t.is_even(Vertex(x)) ? hist_e : hist_o)[f[x]]++;
  nlohmann::json rec = {{"step", step},
                        {"phase_label", label.describe(g)},
                        {"ideal_fraction", label.ideal_fraction.get_d()},
                        {"color_histogram_E", hist_e},
                        {"color_histogram_O", hist_o}};
  if (verbose) rec["coloring"] = run_length_encode(f);
  return rec;
}

}  // namespace torushom
