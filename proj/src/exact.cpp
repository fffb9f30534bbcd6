#include "torushom/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "torushom/errors.hpp"

namespace torushom {

const char* to_string(CountMethod method) { return method == CountMethod::Brute ? "brute" : "transfer"; }

unsigned worker_count(unsigned requested) {
  unsigned n = requested;
  if (n == 0) {
    n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("TORUSHOM_THREADS")) {
      const long cap = std::strtol(env, nullptr, 10);
      if (cap > 0) n = std::min<unsigned>(n, static_cast<unsigned>(cap));
    }
  }
  return std::max(1u, n);
}

namespace {

std::string instance_name(const TorusGraph& t, const ConstraintGraph& g) {
  return t.descriptor() + ",h=" + std::to_string(g.num_colors());
}

void check_instance(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, const Restriction& r) {
  if (w.size() != g.num_colors()) throw Error(ErrorCode::Config, "weight count does not match color count");
  if (!r.empty() && r.size() != t.num_vertices())
    throw Error(ErrorCode::Config, "restriction must list one color set per torus vertex");
}

ColorSet allowed_at(const ConstraintGraph& g, const Restriction& r, std::size_t v) {
  return r.empty() ? g.all() : (r[v] & g.all());
}

/// Neighbors with a smaller index than v, i.e. those already colored in index order.
std::vector<std::vector<Vertex>> earlier_neighbors(const TorusGraph& t) {
  std::vector<std::vector<Vertex>> out(t.num_vertices());
  for (std::size_t v = 0; v < t.num_vertices(); ++v)
    for (Vertex u : t.neighbors(Vertex(v)))
      if (u < v) out[v].push_back(u);
  return out;
}

void check_brute_budget(const TorusGraph& t, const ConstraintGraph& g, const Restriction& r,
                        const CountBudget& budget) {
  double log_states = 0;
  for (std::size_t v = 0; v < t.num_vertices(); ++v) {
    const int choices = allowed_at(g, r, v).size();
    if (choices == 0) return;  // empty search space
    log_states += std::log(static_cast<double>(choices));
  }
  if (log_states > std::log(budget.brute_states) + 1e-9)
    throw Error(ErrorCode::BudgetExceeded, "brute-force state space exp(" + std::to_string(log_states) +
                                               ") exceeds budget " + std::to_string(budget.brute_states) + " on " +
                                               instance_name(t, g));
}

class BruteCounter {
 public:
  BruteCounter(const TorusGraph& t, const ConstraintGraph& g, const std::vector<BigInt>& weights,
               const Restriction& r)
      : t_(t), g_(g), weights_(weights), earlier_(earlier_neighbors(t)), f_(t.num_vertices(), 0) {
    for (std::size_t v = 0; v < t.num_vertices(); ++v) allowed_.push_back(allowed_at(g, r, v));
  }

  BigInt count(std::size_t v = 0) {
    if (v == f_.size()) return 1;
    ColorSet choices = allowed_[v];
    for (Vertex u : earlier_[v]) choices = choices & g_.neighbors(f_[u]);
    BigInt sum = 0;
    for (Color c : choices.members()) {
      f_[v] = c;
      sum += weights_[c] * count(v + 1);
    }
    return sum;
  }

 private:
  const TorusGraph& t_;
  const ConstraintGraph& g_;
  const std::vector<BigInt>& weights_;
  std::vector<std::vector<Vertex>> earlier_;
  std::vector<ColorSet> allowed_;
  Coloring f_;
};

}  // namespace

bool is_valid(const TorusGraph& t, const ConstraintGraph& g, const Coloring& f) {
  if (f.size() != t.num_vertices()) return false;
  for (Color c : f)
    if (c >= g.num_colors()) return false;
  for (std::size_t v = 0; v < f.size(); ++v)
    for (Vertex u : t.neighbors(Vertex(v)))
      if (!g.adjacent(f[v], f[u])) return false;
  return true;
}

Rational coloring_weight(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, const Coloring& f) {
  if (!is_valid(t, g, f)) throw Error(ErrorCode::InvalidColoring, "coloring violates the constraint graph");
  Rational product = 1;
  for (Color c : f) product *= w[c];
  return product;
}

Restriction pin_restriction(const TorusGraph& t, const ConstraintGraph& g, const std::vector<Pin>& pins) {
  Restriction r(t.num_vertices(), g.all());
  for (const auto& pin : pins) {
    if (pin.vertex >= t.num_vertices()) throw Error(ErrorCode::OutOfRange, "pinned vertex outside torus");
    if (pin.color >= g.num_colors()) throw Error(ErrorCode::OutOfRange, "pinned color outside H");
    r[pin.vertex] = r[pin.vertex] & ColorSet::single(pin.color);
  }
  return r;
}

void for_each_coloring(const TorusGraph& t, const ConstraintGraph& g, const Restriction& restriction,
                       const CountBudget& budget, const std::function<void(const Coloring&)>& visit) {
  if (!restriction.empty() && restriction.size() != t.num_vertices())
    throw Error(ErrorCode::Config, "restriction must list one color set per torus vertex");
  check_brute_budget(t, g, restriction, budget);

  const std::size_t n = t.num_vertices();
  const auto earlier = earlier_neighbors(t);
  Coloring f(n, 0);
  // remaining[v]: candidate colors for v not yet tried at the current prefix.
  std::vector<ColorSet> remaining(n);
  auto candidates = [&](std::size_t v) {
    ColorSet choices = allowed_at(g, restriction, v);
    for (Vertex u : earlier[v]) choices = choices & g.neighbors(f[u]);
    return choices;
  };

  std::size_t v = 0;
  remaining[0] = candidates(0);
  while (true) {
    if (remaining[v].empty()) {
      if (v == 0) return;
      --v;
      continue;
    }
    const Color c = remaining[v].first();
    remaining[v].erase(c);
    f[v] = c;
    if (v + 1 == n) {
      visit(f);
      continue;
    }
    ++v;
    remaining[v] = candidates(v);
  }
}

PartitionFunctionResult brute_force_partition_function(const TorusGraph& t, const ConstraintGraph& g,
                                                       const WeightSet& w, const CountBudget& budget,
                                                       const Restriction& restriction) {
  check_instance(t, g, w, restriction);
  check_brute_budget(t, g, restriction, budget);
  const auto scaled = w.scaled();
  BruteCounter counter(t, g, scaled, restriction);
  Rational z(counter.count(), power(w.common_denominator(), static_cast<unsigned long>(t.num_vertices())));
  z.canonicalize();
  return {z, CountMethod::Brute, instance_name(t, g)};
}

namespace {

/// Valid colorings of one layer (a copy of Z_m^(d-1), or a single vertex when d = 1).
struct LayerStates {
  std::size_t width = 0;
  std::vector<Color> colors;  // count * width
  std::vector<BigInt> weight;

  std::size_t count() const { return weight.size(); }
  const Color* state(std::size_t s) const { return colors.data() + s * width; }
};

LayerStates enumerate_layer(const TorusGraph& t, const ConstraintGraph& g, const std::vector<BigInt>& scaled) {
  LayerStates layer;
  layer.width = t.num_vertices() / static_cast<std::size_t>(t.side());
  std::vector<std::vector<Vertex>> earlier(layer.width);
  if (t.dim() >= 2) {
    const TorusGraph slice(t.side(), t.dim() - 1);
    earlier = earlier_neighbors(slice);
  }
  // Reuse the generic enumerator on the slice graph by recursion over positions.
  Coloring f(layer.width, 0);
  std::function<void(std::size_t, const BigInt&)> rec = [&](std::size_t p, const BigInt& weight) {
    if (p == layer.width) {
      layer.colors.insert(layer.colors.end(), f.begin(), f.end());
      layer.weight.push_back(weight);
      return;
    }
    ColorSet choices = g.all();
    for (Vertex q : earlier[p]) choices = choices & g.neighbors(f[q]);
    for (Color c : choices.members()) {
      f[p] = c;
      rec(p + 1, weight * scaled[c]);
    }
  };
  rec(0, BigInt(1));
  return layer;
}

bool compatible(const ConstraintGraph& g, const Color* a, const Color* b, std::size_t width) {
  for (std::size_t p = 0; p < width; ++p)
    if (!g.adjacent(a[p], b[p])) return false;
  return true;
}

}  // namespace

PartitionFunctionResult transfer_matrix_partition_function(const TorusGraph& t, const ConstraintGraph& g,
                                                           const WeightSet& w, const CountBudget& budget,
                                                           const Restriction& restriction) {
  check_instance(t, g, w, restriction);
  const std::size_t m = static_cast<std::size_t>(t.side());
  const std::size_t width = t.num_vertices() / m;
  const double log_layer = static_cast<double>(width) * std::log(static_cast<double>(g.num_colors()));
  if (log_layer > std::log(budget.transfer_states) + 1e-9)
    throw Error(ErrorCode::BudgetExceeded, "transfer layer space " + std::to_string(g.num_colors()) + "^" +
                                               std::to_string(width) + " exceeds budget " +
                                               std::to_string(budget.transfer_states) + " on " + instance_name(t, g));

  const auto scaled = w.scaled();
  const LayerStates layer = enumerate_layer(t, g, scaled);
  const std::size_t states = layer.count();

  // Global vertex of layer position p in layer j is p * m + j.
  std::vector<std::vector<std::uint32_t>> allowed(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t s = 0; s < states; ++s) {
      bool ok = true;
      if (!restriction.empty()) {
        const Color* st = layer.state(s);
        for (std::size_t p = 0; p < width && ok; ++p) ok = restriction[p * m + j].contains(st[p]);
      }
      if (ok) allowed[j].push_back(static_cast<std::uint32_t>(s));
    }
  }

  BigInt total = 0;
  if (m == 2) {
    // Layers 0 and 1 are joined by a single matching (the +1 and -1 steps coincide).
    for (auto s0 : allowed[0]) {
      BigInt row = 0;
      for (auto s1 : allowed[1])
        if (compatible(g, layer.state(s0), layer.state(s1), width)) row += layer.weight[s1];
      total += layer.weight[s0] * row;
    }
  } else {
    // Sparse compatibility lists; T(s, s') = weight(s') * compat(s, s').
    std::vector<std::vector<std::uint32_t>> compat(states);
    for (std::size_t s = 0; s < states; ++s)
      for (std::size_t s2 = 0; s2 < states; ++s2)
        if (compatible(g, layer.state(s), layer.state(s2), width)) compat[s].push_back(static_cast<std::uint32_t>(s2));
    std::vector<std::vector<bool>> in_layer(m, std::vector<bool>(states, false));
    for (std::size_t j = 0; j < m; ++j)
      for (auto s : allowed[j]) in_layer[j][s] = true;

    const unsigned workers = std::min<unsigned>(worker_count(budget.threads),
                                                static_cast<unsigned>(std::max<std::size_t>(1, allowed[0].size())));
    std::vector<BigInt> partial(workers, BigInt(0));
    auto work = [&](unsigned id) {
      std::vector<BigInt> cur(states), next(states);
      std::vector<bool> cur_on(states, false), next_on(states, false);
      std::vector<std::uint32_t> cur_list, next_list;
      for (std::size_t i = id; i < allowed[0].size(); i += workers) {
        const auto s0 = allowed[0][i];
        for (auto s : cur_list) cur_on[s] = false;
        cur_list.assign(1, s0);
        cur_on[s0] = true;
        cur[s0] = layer.weight[s0];
        for (std::size_t j = 1; j < m; ++j) {
          next_list.clear();
          for (auto s : cur_list) {
            for (auto s2 : compat[s]) {
              if (!in_layer[j][s2]) continue;
              if (!next_on[s2]) {
                next_on[s2] = true;
                next[s2] = cur[s];
                next_list.push_back(s2);
              } else {
                next[s2] += cur[s];
              }
            }
          }
          for (auto s2 : next_list) next[s2] *= layer.weight[s2];
          for (auto s : cur_list) cur_on[s] = false;
          std::swap(cur, next);
          std::swap(cur_on, next_on);
          std::swap(cur_list, next_list);
        }
        for (auto s : cur_list)
          if (compatible(g, layer.state(s), layer.state(s0), width)) partial[id] += cur[s];
      }
      for (auto s : cur_list) cur_on[s] = false;
    };
    if (workers == 1) {
      work(0);
    } else {
      std::vector<std::thread> pool;
      for (unsigned id = 0; id < workers; ++id) pool.emplace_back(work, id);
      for (auto& th : pool) th.join();
    }
    for (const auto& p : partial) total += p;
  }

  Rational z(total, power(w.common_denominator(), static_cast<unsigned long>(t.num_vertices())));
  z.canonicalize();
  return {z, CountMethod::Transfer, instance_name(t, g)};
}

PartitionFunctionResult partition_function(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w,
                                           const CountBudget& budget, const Restriction& restriction) {
  const std::size_t width = t.num_vertices() / static_cast<std::size_t>(t.side());
  const double log_layer = static_cast<double>(width) * std::log(static_cast<double>(g.num_colors()));
  if (log_layer <= std::log(budget.transfer_states)) return transfer_matrix_partition_function(t, g, w, budget, restriction);
  return brute_force_partition_function(t, g, w, budget, restriction);
}

Rational pure_coloring_weight(const TorusGraph& t, const WeightSet& w, const MaximalPair& pair) {
  return power(subset_weight(w, pair.a) * subset_weight(w, pair.b), static_cast<unsigned long>(t.num_vertices() / 2));
}

GlobalBoundsReport check_global_bounds(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w,
                                       const CountBudget& budget) {
  if (!w.is_uniform() || w[0] != 1)
    throw Error(ErrorCode::Config, "global bounds are stated for unweighted counts (all weights 1)");
  GlobalBoundsReport report;
  report.eta = eta_and_maximal_pairs(g, w).eta;
  report.count = partition_function(t, g, w, budget).z.get_num();

  const unsigned long n = static_cast<unsigned long>(t.num_vertices());
  const unsigned long deg = static_cast<unsigned long>(t.degree());
  const BigInt eta = report.eta.get_num();
  const BigInt lower = power(eta, n / 2);
  report.lower_holds = report.count >= lower;
  // count <= eta^(n/2) 2^(n/(2 deg))  <=>  count^(2 deg) <= eta^(n deg) 2^n
  report.upper_holds = power(report.count, 2 * deg) <= power(eta, n * deg) * power(BigInt(2), n);

  const double log_count = log_of(report.count);
  const double log_lower = log_of(lower);
  const double log_upper = log_lower + static_cast<double>(n) / (2.0 * static_cast<double>(deg)) * std::log(2.0);
  report.lower_slack = std::exp(log_count - log_lower);
  report.upper_slack = std::exp(log_upper - log_count);
  return report;
}

std::vector<Rational> exact_occupation(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, Vertex x,
                                       std::optional<Pin> condition, const CountBudget& budget) {
  if (x >= t.num_vertices()) throw Error(ErrorCode::OutOfRange, "vertex outside torus");
  std::vector<Rational> joint;
  Rational total = 0;
  for (std::size_t k = 0; k < g.num_colors(); ++k) {
    std::vector<Pin> pins{{x, static_cast<Color>(k)}};
    if (condition) pins.push_back(*condition);
    joint.push_back(partition_function(t, g, w, budget, pin_restriction(t, g, pins)).z);
    total += joint.back();
  }
  if (sgn(total) == 0) {
    if (condition)
      throw Error(ErrorCode::ZeroConditioningEvent, "conditioning event f(" + t.format_vertex(condition->vertex) +
                                                        ")=" + g.label(condition->color) + " has probability 0");
    throw Error(ErrorCode::ZeroConditioningEvent, "no valid colorings");
  }
  for (auto& p : joint) p /= total;
  return joint;
}

Rational exact_marginal(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, Vertex x, Color k,
                        std::optional<Pin> condition, const CountBudget& budget) {
  if (k >= g.num_colors()) throw Error(ErrorCode::OutOfRange, "color outside H");
  if (x >= t.num_vertices()) throw Error(ErrorCode::OutOfRange, "vertex outside torus");
  std::vector<Pin> base;
  if (condition) base.push_back(*condition);
  const Rational denominator = partition_function(t, g, w, budget, pin_restriction(t, g, base)).z;
  if (sgn(denominator) == 0)
    throw Error(ErrorCode::ZeroConditioningEvent, condition ? "conditioning event has probability 0" : "no valid colorings");
  base.push_back({x, k});
  return partition_function(t, g, w, budget, pin_restriction(t, g, base)).z / denominator;
}

}  // namespace torushom
