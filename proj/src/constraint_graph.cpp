#include "torushom/constraint_graph.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "torushom/errors.hpp"

namespace torushom {

std::vector<Color> ColorSet::members() const {
  std::vector<Color> out;
  for (std::uint32_t b = bits_; b != 0; b &= b - 1) out.push_back(static_cast<Color>(std::countr_zero(b)));
  return out;
}

ConstraintGraph::ConstraintGraph(std::size_t num_colors, const std::vector<std::pair<int, int>>& edges,
                                 std::vector<std::string> labels)
    : adjacency_(num_colors), labels_(std::move(labels)) {
  if (num_colors == 0) throw Error(ErrorCode::Config, "constraint graph needs at least one color");
  if (num_colors > kMaxColors)
    throw Error(ErrorCode::Config, "constraint graph has " + std::to_string(num_colors) +
                                       " colors; at most " + std::to_string(kMaxColors) + " supported");
  for (auto [i, j] : edges) {
    if (i < 0 || j < 0 || static_cast<std::size_t>(i) >= num_colors ||
        static_cast<std::size_t>(j) >= num_colors)
      throw Error(ErrorCode::Config, "edge (" + std::to_string(i) + "," + std::to_string(j) +
                                         ") references a color outside 0.." +
                                         std::to_string(num_colors - 1));
    adjacency_[i].insert(static_cast<Color>(j));
    adjacency_[j].insert(static_cast<Color>(i));
  }
  if (labels_.empty()) {
    for (std::size_t c = 0; c < num_colors; ++c) labels_.push_back(std::to_string(c));
  } else if (labels_.size() != num_colors) {
    throw Error(ErrorCode::Config, "label count does not match color count");
  }
}

bool ConstraintGraph::has_any_edge() const {
  return std::any_of(adjacency_.begin(), adjacency_.end(), [](ColorSet s) { return !s.empty(); });
}

std::vector<std::pair<int, int>> ConstraintGraph::edge_list() const {
  std::vector<std::pair<int, int>> out;
  for (std::size_t i = 0; i < num_colors(); ++i)
    for (std::size_t j = i; j < num_colors(); ++j)
      if (adjacent(static_cast<Color>(i), static_cast<Color>(j))) out.emplace_back(int(i), int(j));
  return out;
}

std::optional<Color> ConstraintGraph::find_label(std::string_view name) const {
  for (std::size_t c = 0; c < labels_.size(); ++c)
    if (labels_[c] == name) return static_cast<Color>(c);
  return std::nullopt;
}

Color ConstraintGraph::resolve_color(std::string_view token) const {
  if (auto c = find_label(token)) return *c;
  std::size_t value = 0;
  bool numeric = !token.empty();
  for (char ch : token) {
    if (ch < '0' || ch > '9') {
      numeric = false;
      break;
    }
    value = value * 10 + static_cast<std::size_t>(ch - '0');
  }
  if (!numeric || value >= num_colors())
    throw Error(ErrorCode::Config, "unknown color '" + std::string(token) + "'");
  return static_cast<Color>(value);
}

std::string ConstraintGraph::format(ColorSet s) const {
  std::string out = "{";
  bool first = true;
  for (Color c : s.members()) {
    if (!first) out += ",";
    out += labels_[c];
    first = false;
  }
  return out + "}";
}

ConstraintGraph ConstraintGraph::permuted(const std::vector<Color>& perm) const {
  std::vector<std::pair<int, int>> edges;
  for (auto [i, j] : edge_list()) edges.emplace_back(perm[i], perm[j]);
  std::vector<std::string> labels(num_colors());
  for (std::size_t c = 0; c < num_colors(); ++c) labels[perm[c]] = labels_[c];
  return ConstraintGraph(num_colors(), edges, std::move(labels));
}

WeightSet::WeightSet(std::vector<Rational> weights) : weights_(std::move(weights)) {
  for (auto& w : weights_) {
    w.canonicalize();
    if (sgn(w) <= 0) throw Error(ErrorCode::Config, "weights must be strictly positive, got " + to_string(w));
  }
}

WeightSet WeightSet::uniform(std::size_t num_colors) {
  return WeightSet(std::vector<Rational>(num_colors, Rational(1)));
}

bool WeightSet::is_uniform() const {
  return std::all_of(weights_.begin(), weights_.end(), [&](const Rational& w) { return w == weights_.front(); });
}

BigInt WeightSet::common_denominator() const {
  BigInt c = 1;
  for (const auto& w : weights_) c = lcm(c, BigInt(w.get_den()));
  return c;
}

std::vector<BigInt> WeightSet::scaled() const {
  BigInt c = common_denominator();
  std::vector<BigInt> out;
  out.reserve(weights_.size());
  for (const auto& w : weights_) out.push_back(BigInt(w.get_num() * (c / w.get_den())));
  return out;
}

std::vector<double> WeightSet::as_doubles() const {
  std::vector<double> out;
  for (const auto& w : weights_) out.push_back(w.get_d());
  return out;
}

WeightSet WeightSet::scaled_by(const Rational& factor) const {
  std::vector<Rational> out;
  for (const auto& w : weights_) out.push_back(w * factor);
  return WeightSet(std::move(out));
}

WeightSet WeightSet::permuted(const std::vector<Color>& perm) const {
  std::vector<Rational> out(weights_.size());
  for (std::size_t c = 0; c < weights_.size(); ++c) out[perm[c]] = weights_[c];
  return WeightSet(std::move(out));
}

bool ExtremalStructure::contains(const MaximalPair& p) const {
  return std::binary_search(pairs.begin(), pairs.end(), p);
}

bool all_adjacent(const ConstraintGraph& g, ColorSet a, ColorSet b) {
  for (Color x : a.members())
    if (!b.subset_of(g.neighbors(x))) return false;
  return true;
}

ColorSet common_neighborhood(const ConstraintGraph& g, ColorSet a) {
  ColorSet n = g.all();
  for (std::uint32_t bits = a.bits(); bits != 0; bits &= bits - 1)
    n = n & g.neighbors(static_cast<Color>(std::countr_zero(bits)));
  return n;
}

std::size_t nonadjacent_pair_count(const ConstraintGraph& g, ColorSet a, ColorSet b) {
  std::size_t count = 0;
  for (Color x : a.members()) count += static_cast<std::size_t>(b.without(g.neighbors(x)).size());
  return count;
}

Rational subset_weight(const WeightSet& w, ColorSet t) {
  Rational sum = 0;
  for (Color c : t.members()) sum += w[c];
  return sum;
}

namespace {

void check_weights(const ConstraintGraph& g, const WeightSet& w) {
  if (w.size() != g.num_colors())
    throw Error(ErrorCode::Config, "weight count " + std::to_string(w.size()) + " does not match " +
                                       std::to_string(g.num_colors()) + " colors");
}

}  // namespace

ExtremalStructure eta_and_maximal_pairs(const ConstraintGraph& g, const WeightSet& w) {
  check_weights(g, w);
  if (!g.has_any_edge()) throw Error(ErrorCode::EmptyConstraint, "constraint graph has no edges or loops");

  const std::size_t h = g.num_colors();
  const std::vector<BigInt> scaled = w.scaled();
  const BigInt scale = w.common_denominator();

  BigInt total = 0;
  for (const auto& s : scaled) total += s;
  const bool narrow = total.fits_ulong_p() && total.get_ui() < (1ul << 62);

  std::vector<std::uint64_t> small;
  if (narrow)
    for (const auto& s : scaled) small.push_back(s.get_ui());

  auto subset_sum_small = [&](std::uint32_t bits) {
    std::uint64_t sum = 0;
    for (; bits != 0; bits &= bits - 1) sum += small[std::countr_zero(bits)];
    return sum;
  };
  auto subset_sum_big = [&](std::uint32_t bits) {
    BigInt sum = 0;
    for (; bits != 0; bits &= bits - 1) sum += scaled[std::countr_zero(bits)];
    return sum;
  };

  std::vector<MaximalPair> best;
  unsigned __int128 best_small = 0;
  BigInt best_big = 0;
  const std::uint32_t limit = ColorSet::full(h).bits();
  for (std::uint32_t bits = 1; bits <= limit; ++bits) {
    const ColorSet a(bits);
    const ColorSet b = common_neighborhood(g, a);
    if (b.empty()) continue;
    int cmp = 0;
    if (narrow) {
      unsigned __int128 prod = static_cast<unsigned __int128>(subset_sum_small(a.bits())) * subset_sum_small(b.bits());
      cmp = prod < best_small ? -1 : (prod > best_small ? 1 : 0);
      if (cmp > 0) best_small = prod;
    } else {
      BigInt prod = subset_sum_big(a.bits()) * subset_sum_big(b.bits());
      const int c = mpz_cmp(prod.get_mpz_t(), best_big.get_mpz_t());
      cmp = c < 0 ? -1 : (c > 0 ? 1 : 0);
      if (cmp > 0) best_big = prod;
    }
    if (cmp > 0) best.clear();
    if (cmp >= 0) best.push_back({a, b});
    if (bits == limit) break;
  }

  ExtremalStructure out;
  if (narrow) {
    BigInt hi(static_cast<unsigned long>(best_small >> 64));
    BigInt lo(static_cast<unsigned long>(best_small & ~std::uint64_t{0}));
    best_big = (hi << 64) + lo;
  }
  out.eta = ratio(best_big, scale * scale);
  out.eta.canonicalize();

  for (const auto& p : best) {
    // A maximizer with B = n(A) must also satisfy A = n(B).
    if (common_neighborhood(g, p.b) != p.a)
      throw Error(ErrorCode::OracleMismatch, "maximal pair fails A = n(B): " + g.format(p.a));
  }
  std::sort(best.begin(), best.end());
  best.erase(std::unique(best.begin(), best.end()), best.end());
  out.pairs = std::move(best);
  return out;
}

std::vector<ColorSet> support_family(const ConstraintGraph& g, const WeightSet& w) {
  auto extremal = eta_and_maximal_pairs(g, w);
  std::vector<ColorSet> out;
  for (const auto& p : extremal.pairs) out.push_back(p.a);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Blowup blowup(const ConstraintGraph& g, const WeightSet& w) {
  check_weights(g, w);
  Blowup up;
  up.scale = w.common_denominator();
  const auto sizes = w.scaled();
  BigInt total = 0;
  for (const auto& s : sizes) total += s;
  if (total > static_cast<unsigned long>(kMaxColors))
    throw Error(ErrorCode::Config, "blow-up has " + total.get_str() + " vertices; at most " +
                                       std::to_string(kMaxColors) + " supported");

  std::vector<std::string> labels;
  up.blocks.resize(g.num_colors());
  Color next = 0;
  for (std::size_t k = 0; k < g.num_colors(); ++k) {
    const unsigned long count = sizes[k].get_ui();
    for (unsigned long i = 0; i < count; ++i) {
      up.block_of.push_back(static_cast<Color>(k));
      up.blocks[k].insert(next++);
      labels.push_back(g.label(static_cast<Color>(k)) + "." + std::to_string(i));
    }
  }
  std::vector<std::pair<int, int>> edges;
  for (std::size_t x = 0; x < up.block_of.size(); ++x)
    for (std::size_t y = x; y < up.block_of.size(); ++y)
      if (g.adjacent(up.block_of[x], up.block_of[y])) edges.emplace_back(int(x), int(y));
  up.graph = ConstraintGraph(up.block_of.size(), edges, std::move(labels));
  return up;
}

MaximalPair lift_pair(const Blowup& up, const MaximalPair& pair) {
  MaximalPair out;
  for (Color k : pair.a.members()) out.a = out.a | up.blocks[k];
  for (Color k : pair.b.members()) out.b = out.b | up.blocks[k];
  return out;
}

ColorSet apply(const Permutation& perm, ColorSet s) {
  ColorSet out;
  for (Color c : s.members()) out.insert(perm[c]);
  return out;
}

MaximalPair apply(const Permutation& perm, const MaximalPair& p) { return {apply(perm, p.a), apply(perm, p.b)}; }

namespace {

/// Enumerates weight-, loop- and adjacency-preserving bijections phi with
/// cls_src[c] == cls_dst[phi(c)]. `visit` returns false to stop the search.
void search_automorphisms(const ConstraintGraph& g, const WeightSet& w, const std::vector<int>& cls_src,
                          const std::vector<int>& cls_dst, const std::function<bool(const Permutation&)>& visit) {
  const std::size_t h = g.num_colors();
  Permutation phi(h);
  std::vector<bool> used(h, false);
  bool stop = false;

  std::function<void(std::size_t)> extend = [&](std::size_t c) {
    if (stop) return;
    if (c == h) {
      if (!visit(phi)) stop = true;
      return;
    }
    const Color src = static_cast<Color>(c);
    for (std::size_t u = 0; u < h && !stop; ++u) {
      const Color dst = static_cast<Color>(u);
      if (used[u] || cls_src[c] != cls_dst[u] || w[src] != w[dst] ||
          g.neighbors(src).size() != g.neighbors(dst).size() || g.has_loop(src) != g.has_loop(dst))
        continue;
      bool ok = true;
      for (std::size_t prev = 0; prev < c && ok; ++prev)
        ok = g.adjacent(src, static_cast<Color>(prev)) == g.adjacent(dst, phi[prev]);
      if (!ok) continue;
      phi[c] = dst;
      used[u] = true;
      extend(c + 1);
      used[u] = false;
    }
  };
  extend(0);
}

}  // namespace

std::optional<Permutation> find_automorphism(const ConstraintGraph& g, const WeightSet& w,
                                             const MaximalPair& from, const MaximalPair& to) {
  check_weights(g, w);
  const std::size_t h = g.num_colors();
  std::vector<int> src(h), dst(h);
  for (std::size_t c = 0; c < h; ++c) {
    const Color col = static_cast<Color>(c);
    src[c] = int(from.a.contains(col)) + 2 * int(from.b.contains(col));
    dst[c] = int(to.a.contains(col)) + 2 * int(to.b.contains(col));
  }
  std::optional<Permutation> found;
  search_automorphisms(g, w, src, dst, [&](const Permutation& p) {
    found = p;
    return false;
  });
  return found;
}

std::vector<Permutation> automorphisms(const ConstraintGraph& g, const WeightSet& w, std::size_t limit) {
  check_weights(g, w);
  std::vector<int> zero(g.num_colors(), 0);
  std::vector<Permutation> out;
  search_automorphisms(g, w, zero, zero, [&](const Permutation& p) {
    out.push_back(p);
    return out.size() < limit;
  });
  return out;
}

const char* to_string(Equipartition kind) {
  switch (kind) {
    case Equipartition::Singleton: return "singleton";
    case Equipartition::TwoClassSwap: return "two-class";
    case Equipartition::Transitive: return "transitive";
    case Equipartition::Unknown: return "unknown";
  }
  return "unknown";
}

Equipartition classify_equipartition(const ConstraintGraph& g, const WeightSet& w,
                                     const ExtremalStructure& extremal) {
  const auto& pairs = extremal.pairs;
  if (pairs.size() == 1 && pairs[0].a == pairs[0].b) return Equipartition::Singleton;
  if (pairs.size() == 2 && pairs[0].a != pairs[0].b && pairs[1] == pairs[0].swapped())
    return Equipartition::TwoClassSwap;
  if (pairs.empty()) return Equipartition::Unknown;
  // The side swap of the torus contributes (A,B) -> (B,A) on top of the color automorphisms.
  for (std::size_t i = 1; i < pairs.size(); ++i)
    if (!find_automorphism(g, w, pairs[0], pairs[i]) && !find_automorphism(g, w, pairs[0], pairs[i].swapped()))
      return Equipartition::Unknown;
  return Equipartition::Transitive;
}

}  // namespace torushom
