#include "torushom/proof_quantities.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "torushom/errors.hpp"

namespace torushom {

namespace {

using u128 = unsigned __int128;
using i128 = __int128;

BigInt to_big(u128 value) {
  BigInt high = static_cast<unsigned long>(static_cast<std::uint64_t>(value >> 64));
  BigInt low = static_cast<unsigned long>(static_cast<std::uint64_t>(value));
  return (high << 64) + low;
}

BigInt to_big(i128 value) {
  if (value < 0) return -to_big(static_cast<u128>(-value));
  return to_big(static_cast<u128>(value));
}

u128 cycle_count_fast(const ConstraintGraph& g, const ColorSetTuple& tuple) {
  const std::size_t h = g.num_colors();
  for (ColorSet a : tuple)
    if (a.empty()) return 0;
  std::vector<u128> cur(h), next(h);
  u128 total = 0;
  for (Color x0 : tuple[0].members()) {
    std::fill(cur.begin(), cur.end(), 0);
    cur[x0] = 1;
    for (std::size_t i = 1; i < tuple.size(); ++i) {
      std::fill(next.begin(), next.end(), 0);
      for (Color c : tuple[i].members())
        for (Color b : (g.neighbors(c) & tuple[i - 1]).members()) next[c] += cur[b];
      std::swap(cur, next);
    }
    for (Color c : (tuple.back() & g.neighbors(x0)).members()) total += cur[c];
  }
  return total;
}

/// Ordered adjacent pairs in A x B.
std::uint64_t adjacent_pairs(const ConstraintGraph& g, ColorSet a, ColorSet b) {
  std::uint64_t count = 0;
  for (Color x : a.members()) count += static_cast<std::uint64_t>((g.neighbors(x) & b).size());
  return count;
}

struct Candidate {
  ColorSet a, b;
  /// e(A, B) e(n(A), n(B)), an upper bound on this position's contribution to g(T) g(nT).
  std::uint64_t bound;
};

class GapSearch {
 public:
  GapSearch(const ConstraintGraph& g, const ExtremalStructure& extremal, int m, i128 target,
            const IdentityCaps& caps, IdentityReport& report)
      : g_(g), extremal_(extremal), m_(m), target_(target), caps_(caps), report_(report) {
    const std::uint32_t subsets = 1u << g.num_colors();
    for (std::uint32_t a = 0; a < subsets; ++a) {
      for (std::uint32_t b = 0; b < subsets; ++b) {
        const ColorSet sa(a), sb(b);
        const std::uint64_t bound = adjacent_pairs(g, sa, sb) *
                                    adjacent_pairs(g, common_neighborhood(g, sa), common_neighborhood(g, sb));
        candidates_.push_back({sa, sb, bound});
        best_bound_ = std::max(best_bound_, bound);
      }
    }
    tuple_.resize(static_cast<std::size_t>(m));
    remaining_bound_.assign(static_cast<std::size_t>(m / 2) + 1, 1);
    for (int j = 1; j <= m / 2; ++j) remaining_bound_[j] = remaining_bound_[j - 1] * best_bound_;
  }

  /// Pass 1: the minimum gap, exploring large bounds first.
  i128 find_delta() {
    best_ = target_;  // the all-empty tuple always qualifies and has gap eta^m
    auto order = candidates_;
    std::stable_sort(order.begin(), order.end(), [](const Candidate& x, const Candidate& y) { return x.bound > y.bound; });
    descend_min(order, 0, 1);
    return best_;
  }

  /// Pass 2: lexicographic enumeration of tuples whose gap equals delta.
  void collect(i128 delta) {
    delta_ = delta;
    descend_collect(0, 1);
  }

 private:
  void visit() {
    if (++report_.nodes_visited > caps_.max_nodes)
      throw Error(ErrorCode::CapExceeded, "gap search exceeded " + std::to_string(caps_.max_nodes) + " nodes");
  }

  bool is_alternating_maximal() const {
    const MaximalPair first{tuple_[0], tuple_[1]};
    for (int i = 0; i < m_; i += 2)
      if (tuple_[i] != first.a || tuple_[i + 1] != first.b) return false;
    return extremal_.contains(first);
  }

  /// Returns the gap of the completed tuple, or nothing for excluded tuples.
  std::optional<i128> evaluate(u128& g_value, u128& gn_value) {
    if (is_alternating_maximal()) return std::nullopt;
    ++report_.tuples_evaluated;
    g_value = cycle_count_fast(g_, tuple_);
    gn_value = cycle_count_fast(g_, tuple_neighborhood(g_, tuple_));
    u128 trivial = 1;
    for (ColorSet a : tuple_) trivial *= static_cast<u128>(a.size());
    if (g_value > trivial) report_.trivial_bound_holds = false;
    return target_ - static_cast<i128>(g_value * gn_value);
  }

  void descend_min(const std::vector<Candidate>& order, int position, u128 partial) {
    if (position == m_ / 2) {
      u128 gv = 0, gnv = 0;
      if (auto gap = evaluate(gv, gnv)) best_ = std::min(best_, *gap);
      return;
    }
    const u128 rest = remaining_bound_[m_ / 2 - position - 1];
    for (const auto& c : order) {
      visit();
      const u128 bound = partial * c.bound * rest;
      if (target_ - static_cast<i128>(bound) >= best_) break;  // sorted: nothing later can do better
      tuple_[2 * position] = c.a;
      tuple_[2 * position + 1] = c.b;
      descend_min(order, position + 1, partial * c.bound);
    }
  }

  void descend_collect(int position, u128 partial) {
    if (position == m_ / 2) {
      u128 gv = 0, gnv = 0;
      auto gap = evaluate(gv, gnv);
      if (!gap || *gap != delta_) return;
      if (report_.witnesses.size() < caps_.max_witnesses)
        report_.witnesses.push_back({tuple_, to_big(gv), to_big(gnv)});
      else
        report_.witnesses_truncated = true;
      return;
    }
    const u128 rest = remaining_bound_[m_ / 2 - position - 1];
    for (const auto& c : candidates_) {
      visit();
      if (target_ - static_cast<i128>(partial * c.bound * rest) > delta_) continue;
      tuple_[2 * position] = c.a;
      tuple_[2 * position + 1] = c.b;
      descend_collect(position + 1, partial * c.bound);
      if (report_.witnesses_truncated) return;
    }
  }

  const ConstraintGraph& g_;
  const ExtremalStructure& extremal_;
  int m_;
  i128 target_;
  const IdentityCaps& caps_;
  IdentityReport& report_;
  std::vector<Candidate> candidates_;  // lexicographic by (a, b)
  std::uint64_t best_bound_ = 0;
  std::vector<u128> remaining_bound_;
  ColorSetTuple tuple_;
  i128 best_ = 0;
  i128 delta_ = 0;
};

}  // namespace

BigInt cycle_count_g(const ConstraintGraph& g, const ColorSetTuple& tuple) {
  if (tuple.empty()) throw Error(ErrorCode::Config, "tuple must be nonempty");
  for (ColorSet a : tuple)
    if (!a.subset_of(g.all())) throw Error(ErrorCode::OutOfRange, "tuple entry references colors outside H");
  BigInt total = 0;
  // Exact big-integer walk count; sizes here are small so this is a direct transcription.
  std::vector<BigInt> cur(g.num_colors()), next(g.num_colors());
  for (Color x0 : tuple[0].members()) {
    std::fill(cur.begin(), cur.end(), 0);
    cur[x0] = 1;
    for (std::size_t i = 1; i < tuple.size(); ++i) {
      std::fill(next.begin(), next.end(), 0);
      for (Color c : tuple[i].members())
        for (Color b : (g.neighbors(c) & tuple[i - 1]).members()) next[c] += cur[b];
      std::swap(cur, next);
    }
    for (Color c : (tuple.back() & g.neighbors(x0)).members()) total += cur[c];
  }
  return total;
}

ColorSetTuple tuple_neighborhood(const ConstraintGraph& g, const ColorSetTuple& tuple) {
  ColorSetTuple out;
  out.reserve(tuple.size());
  for (ColorSet a : tuple) out.push_back(common_neighborhood(g, a));
  return out;
}

ColorSetTuple alternating_tuple(const MaximalPair& pair, int m) {
  ColorSetTuple out;
  for (int i = 0; i < m; ++i) out.push_back(i % 2 == 0 ? pair.a : pair.b);
  return out;
}

IdentityReport verify_extremal_identities(const ConstraintGraph& g, const WeightSet& w, int m,
                                          const IdentityCaps& caps) {
  if (m < 2 || m % 2 != 0) throw Error(ErrorCode::Config, "m must be even and >= 2");
  if (m > caps.max_m) throw Error(ErrorCode::CapExceeded, "m=" + std::to_string(m) + " exceeds cap " + std::to_string(caps.max_m));
  if (!w.is_uniform())
    throw Error(ErrorCode::Config, "extremal identities are unweighted; pass the blow-up of a weighted instance");
  if (g.num_colors() > 10)
    throw Error(ErrorCode::CapExceeded, "gap search supports at most 10 colors, got " + std::to_string(g.num_colors()));
  // All intermediate products stay below h^(2m); keep them inside 127 bits.
  if (2.0 * m * std::log2(static_cast<double>(g.num_colors())) >= 126.0)
    throw Error(ErrorCode::CapExceeded, "tuple products too large for m=" + std::to_string(m));

  const auto extremal = eta_and_maximal_pairs(g, WeightSet::uniform(g.num_colors()));
  IdentityReport report;
  report.m = m;
  report.eta = extremal.eta.get_num();
  report.target = power(report.eta, static_cast<unsigned long>(m));

  report.identities_hold = true;
  for (const auto& pair : extremal.pairs) {
    const auto alt = alternating_tuple(pair, m);
    PairIdentity id{pair, cycle_count_g(g, alt), cycle_count_g(g, tuple_neighborhood(g, alt)), false};
    id.holds = id.g_alt * id.g_neighborhood == report.target;
    report.identities_hold = report.identities_hold && id.holds;
    report.identities.push_back(std::move(id));
  }

  i128 target = 0;
  for (unsigned long i = 0, e = report.eta.get_ui(); i < static_cast<unsigned long>(m); ++i)
    target = (i == 0 ? static_cast<i128>(e) : target * static_cast<i128>(e));
  GapSearch search(g, extremal, m, target, caps, report);
  const i128 delta = search.find_delta();
  report.delta = to_big(delta);
  search.collect(delta);
  return report;
}

}  // namespace torushom
