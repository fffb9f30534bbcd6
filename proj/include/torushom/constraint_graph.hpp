#pragma once

#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "torushom/rational.hpp"

namespace torushom {

using Color = std::uint8_t;

/// Largest constraint graph the exhaustive subset scans accept.
inline constexpr std::size_t kMaxColors = 24;

/// Subset of the colors {0..h-1}, stored as a bitmask.
class ColorSet {
 public:
  constexpr ColorSet() = default;
  constexpr explicit ColorSet(std::uint32_t bits) : bits_(bits) {}

  static constexpr ColorSet full(std::size_t num_colors) {
    return ColorSet(num_colors >= 32 ? ~0u : ((1u << num_colors) - 1u));
  }
  static constexpr ColorSet single(Color c) { return ColorSet(1u << c); }
  static ColorSet of(std::initializer_list<int> colors) {
    ColorSet s;
    for (int c : colors) s.insert(static_cast<Color>(c));
    return s;
  }

  constexpr std::uint32_t bits() const { return bits_; }
  constexpr bool contains(Color c) const { return (bits_ >> c) & 1u; }
  constexpr void insert(Color c) { bits_ |= 1u << c; }
  constexpr void erase(Color c) { bits_ &= ~(1u << c); }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr int size() const { return std::popcount(bits_); }
  constexpr bool subset_of(ColorSet other) const { return (bits_ & ~other.bits_) == 0; }

  /// Lowest member; undefined on the empty set.
  constexpr Color first() const { return static_cast<Color>(std::countr_zero(bits_)); }

  std::vector<Color> members() const;

  constexpr ColorSet operator&(ColorSet o) const { return ColorSet(bits_ & o.bits_); }
  constexpr ColorSet operator|(ColorSet o) const { return ColorSet(bits_ | o.bits_); }
  constexpr ColorSet without(ColorSet o) const { return ColorSet(bits_ & ~o.bits_); }

  constexpr auto operator<=>(const ColorSet&) const = default;

 private:
  std::uint32_t bits_ = 0;
};

/// Finite graph H on colors 0..h-1; loops allowed. Immutable once built.
class ConstraintGraph {
 public:
  ConstraintGraph() = default;
  /// Edges (i, j) with i == j declare loops. Throws Error(Config) on bad indices.
  ConstraintGraph(std::size_t num_colors, const std::vector<std::pair<int, int>>& edges,
                  std::vector<std::string> labels = {});

  std::size_t num_colors() const { return adjacency_.size(); }
  ColorSet all() const { return ColorSet::full(num_colors()); }

  bool adjacent(Color a, Color b) const { return adjacency_[a].contains(b); }
  bool has_loop(Color c) const { return adjacency_[c].contains(c); }
  /// Colors adjacent to c (including c itself when looped).
  ColorSet neighbors(Color c) const { return adjacency_[c]; }

  bool has_any_edge() const;
  std::vector<std::pair<int, int>> edge_list() const;

  const std::string& label(Color c) const { return labels_[c]; }
  const std::vector<std::string>& labels() const { return labels_; }
  std::optional<Color> find_label(std::string_view name) const;
  /// Resolves a color given by label, falling back to a numeric index.
  Color resolve_color(std::string_view token) const;

  std::string format(ColorSet s) const;

  /// Graph with the same edges whose colors are renamed through perm (perm[c] = new name).
  ConstraintGraph permuted(const std::vector<Color>& perm) const;

 private:
  std::vector<ColorSet> adjacency_;
  std::vector<std::string> labels_;
};

/// Positive rational weight per color.
class WeightSet {
 public:
  WeightSet() = default;
  /// Throws Error(Config) if any weight is not strictly positive.
  explicit WeightSet(std::vector<Rational> weights);
  static WeightSet uniform(std::size_t num_colors);

  std::size_t size() const { return weights_.size(); }
  const Rational& operator[](Color c) const { return weights_[c]; }
  const std::vector<Rational>& values() const { return weights_; }
  bool is_uniform() const;

  /// Smallest positive integer C with C * lambda_k integral for every k.
  BigInt common_denominator() const;
  /// C * lambda_k, all integral.
  std::vector<BigInt> scaled() const;

  std::vector<double> as_doubles() const;
  WeightSet scaled_by(const Rational& factor) const;
  WeightSet permuted(const std::vector<Color>& perm) const;

 private:
  std::vector<Rational> weights_;
};

struct MaximalPair {
  ColorSet a;
  ColorSet b;

  MaximalPair swapped() const { return {b, a}; }
  auto operator<=>(const MaximalPair&) const = default;
};

struct ExtremalStructure {
  Rational eta;
  /// Ordered maximizing pairs, sorted by (a, b) bitmask.
  std::vector<MaximalPair> pairs;

  bool contains(const MaximalPair& p) const;
};

bool all_adjacent(const ConstraintGraph& g, ColorSet a, ColorSet b);
/// n(A); n(empty set) is the full color set.
ColorSet common_neighborhood(const ConstraintGraph& g, ColorSet a);
std::size_t nonadjacent_pair_count(const ConstraintGraph& g, ColorSet a, ColorSet b);
Rational subset_weight(const WeightSet& w, ColorSet t);

/// eta_Lambda(H) and M_Lambda(H). Scans every nonempty A with B = n(A).
/// Throws EmptyConstraint if H has no edge or loop, Config if h > kMaxColors.
ExtremalStructure eta_and_maximal_pairs(const ConstraintGraph& g, const WeightSet& w);

/// First coordinates of M_Lambda(H), sorted and deduplicated.
std::vector<ColorSet> support_family(const ConstraintGraph& g, const WeightSet& w);

struct Blowup {
  ConstraintGraph graph;
  BigInt scale;
  std::vector<Color> block_of;
  std::vector<ColorSet> blocks;
};

/// H(Lambda): color k becomes C*lambda_k mutually interchangeable clones.
/// Throws Config if the blow-up would exceed kMaxColors vertices.
Blowup blowup(const ConstraintGraph& g, const WeightSet& w);

/// (A, B) -> (union of S_k over A, union of S_l over B).
MaximalPair lift_pair(const Blowup& up, const MaximalPair& pair);

using Permutation = std::vector<Color>;

ColorSet apply(const Permutation& perm, ColorSet s);
MaximalPair apply(const Permutation& perm, const MaximalPair& p);

/// Weight-preserving automorphism phi with phi(from.a) = to.a and phi(from.b) = to.b.
std::optional<Permutation> find_automorphism(const ConstraintGraph& g, const WeightSet& w,
                                             const MaximalPair& from, const MaximalPair& to);

/// Weight-preserving automorphisms of H, in lexicographic order, at most `limit` of them.
std::vector<Permutation> automorphisms(const ConstraintGraph& g, const WeightSet& w,
                                       std::size_t limit = 100000);

enum class Equipartition { Singleton, TwoClassSwap, Transitive, Unknown };

const char* to_string(Equipartition kind);

/// Which sufficient condition for an approximate equipartition M_Lambda(H) satisfies.
/// Checked in the order singleton, two-class swap, transitive.
Equipartition classify_equipartition(const ConstraintGraph& g, const WeightSet& w,
                                     const ExtremalStructure& extremal);

}  // namespace torushom
