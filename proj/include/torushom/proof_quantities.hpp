#pragma once

#include <cstdint>
#include <vector>

#include "torushom/constraint_graph.hpp"
#include "torushom/rational.hpp"

namespace torushom {

/// (A_0, ..., A_{m-1}), one color set per column position.
using ColorSetTuple = std::vector<ColorSet>;

/// Number of (x_0, ..., x_{m-1}) with x_i in A_i forming a closed walk x_0 ~ x_1 ~ ... ~ x_{m-1} ~ x_0.
/// For m = 2 the column is a single edge and each adjacent pair is counted once.
BigInt cycle_count_g(const ConstraintGraph& g, const ColorSetTuple& tuple);

/// Componentwise n(A_i).
ColorSetTuple tuple_neighborhood(const ConstraintGraph& g, const ColorSetTuple& tuple);

/// (A, B, A, B, ...) of length m.
ColorSetTuple alternating_tuple(const MaximalPair& pair, int m);

struct IdentityCaps {
  int max_m = 8;
  /// Search nodes visited before giving up with CapExceeded.
  std::uint64_t max_nodes = 200'000'000;
  std::size_t max_witnesses = 32;
};

struct PairIdentity {
  MaximalPair pair;
  BigInt g_alt;
  BigInt g_neighborhood;
  bool holds = false;
};

struct GapWitness {
  ColorSetTuple tuple;
  BigInt g;
  BigInt g_neighborhood;
};

struct IdentityReport {
  BigInt eta;
  int m = 0;
  /// eta^m.
  BigInt target;
  std::vector<PairIdentity> identities;
  bool identities_hold = false;
  /// min of eta^m - g(T) g(nT) over tuples T that are not alternating maximal pairs.
  BigInt delta;
  /// Minimizers in lexicographic order, at most caps.max_witnesses.
  std::vector<GapWitness> witnesses;
  bool witnesses_truncated = false;
  /// Every evaluated tuple satisfied g(T) <= prod |A_i|.
  bool trivial_bound_holds = true;
  std::uint64_t tuples_evaluated = 0;
  std::uint64_t nodes_visited = 0;
};

/// Checks g(altAB) g(n altAB) = eta^m for every maximal pair and finds the gap delta by exact
/// branch and bound. Weights must be uniform (apply blowup() first for weighted instances).
/// Throws CapExceeded when m or the search size exceeds caps, Config for odd m.
IdentityReport verify_extremal_identities(const ConstraintGraph& g, const WeightSet& w, int m,
                                          const IdentityCaps& caps = {});

}  // namespace torushom
