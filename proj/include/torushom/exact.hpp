#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "torushom/constraint_graph.hpp"
#include "torushom/rational.hpp"
#include "torushom/torus.hpp"

namespace torushom {

/// One color per torus vertex.
using Coloring = std::vector<Color>;

/// Allowed colors per vertex; an empty vector means no restriction.
using Restriction = std::vector<ColorSet>;

struct Pin {
  Vertex vertex;
  Color color;
};

/// Size limits for the exact counters. Exceeding one is a hard error, never a truncation.
struct CountBudget {
  /// Upper limit on the raw product of per-vertex choices (h^(m^d) when unrestricted).
  double brute_states = 1e8;
  /// Upper limit on h^(m^(d-1)), the raw layer state space.
  double transfer_states = 1e7;
  /// Worker threads for the transfer products; 0 picks the default (see worker_count()).
  unsigned threads = 0;
};

enum class CountMethod { Brute, Transfer };

const char* to_string(CountMethod method);

struct PartitionFunctionResult {
  Rational z;
  CountMethod method;
  std::string instance;
};

/// TORUSHOM_THREADS if set, otherwise hardware concurrency; always >= 1.
unsigned worker_count(unsigned requested = 0);

bool is_valid(const TorusGraph& t, const ConstraintGraph& g, const Coloring& f);

/// Product of lambda_{f(v)}. Throws InvalidColoring if f is not an H-coloring.
Rational coloring_weight(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, const Coloring& f);

/// Restriction pinning each listed vertex to one color.
Restriction pin_restriction(const TorusGraph& t, const ConstraintGraph& g, const std::vector<Pin>& pins);

/// Visits every valid coloring (respecting the restriction) in lexicographic order.
/// Throws BudgetExceeded if the raw search space exceeds budget.brute_states.
void for_each_coloring(const TorusGraph& t, const ConstraintGraph& g, const Restriction& restriction,
                       const CountBudget& budget, const std::function<void(const Coloring&)>& visit);

/// Exact Z by depth-first enumeration with pruning at the first violated edge.
PartitionFunctionResult brute_force_partition_function(const TorusGraph& t, const ConstraintGraph& g,
                                                       const WeightSet& w, const CountBudget& budget = {},
                                                       const Restriction& restriction = {});

/// Exact Z by slicing the torus into m layers along the last coordinate.
PartitionFunctionResult transfer_matrix_partition_function(const TorusGraph& t, const ConstraintGraph& g,
                                                           const WeightSet& w, const CountBudget& budget = {},
                                                           const Restriction& restriction = {});

/// Transfer matrix when its budget allows, brute force otherwise.
PartitionFunctionResult partition_function(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w,
                                           const CountBudget& budget = {}, const Restriction& restriction = {});

/// Total weight (lambda_A lambda_B)^(m^d / 2) of the pure-(A,B) colorings.
Rational pure_coloring_weight(const TorusGraph& t, const WeightSet& w, const MaximalPair& pair);

struct GlobalBoundsReport {
  BigInt count;
  Rational eta;
  bool lower_holds = false;
  bool upper_holds = false;
  /// count / eta^(n/2)
  double lower_slack = 0;
  /// eta^(n/2) 2^(n/(2 degree)) / count
  double upper_slack = 0;
};

/// Checks eta^(n/2) <= |Hom| <= eta^(n/2) 2^(n/(2 degree)) exactly. Requires all-1 weights.
GlobalBoundsReport check_global_bounds(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w,
                                       const CountBudget& budget = {});

/// p(f(x) = k), or p(f(x) = k | f(y) = l) when a condition is given.
/// Throws ZeroConditioningEvent if p(f(y) = l) = 0.
Rational exact_marginal(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, Vertex x, Color k,
                        std::optional<Pin> condition = std::nullopt, const CountBudget& budget = {});

/// The full occupation vector (p(f(x) = k | condition))_k.
std::vector<Rational> exact_occupation(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, Vertex x,
                                       std::optional<Pin> condition = std::nullopt, const CountBudget& budget = {});

}  // namespace torushom
