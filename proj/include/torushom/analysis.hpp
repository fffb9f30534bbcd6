#pragma once

#include <optional>
#include <string>
#include <vector>

#include "torushom/constraint_graph.hpp"
#include "torushom/exact.hpp"
#include "torushom/rational.hpp"
#include "torushom/torus.hpp"

namespace torushom {

enum class Side { Even, Odd };
enum class Relation { SameSide, CrossSide };

const char* to_string(Side side);
const char* to_string(Relation relation);

/// Side of a torus vertex.
Side side_of(const TorusGraph& t, Vertex x);

/// Throws NotEquipartition unless M_Lambda(H) is singleton, a two-class swap or transitive.
Equipartition require_equipartition(const ConstraintGraph& g, const WeightSet& w, const ExtremalStructure& extremal);

/// Limit of p(f(x) = k) for x on `side`: (1/|M|) sum over (A,B) with k in A of lambda_k / lambda_A
/// (with B in place of A on the odd side).
Rational theorem_occupation_target(const ConstraintGraph& g, const WeightSet& w, Side side, Color k);
std::vector<Rational> theorem_occupation_vector(const ConstraintGraph& g, const WeightSet& w, Side side);

/// The class sums behind the conditional limit, before normalization:
/// (1/|M|) sum over (A,B) with k, l in A (same side) or k in A, l in B (cross side) of lambda_k / lambda_A.
Rational theorem_conditional_raw(const ConstraintGraph& g, const WeightSet& w, Relation relation, Color k, Color l,
                                 Side x_side = Side::Even);

/// theorem_conditional_raw normalized over k, i.e. a conditional probability vector entry.
/// Throws ZeroConditioningEvent if l never occurs on the conditioning side.
Rational theorem_conditional_target(const ConstraintGraph& g, const WeightSet& w, Relation relation, Color k,
                                    Color l, Side x_side = Side::Even);
std::vector<Rational> theorem_conditional_vector(const ConstraintGraph& g, const WeightSet& w, Relation relation,
                                                 Color l, Side x_side = Side::Even);

/// Equal-weight mixture of the phases, each phase reweighted by the likelihood lambda_l / lambda_S
/// of the conditioning event: sum over phases of p(phase | f(y) = l) p(f(x) = k | phase).
Rational phase_mixture_conditional(const ConstraintGraph& g, const WeightSet& w, Relation relation, Color k,
                                   Color l, Side x_side = Side::Even);

/// p(f(x)=k | f(y)=l) / p(f(x)=k). Throws ZeroDenominator.
Rational influence_ratio(const Rational& conditional, const Rational& marginal);
double influence_ratio(double conditional, double marginal);
/// |ratio - 1| > tolerance.
bool is_long_range(double ratio, double tolerance);

/// l-infinity distance.
double d_inf(const std::vector<Rational>& a, const std::vector<Rational>& b);
double d_inf(const std::vector<double>& a, const std::vector<Rational>& b);

/// The vertex of the requested relation to y farthest from y (smallest index among ties).
Vertex farthest_vertex(const TorusGraph& t, Vertex y, Relation relation);

struct InfluenceReport {
  Vertex x = 0;
  Vertex y = 0;
  Color l = 0;
  Relation relation = Relation::SameSide;
  int distance = 0;
  std::vector<Rational> marginal;
  std::vector<Rational> conditional;
  /// conditional[k] / marginal[k]; empty entries where the marginal is 0.
  std::vector<std::optional<Rational>> ratio;
  std::vector<Rational> target;
  double d_inf_to_target = 0;
};

/// Exact conditional and unconditional occupation vectors at x given f(y) = l, compared with the
/// normalized class-sum target for the relation of x and y.
InfluenceReport exact_influence(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, Vertex x, Vertex y,
                                Color l, const CountBudget& budget = {});

/// Delta used in the correction exponent: the torus degree.
Rational conjecture_L(const ConstraintGraph& g, const WeightSet& w, const MaximalPair& pair, int delta);
Rational conjecture_L(const ConstraintGraph& g, const WeightSet& w, const MaximalPair& pair, const TorusGraph& t);

struct ConjecturePrediction {
  MaximalPair pair;
  Rational eta;
  /// Exponent of eta: m^d / 2.
  BigInt leading_exponent;
  /// m^d L, the exponent of e.
  Rational correction_exponent;
  /// Natural log of eta^(m^d/2) exp(m^d L).
  double log_prediction = 0;
  std::string prefactor_model;
};

ConjecturePrediction conjecture_weight_prediction(const ConstraintGraph& g, const WeightSet& w,
                                                  const MaximalPair& pair, const TorusGraph& t);

/// f(q) with c = ceil(q/2), f = floor(q/2): (c/(2f))(2 - 2/c)^d + (f/(2c))(2 - 2/f)^d.
Rational conjecture_f_q(int q, int d);

struct ColoringCountPrediction {
  int q = 0;
  int d = 0;
  /// (1 + [q odd]) C(q, floor(q/2)).
  BigInt prefactor;
  /// floor(q/2) ceil(q/2), raised to 2^(d-1).
  BigInt base;
  BigInt base_exponent;
  Rational f;
  /// Natural log of the prediction.
  double log_value = 0;
  /// "6e^1"-style symbolic prefactor times exp(f).
  std::string symbolic;
};

ColoringCountPrediction coloring_count_prediction(int q, int d);

/// For K_q, all-1 weights, m = 2: true iff 2^d L(A,B,d) equals f(q) exactly for every (A,B) in M(K_q).
bool consistency_L_vs_f(int q, int d);

}  // namespace torushom
