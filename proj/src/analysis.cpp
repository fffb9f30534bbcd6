#include "torushom/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "torushom/errors.hpp"
#include "torushom/graph_io.hpp"

namespace torushom {

const char* to_string(Side side) { return side == Side::Even ? "even" : "odd"; }
const char* to_string(Relation relation) { return relation == Relation::SameSide ? "same-side" : "cross-side"; }

Side side_of(const TorusGraph& t, Vertex x) { return t.is_even(x) ? Side::Even : Side::Odd; }

Equipartition require_equipartition(const ConstraintGraph& g, const WeightSet& w, const ExtremalStructure& extremal) {
  const auto kind = classify_equipartition(g, w, extremal);
  if (kind == Equipartition::Unknown)
    throw Error(ErrorCode::NotEquipartition,
                "maximal pairs are not a singleton, a two-class swap or a transitive family");
  return kind;
}

namespace {

void check_color(const ConstraintGraph& g, Color c) {
  if (c >= g.num_colors()) throw Error(ErrorCode::OutOfRange, "color outside H");
}

/// The extremal structure after the equipartition check.
ExtremalStructure phases(const ConstraintGraph& g, const WeightSet& w) {
  auto extremal = eta_and_maximal_pairs(g, w);
  require_equipartition(g, w, extremal);
  return extremal;
}

/// (own side set, other side set) of a phase for a vertex on x_side.
std::pair<ColorSet, ColorSet> sets_for(const MaximalPair& p, Side x_side) {
  return x_side == Side::Even ? std::make_pair(p.a, p.b) : std::make_pair(p.b, p.a);
}

Rational raw_sum(const WeightSet& w, const ExtremalStructure& extremal, Relation relation,
                 Color k, Color l, Side x_side) {
  Rational sum = 0;
  for (const auto& p : extremal.pairs) {
    const auto [own, other] = sets_for(p, x_side);
    const ColorSet cond = relation == Relation::SameSide ? own : other;
    if (own.contains(k) && cond.contains(l)) sum += w[k] / subset_weight(w, own);
  }
  return sum / static_cast<unsigned long>(extremal.pairs.size());
}

}  // namespace

Rational theorem_occupation_target(const ConstraintGraph& g, const WeightSet& w, Side side, Color k) {
  check_color(g, k);
  const auto extremal = phases(g, w);
  Rational sum = 0;
  for (const auto& p : extremal.pairs) {
    const ColorSet own = sets_for(p, side).first;
    if (own.contains(k)) sum += w[k] / subset_weight(w, own);
  }
  return sum / static_cast<unsigned long>(extremal.pairs.size());
}

std::vector<Rational> theorem_occupation_vector(const ConstraintGraph& g, const WeightSet& w, Side side) {
  std::vector<Rational> out;
  for (std::size_t k = 0; k < g.num_colors(); ++k) out.push_back(theorem_occupation_target(g, w, side, Color(k)));
  return out;
}

Rational theorem_conditional_raw(const ConstraintGraph& g, const WeightSet& w, Relation relation, Color k, Color l,
                                 Side x_side) {
  check_color(g, k);
  check_color(g, l);
  return raw_sum(w, phases(g, w), relation, k, l, x_side);
}

std::vector<Rational> theorem_conditional_vector(const ConstraintGraph& g, const WeightSet& w, Relation relation,
                                                 Color l, Side x_side) {
  check_color(g, l);
  const auto extremal = phases(g, w);
  std::vector<Rational> out;
  Rational total = 0;
  for (std::size_t k = 0; k < g.num_colors(); ++k) {
    out.push_back(raw_sum(w, extremal, relation, Color(k), l, x_side));
    total += out.back();
  }
  if (sgn(total) == 0)
    throw Error(ErrorCode::ZeroConditioningEvent, "color " + g.label(l) + " never occurs on the conditioning side");
  for (auto& v : out) v /= total;
  return out;
}

Rational theorem_conditional_target(const ConstraintGraph& g, const WeightSet& w, Relation relation, Color k,
                                    Color l, Side x_side) {
  check_color(g, k);
  return theorem_conditional_vector(g, w, relation, l, x_side)[k];
}

Rational phase_mixture_conditional(const ConstraintGraph& g, const WeightSet& w, Relation relation, Color k, Color l,
                                   Side x_side) {
  check_color(g, k);
  check_color(g, l);
  const auto extremal = phases(g, w);
  Rational evidence = 0, joint = 0;
  for (const auto& p : extremal.pairs) {
    const auto [own, other] = sets_for(p, x_side);
    const ColorSet cond = relation == Relation::SameSide ? own : other;
    if (!cond.contains(l)) continue;
    const Rational likelihood = w[l] / subset_weight(w, cond);
    evidence += likelihood;
    if (own.contains(k)) joint += likelihood * w[k] / subset_weight(w, own);
  }
  if (sgn(evidence) == 0)
    throw Error(ErrorCode::ZeroConditioningEvent, "color " + g.label(l) + " never occurs on the conditioning side");
  return joint / evidence;
}

Rational influence_ratio(const Rational& conditional, const Rational& marginal) {
  if (sgn(marginal) == 0) throw Error(ErrorCode::ZeroDenominator, "marginal probability is 0");
  return conditional / marginal;
}

double influence_ratio(double conditional, double marginal) {
  if (marginal == 0) throw Error(ErrorCode::ZeroDenominator, "marginal probability is 0");
  return conditional / marginal;
}

bool is_long_range(double ratio, double tolerance) { return std::abs(ratio - 1.0) > tolerance; }

double d_inf(const std::vector<Rational>& a, const std::vector<Rational>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::Config, "vector sizes differ");
  double out = 0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(Rational(a[i] - b[i]).get_d()));
  return out;
}

double d_inf(const std::vector<double>& a, const std::vector<Rational>& b) {
  if (a.size() != b.size()) throw Error(ErrorCode::Config, "vector sizes differ");
  double out = 0;
  for (std::size_t i = 0; i < a.size(); ++i) out = std::max(out, std::abs(a[i] - b[i].get_d()));
  return out;
}

Vertex farthest_vertex(const TorusGraph& t, Vertex y, Relation relation) {
  if (y >= t.num_vertices()) throw Error(ErrorCode::OutOfRange, "vertex outside torus");
  const bool want_even = (relation == Relation::SameSide) == t.is_even(y);
  Vertex best = y;
  int best_distance = -1;
  for (std::size_t x = 0; x < t.num_vertices(); ++x) {
    if (t.is_even(Vertex(x)) != want_even) continue;
    const int dist = t.distance(Vertex(x), y);
    if (dist > best_distance) {
      best_distance = dist;
      best = Vertex(x);
    }
  }
  return best;
}

InfluenceReport exact_influence(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, Vertex x, Vertex y,
                                Color l, const CountBudget& budget) {
  InfluenceReport r;
  r.x = x;
  r.y = y;
  r.l = l;
  r.relation = t.is_even(x) == t.is_even(y) ? Relation::SameSide : Relation::CrossSide;
  r.distance = t.distance(x, y);
  r.marginal = exact_occupation(t, g, w, x, std::nullopt, budget);
  r.conditional = exact_occupation(t, g, w, x, Pin{y, l}, budget);
  for (std::size_t k = 0; k < r.marginal.size(); ++k) {
    if (sgn(r.marginal[k]) == 0) r.ratio.emplace_back(std::nullopt);
    else r.ratio.emplace_back(r.conditional[k] / r.marginal[k]);
  }
  r.target = theorem_conditional_vector(g, w, r.relation, l, side_of(t, x));
  r.d_inf_to_target = d_inf(r.conditional, r.target);
  return r;
}

Rational conjecture_L(const ConstraintGraph& g, const WeightSet& w, const MaximalPair& pair, int delta) {
  if (delta < 1) throw Error(ErrorCode::Config, "degree must be positive");
  const unsigned long deg = static_cast<unsigned long>(delta);
  auto half = [&](ColorSet s, ColorSet other) -> Rational {
    Rational sum = 0;
    const ColorSet n_s = common_neighborhood(g, s);
    for (Color k : g.all().without(s).members())
      sum += w[k] * power(subset_weight(w, n_s & g.neighbors(k)), deg);
    return sum / (2 * subset_weight(w, s) * power(subset_weight(w, other), deg));
  };
  return half(pair.a, pair.b) + half(pair.b, pair.a);
}

Rational conjecture_L(const ConstraintGraph& g, const WeightSet& w, const MaximalPair& pair, const TorusGraph& t) {
  return conjecture_L(g, w, pair, t.degree());
}

ConjecturePrediction conjecture_weight_prediction(const ConstraintGraph& g, const WeightSet& w,
                                                  const MaximalPair& pair, const TorusGraph& t) {
  ConjecturePrediction p;
  p.pair = pair;
  p.eta = subset_weight(w, pair.a) * subset_weight(w, pair.b);
  p.leading_exponent = static_cast<unsigned long>(t.num_vertices() / 2);
  p.correction_exponent = conjecture_L(g, w, pair, t) * static_cast<unsigned long>(t.num_vertices());
  p.log_prediction = static_cast<double>(t.num_vertices() / 2) * log_of(p.eta) + p.correction_exponent.get_d();
  p.prefactor_model = "eta^(" + to_string(p.leading_exponent) + ") * exp(" + to_string(p.correction_exponent) + ")";
  return p;
}

Rational conjecture_f_q(int q, int d) {
  if (q < 2) throw Error(ErrorCode::Config, "q must be at least 2");
  if (d < 1) throw Error(ErrorCode::Config, "d must be at least 1");
  const long c = (q + 1) / 2, f = q / 2;
  const unsigned long ud = static_cast<unsigned long>(d);
  const Rational first = ratio(c, 2 * f) * power(Rational(2) - ratio(2, c), ud);
  const Rational second = ratio(f, 2 * c) * power(Rational(2) - ratio(2, f), ud);
  Rational out = first + second;
  out.canonicalize();
  return out;
}

ColoringCountPrediction coloring_count_prediction(int q, int d) {
  ColoringCountPrediction p;
  p.q = q;
  p.d = d;
  p.f = conjecture_f_q(q, d);
  BigInt binom;
  mpz_bin_uiui(binom.get_mpz_t(), static_cast<unsigned long>(q), static_cast<unsigned long>(q / 2));
  p.prefactor = binom * (q % 2 == 1 ? 2 : 1);
  p.base = BigInt(q / 2) * BigInt((q + 1) / 2);
  p.base_exponent = power(BigInt(2), static_cast<unsigned long>(d - 1));
  p.log_value = log_of(p.prefactor) + p.base_exponent.get_d() * std::log(p.base.get_d()) + p.f.get_d();
  p.symbolic = to_string(p.prefactor) + "e^(" + to_string(p.f) + ") * " + to_string(p.base) + "^(2^" +
               std::to_string(d - 1) + ")";
  return p;
}

bool consistency_L_vs_f(int q, int d) {
  const auto kq = preset_graph("kq:" + std::to_string(q));
  const auto extremal = eta_and_maximal_pairs(kq.graph, kq.weights);
  const Rational f = conjecture_f_q(q, d);
  const Rational scale = power(Rational(2), static_cast<unsigned long>(d));
  for (const auto& pair : extremal.pairs)
    if (conjecture_L(kq.graph, kq.weights, pair, d) * scale != f) return false;
  return true;
}

}  // namespace torushom
