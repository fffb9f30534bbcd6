#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "torushom/constraint_graph.hpp"
#include "torushom/exact.hpp"
#include "torushom/torus.hpp"

namespace torushom {

std::uint64_t splitmix64(std::uint64_t x);

/// 64-bit Mersenne Twister with portable bounded-integer and unit-interval draws,
/// so streams are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, n), n > 0, by rejection.
  std::uint64_t below(std::uint64_t n);
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

struct ChainConfig {
  std::uint64_t steps = 100000;
  std::uint64_t burn_in = 0;
  std::uint64_t seed = 1;
  /// Emit every thin-th state after burn-in.
  std::uint64_t thin = 1;
  std::optional<Pin> pinned;

  /// Throws Config if steps == 0, thin == 0 or burn_in >= steps.
  void validate() const;
};

struct InitialState {
  enum class Kind { Given, Pure, UniformGreedy };
  Kind kind = Kind::UniformGreedy;
  Coloring coloring;
  std::optional<MaximalPair> pair;

  static InitialState given(Coloring f) { return {Kind::Given, std::move(f), std::nullopt}; }
  static InitialState pure(MaximalPair p) { return {Kind::Pure, {}, p}; }
  static InitialState uniform_greedy() { return {}; }
};

/// Random pure-(A,B) coloring (colors drawn proportionally to weight inside A and B).
/// With a pin, the pinned vertex and its neighbors are adjusted; throws NoValidInitial if impossible.
Coloring pure_coloring(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, const MaximalPair& pair,
                       Rng& rng, std::optional<Pin> pinned = std::nullopt);

/// Random vertex order, uniformly random allowed color per vertex, up to `restarts` attempts.
std::optional<Coloring> greedy_coloring(const TorusGraph& t, const ConstraintGraph& g, Rng& rng,
                                        std::optional<Pin> pinned = std::nullopt, int restarts = 100);

struct StepInfo {
  Vertex vertex = 0;
  int allowed = 0;
  bool changed = false;
};

/// One heat-bath update: pick a non-pinned vertex uniformly and resample its color
/// proportionally to weight among colors compatible with all its neighbors.
StepInfo glauber_step(const TorusGraph& t, const ConstraintGraph& g, const std::vector<double>& weights,
                      Coloring& f, Rng& rng, std::optional<Vertex> pinned = std::nullopt);

struct ChainStats {
  std::uint64_t steps = 0;
  std::uint64_t emitted = 0;
  std::uint64_t changed = 0;
  /// Updates where exactly one color was allowed.
  std::uint64_t forced = 0;
  InitialState::Kind initializer = InitialState::Kind::UniformGreedy;
  /// True if uniform-greedy failed and the first maximal pair was used instead.
  bool used_fallback = false;
  Coloring initial;
};

struct ChainSample {
  std::uint64_t step;
  const Coloring& state;
};

/// Runs one chain; `emit` receives every thinned post-burn-in state. Deterministic given cfg.seed.
ChainStats run_chain(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, const ChainConfig& cfg,
                     const InitialState& initial, const std::function<void(const ChainSample&)>& emit);

/// Finds the maximal pair of an ideal edge from neighborhood palettes.
class IdealEdgeDetector {
 public:
  IdealEdgeDetector(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w);
  IdealEdgeDetector(const TorusGraph& t, const ExtremalStructure& extremal);

  const ExtremalStructure& extremal() const { return extremal_; }

  /// f(N_v) for every vertex v.
  std::vector<ColorSet> palettes(const Coloring& f) const;
  /// Index into extremal().pairs of (f(N_v), f(N_u)) for the edge e = uv, u even.
  std::optional<std::size_t> pair_at(const std::vector<ColorSet>& palettes, const Edge& e) const;
  std::optional<MaximalPair> at(const Coloring& f, const Edge& e) const;
  /// Fraction of torus edges that are not ideal.
  double not_ideal_fraction(const Coloring& f) const;

 private:
  TorusGraph t_;
  ExtremalStructure extremal_;
  /// First coordinate of each maximal pair -> its index (B = n(A) makes A a key).
  std::map<std::uint32_t, std::size_t> index_of_a_;
};

/// The maximal pair (A, B) with f(N_u) = B and f(N_v) = A, if any. Throws OutOfRange if e is not an edge.
std::optional<MaximalPair> is_ideal_edge(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w,
                                         const Coloring& f, const Edge& e);

struct ClassifyThresholds {
  /// Largest fraction of vertices allowed outside the ideal giant component.
  double defect_cap = 0.1;
  /// Relative tolerance on within-class color frequencies.
  double balance_tol = 0.2;

  void validate() const;
};

struct ColorBalance {
  Color color;
  bool even_side;
  double observed;
  double expected;
  bool within;
};

struct PhaseLabel {
  bool pure = false;
  MaximalPair pair;
  /// F1: even vertices colored outside A. F2: odd vertices colored outside B.
  std::vector<Vertex> defect_e;
  std::vector<Vertex> defect_o;
  Rational ideal_fraction;
  std::size_t giant_size = 0;
  bool balanced = false;
  std::vector<ColorBalance> balance;

  std::string describe(const ConstraintGraph& g) const;
};

PhaseLabel classify(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w, const Coloring& f,
                    const ClassifyThresholds& thresholds = {});
PhaseLabel classify(const TorusGraph& t, const IdealEdgeDetector& detector, const WeightSet& w, const Coloring& f,
                    const ClassifyThresholds& thresholds = {});

/// f composed with the translation by +1 along the first axis (swaps the even and odd classes).
Coloring parity_swapped(const TorusGraph& t, const Coloring& f);
/// phi applied to every color.
Coloring recolored(const Coloring& f, const Permutation& phi);

enum class EpsilonMode { AllEdges, SingleEdge };

struct EpsilonEstimate {
  double p_not_ideal = 0;
  /// Batch-means standard error.
  double std_error = 0;
  std::uint64_t samples = 0;
};

/// Monte Carlo Pr(e not ideal). AllEdges averages the indicator over all edges per sample.
EpsilonEstimate epsilon_estimate(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w,
                                 const ChainConfig& cfg, EpsilonMode mode = EpsilonMode::AllEdges,
                                 std::optional<Edge> edge = std::nullopt,
                                 const InitialState& initial = InitialState::uniform_greedy());

/// Exact Pr(e not ideal) by enumeration. Without an edge, the average over all edges.
Rational exact_not_ideal_probability(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w,
                                     std::optional<Edge> edge = std::nullopt, const CountBudget& budget = {});

/// Batch-means standard error of the mean of a series.
double batch_means_stderr(const std::vector<double>& series, std::size_t batches = 30);

struct ChainSummary {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  std::string initial_phase;
  ChainStats stats;
  double mean_ideal_fraction = 0;
  EpsilonEstimate epsilon;
  /// Emitted states per phase label.
  std::map<std::string, std::uint64_t> phase_counts;
  double exceptional_fraction = 0;
};

/// Independent chains with seeds seed ^ splitmix64(i), run on worker threads, folded by chain index.
std::vector<ChainSummary> run_chains(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w,
                                     const ChainConfig& cfg, std::size_t chains, const InitialState& initial,
                                     const ClassifyThresholds& thresholds = {}, unsigned threads = 0);

/// One sample-stream record: {step, phase_label, ideal_fraction, color_histogram_E, color_histogram_O}
/// plus a run-length encoded "coloring" when verbose.
nlohmann::json sample_record(const TorusGraph& t, const ConstraintGraph& g, std::uint64_t step, const Coloring& f,
                             const PhaseLabel& label, bool verbose);

/// [[color, run], ...] in vertex-index order.
nlohmann::json run_length_encode(const Coloring& f);

}  // namespace torushom
