#include "commands.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "torushom/analysis.hpp"
#include "torushom/constraint_graph.hpp"
#include "torushom/errors.hpp"
#include "torushom/exact.hpp"
#include "torushom/graph_io.hpp"
#include "torushom/proof_quantities.hpp"
#include "torushom/sampler.hpp"
#include "torushom/torus.hpp"

namespace torushom::cli {

using nlohmann::json;

namespace {

struct Instance {
  WeightedGraph wg;
  std::string name;
  const ConstraintGraph& g() const { return wg.graph; }
  const WeightSet& w() const { return wg.weights; }
};

Instance load_instance(const RunConfig& cfg) {
  if (cfg.h.empty()) throw Error(ErrorCode::Config, "no constraint graph given (use --h)");
  Instance inst{load_graph(cfg.h), cfg.h};
  if (!cfg.weights.empty()) {
    inst.wg.weights = parse_weight_list(cfg.weights, inst.g().num_colors());
    inst.name += " [" + cfg.weights + "]";
  }
  return inst;
}

std::string torus_name(const TorusGraph& t) { return t.descriptor(); }

std::string fmt(double x) {
  if (!std::isfinite(x)) return x > 0 ? "inf" : (x < 0 ? "-inf" : "nan");
  std::ostringstream out;
  out.precision(10);
  out << x;
  return out.str();
}

std::string format_pair(const ConstraintGraph& g, const MaximalPair& p) {
  return "(" + g.format(p.a) + "," + g.format(p.b) + ")";
}

std::string format_tuple(const ConstraintGraph& g, const ColorSetTuple& tuple) {
  std::string out = "(";
  for (std::size_t i = 0; i < tuple.size(); ++i) out += (i ? "," : "") + g.format(tuple[i]);
  return out + ")";
}

json rational_json(const Rational& r) { return {{"exact", to_string(r)}, {"value", r.get_d()}}; }

json rational_list(const std::vector<Rational>& v) {
  json out = json::array();
  for (const auto& r : v) out.push_back(to_string(r));
  return out;
}

json double_list(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(x);
  return out;
}

CountBudget budget_of(const RunConfig& cfg) {
  CountBudget b;
  b.brute_states = cfg.brute_budget;
  b.transfer_states = cfg.transfer_budget;
  b.threads = cfg.threads;
  return b;
}

std::optional<Pin> parse_pin(const TorusGraph& t, const ConstraintGraph& g, const std::string& text) {
  if (text.empty()) return std::nullopt;
  const auto eq = text.rfind('=');
  if (eq == std::string::npos) throw Error(ErrorCode::Config, "pin '" + text + "': expected <coords>=<color>");
  return Pin{t.parse_vertex(text.substr(0, eq)), g.resolve_color(text.substr(eq + 1))};
}

bool is_complete_unweighted(const ConstraintGraph& g, const WeightSet& w) {
  if (!w.is_uniform()) return false;
  const auto h = static_cast<Color>(g.num_colors());
  for (Color a = 0; a < h; ++a)
    for (Color b = 0; b < h; ++b)
      if (g.adjacent(a, b) != (a != b)) return false;
  return h >= 2;
}

}  // namespace

std::string Table::to_csv() const {
  auto cell = [](const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
  };
  auto line = [&](const std::vector<std::string>& row) {
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + cell(row[i]);
    return out + "\n";
  };
  std::string out = line(header);
  for (const auto& row : rows) out += line(row);
  return out;
}

CommandOutput run_analyze(const RunConfig& cfg) {
  const Instance inst = load_instance(cfg);
  const auto& g = inst.g();
  const auto& w = inst.w();
  const ExtremalStructure ex = eta_and_maximal_pairs(g, w);

  CommandOutput out;
  json& r = out.result;
  r["instance"] = inst.name;
  r["graph"] = to_json(inst.wg);
  r["eta"] = rational_json(ex.eta);
  r["pair_count"] = ex.pairs.size();
  r["pairs"] = json::array();
  for (const auto& p : ex.pairs) {
    r["pairs"].push_back(format_pair(g, p));
    out.table.rows.push_back({format_pair(g, p), g.format(p.a), g.format(p.b), to_string(subset_weight(w, p.a)),
                              to_string(subset_weight(w, p.b))});
  }
  out.table.header = {"pair", "A", "B", "lambda_A", "lambda_B"};
  json support = json::array();
  for (ColorSet s : support_family(g, w)) support.push_back(g.format(s));
  r["support"] = support;
  r["equipartition"] = to_string(classify_equipartition(g, w, ex));
  try {
    const Blowup up = blowup(g, w);
    json sizes = json::array();
    for (ColorSet b : up.blocks) sizes.push_back(b.size());
    const ExtremalStructure lifted = eta_and_maximal_pairs(up.graph, WeightSet::uniform(up.graph.num_colors()));
    bool correspondence = lifted.pairs.size() == ex.pairs.size() && lifted.eta == ex.eta * up.scale * up.scale;
    for (const auto& p : ex.pairs) correspondence = correspondence && lifted.contains(lift_pair(up, p));
    r["blowup"] = {{"scale", to_string(up.scale)},
                   {"colors", up.graph.num_colors()},
                   {"block_sizes", sizes},
                   {"eta", rational_json(lifted.eta)},
                   {"pairs_correspond", correspondence}};
  } catch (const Error& e) {
    r["blowup"] = {{"error", e.what()}};
  }
  return out;
}

CommandOutput run_count(const RunConfig& cfg) {
  const Instance inst = load_instance(cfg);
  const TorusGraph t(cfg.m, cfg.d);
  const CountBudget budget = budget_of(cfg);
  const auto& g = inst.g();
  const auto& w = inst.w();

  CommandOutput out;
  json& r = out.result;
  r["instance"] = inst.name;
  r["torus"] = torus_name(t);
  out.table.header = {"method", "z", "log_z"};
  auto record = [&](const PartitionFunctionResult& res) {
    out.table.rows.push_back({to_string(res.method), to_string(res.z), fmt(log_of(res.z))});
  };

  Rational z;
  if (cfg.method == "both") {
    const auto brute = brute_force_partition_function(t, g, w, budget);
    const auto transfer = transfer_matrix_partition_function(t, g, w, budget);
    record(brute);
    record(transfer);
    const bool agree = brute.z == transfer.z;
    r["method"] = "both";
    r["brute"] = to_string(brute.z);
    r["transfer"] = to_string(transfer.z);
    r["agree"] = agree;
    if (!agree) out.exit_code = exit_status(ErrorCode::OracleMismatch);
    z = brute.z;
  } else {
    PartitionFunctionResult res;
    if (cfg.method == "brute") res = brute_force_partition_function(t, g, w, budget);
    else if (cfg.method == "transfer") res = transfer_matrix_partition_function(t, g, w, budget);
    else res = partition_function(t, g, w, budget);
    record(res);
    r["method"] = to_string(res.method);
    z = res.z;
  }
  r["z"] = to_string(z);
  r["log_z"] = log_of(z);

  if (cfg.bounds) {
    const GlobalBoundsReport b = check_global_bounds(t, g, w, budget);
    r["bounds"] = {{"eta", to_string(b.eta)},         {"lower_holds", b.lower_holds},
                   {"upper_holds", b.upper_holds},    {"lower_slack", b.lower_slack},
                   {"upper_slack", b.upper_slack}};
  }
  return out;
}

namespace {

InitialState initial_state(const RunConfig& cfg, const ConstraintGraph& g, const WeightSet& w) {
  if (cfg.init == "greedy") return InitialState::uniform_greedy();
  const auto pairs = eta_and_maximal_pairs(g, w).pairs;
  std::size_t index = 0;
  if (cfg.init.starts_with("pure:")) {
    try {
      index = std::stoul(cfg.init.substr(5));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::Config, "init '" + cfg.init + "': bad pair index");
    }
  }
  if (index >= pairs.size())
    throw Error(ErrorCode::OutOfRange, "init '" + cfg.init + "': only " + std::to_string(pairs.size()) + " maximal pairs");
  return InitialState::pure(pairs[index]);
}

ChainConfig chain_config(const RunConfig& cfg, std::optional<Pin> pin) {
  ChainConfig c;
  c.steps = cfg.steps;
  c.burn_in = cfg.burn_in;
  c.thin = cfg.thin;
  c.seed = cfg.seed;
  c.pinned = pin;
  c.validate();
  return c;
}

const char* initializer_name(InitialState::Kind kind) {
  switch (kind) {
    case InitialState::Kind::Given: return "given";
    case InitialState::Kind::Pure: return "pure";
    case InitialState::Kind::UniformGreedy: return "uniform-greedy";
  }
  return "?";
}

}  // namespace

CommandOutput run_sample(const RunConfig& cfg) {
  const Instance inst = load_instance(cfg);
  const TorusGraph t(cfg.m, cfg.d);
  const auto& g = inst.g();
  const auto& w = inst.w();
  const std::optional<Pin> pin = parse_pin(t, g, cfg.pin);
  const ChainConfig chain = chain_config(cfg, pin);
  const InitialState init = initial_state(cfg, g, w);
  ClassifyThresholds thresholds{cfg.defect_cap, cfg.balance_tol};
  thresholds.validate();

  const auto summaries = run_chains(t, g, w, chain, cfg.chains, init, thresholds, cfg.threads);

  CommandOutput out;
  json& r = out.result;
  r["instance"] = inst.name;
  r["torus"] = torus_name(t);
  r["steps"] = cfg.steps;
  r["burn_in"] = cfg.burn_in;
  r["thin"] = cfg.thin;
  r["seed"] = cfg.seed;
  r["thresholds"] = {{"defect_cap", cfg.defect_cap}, {"balance_tol", cfg.balance_tol}};
  if (pin) r["pin"] = {{"vertex", t.format_vertex(pin->vertex)}, {"color", g.label(pin->color)}};
  r["chains"] = json::array();
  out.table.header = {"chain", "seed", "initial_phase", "mean_ideal_fraction", "p_not_ideal", "stderr",
                      "exceptional_fraction", "changed", "forced"};

  for (const auto& s : summaries) {
    json c = {{"index", s.index},
              {"seed", s.seed},
              {"initializer", initializer_name(s.stats.initializer)},
              {"used_fallback", s.stats.used_fallback},
              {"initial_phase", s.initial_phase},
              {"emitted", s.stats.emitted},
              {"changed", s.stats.changed},
              {"forced", s.stats.forced},
              {"mean_ideal_fraction", s.mean_ideal_fraction},
              {"epsilon",
               {{"mode", "all-edges"},
                {"p_not_ideal", s.epsilon.p_not_ideal},
                {"stderr", s.epsilon.std_error},
                {"samples", s.epsilon.samples}}},
              {"phase_counts", s.phase_counts},
              {"exceptional_fraction", s.exceptional_fraction}};
    if (cfg.epsilon_mode == "single") {
      ChainConfig local = chain;
      local.seed = s.seed;
      const auto single = epsilon_estimate(t, g, w, local, EpsilonMode::SingleEdge, std::nullopt, init);
      c["epsilon_single_edge"] = {
          {"p_not_ideal", single.p_not_ideal}, {"stderr", single.std_error}, {"samples", single.samples}};
    }
    out.table.rows.push_back({std::to_string(s.index), std::to_string(s.seed), s.initial_phase,
                              fmt(s.mean_ideal_fraction), fmt(s.epsilon.p_not_ideal), fmt(s.epsilon.std_error),
                              fmt(s.exceptional_fraction), std::to_string(s.stats.changed),
                              std::to_string(s.stats.forced)});
    r["chains"].push_back(std::move(c));
  }

  if (!cfg.trace.empty()) {
    std::ofstream trace(cfg.trace);
    if (!trace) throw Error(ErrorCode::Config, "cannot write trace file " + cfg.trace);
    const IdealEdgeDetector detector(t, g, w);
    for (const auto& s : summaries) {
      ChainConfig local = chain;
      local.seed = s.seed;
      run_chain(t, g, w, local, init, [&](const ChainSample& sample) {
        const PhaseLabel label = classify(t, detector, w, sample.state, thresholds);
        json rec = sample_record(t, g, sample.step, sample.state, label, cfg.verbose);
        rec["chain"] = s.index;
        trace << rec.dump() << '\n';
      });
    }
    r["trace"] = cfg.trace;
  }
  return out;
}

namespace {

Vertex resolve_x(const TorusGraph& t, const std::string& spec, Vertex y) {
  if (spec == "antipodal") return t.antipode(y);
  if (spec == "farthest-same") return farthest_vertex(t, y, Relation::SameSide);
  if (spec == "farthest-cross") return farthest_vertex(t, y, Relation::CrossSide);
  return t.parse_vertex(spec);
}

/// Empirical occupation vector at x from one chain, with per-color batch-means errors.
struct Occupation {
  std::vector<double> mean;
  std::vector<double> stderr_;
  std::uint64_t samples = 0;
};

Occupation empirical_occupation(const TorusGraph& t, const ConstraintGraph& g, const WeightSet& w,
                                const ChainConfig& cfg, const InitialState& init, Vertex x) {
  const std::size_t h = g.num_colors();
  std::vector<std::vector<double>> series(h);
  run_chain(t, g, w, cfg, init, [&](const ChainSample& s) {
    for (std::size_t k = 0; k < h; ++k) series[k].push_back(s.state[x] == k ? 1.0 : 0.0);
  });
  Occupation occ;
  occ.samples = series.empty() ? 0 : series[0].size();
  for (const auto& sr : series) {
    double sum = 0;
    for (double v : sr) sum += v;
    occ.mean.push_back(sr.empty() ? 0.0 : sum / static_cast<double>(sr.size()));
    occ.stderr_.push_back(batch_means_stderr(sr));
  }
  return occ;
}

}  // namespace

CommandOutput run_influence(const RunConfig& cfg) {
  const Instance inst = load_instance(cfg);
  const TorusGraph t(cfg.m, cfg.d);
  const auto& g = inst.g();
  const auto& w = inst.w();
  const std::size_t h = g.num_colors();

  const Vertex y = cfg.y.empty() ? Vertex{0} : t.parse_vertex(cfg.y);
  const Vertex x = resolve_x(t, cfg.x, y);
  const Color l = cfg.l.empty() ? Color{0} : g.resolve_color(cfg.l);
  const Relation relation = side_of(t, x) == side_of(t, y) ? Relation::SameSide : Relation::CrossSide;
  const Side x_side = side_of(t, x);

  CommandOutput out;
  json& r = out.result;
  r["instance"] = inst.name;
  r["torus"] = torus_name(t);
  r["x"] = t.format_vertex(x);
  r["y"] = t.format_vertex(y);
  r["l"] = g.label(l);
  r["relation"] = to_string(relation);
  r["distance"] = t.distance(x, y);
  r["tolerance"] = cfg.tolerance;

  std::vector<Rational> target;
  std::vector<Rational> marginal_target;
  try {
    const auto ex = eta_and_maximal_pairs(g, w);
    r["equipartition"] = to_string(require_equipartition(g, w, ex));
    target = theorem_conditional_vector(g, w, relation, l, x_side);
    marginal_target = theorem_occupation_vector(g, w, x_side);
    r["target"] = rational_list(target);
    r["marginal_target"] = rational_list(marginal_target);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotEquipartition && e.code() != ErrorCode::ZeroConditioningEvent) throw;
    r["target"] = nullptr;
    r["target_error"] = e.what();
  }

  // Exact side.
  std::optional<InfluenceReport> exact;
  try {
    exact = exact_influence(t, g, w, x, y, l, budget_of(cfg));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::BudgetExceeded) throw;
    r["exact"] = {{"skipped", e.what()}};
  }
  if (exact) {
    json ratios = json::array();
    for (const auto& q : exact->ratio) ratios.push_back(q ? json(to_string(*q)) : json(nullptr));
    r["exact"] = {{"marginal", rational_list(exact->marginal)},
                  {"conditional", rational_list(exact->conditional)},
                  {"ratio", ratios}};
    if (!target.empty()) r["exact"]["d_inf_distance"] = d_inf(exact->conditional, target);
  }

  // Empirical side: one unpinned and one pinned chain.
  std::optional<Occupation> marginal_emp;
  std::optional<Occupation> conditional_emp;
  if (cfg.steps > 0) {
    const InitialState init = initial_state(cfg, g, w);
    ChainConfig free_cfg = chain_config(cfg, std::nullopt);
    ChainConfig pinned_cfg = chain_config(cfg, Pin{y, l});
    pinned_cfg.seed = cfg.seed ^ splitmix64(1);
    marginal_emp = empirical_occupation(t, g, w, free_cfg, init, x);
    conditional_emp = empirical_occupation(t, g, w, pinned_cfg, init, x);
    json ratios = json::array();
    for (std::size_t k = 0; k < h; ++k) {
      const double m = marginal_emp->mean[k];
      ratios.push_back(m > 0 ? json(influence_ratio(conditional_emp->mean[k], m)) : json(nullptr));
    }
    r["empirical"] = {{"samples", conditional_emp->samples},
                      {"marginal", double_list(marginal_emp->mean)},
                      {"marginal_stderr", double_list(marginal_emp->stderr_)},
                      {"conditional", double_list(conditional_emp->mean)},
                      {"conditional_stderr", double_list(conditional_emp->stderr_)},
                      {"ratio", ratios}};
    if (!target.empty()) r["empirical"]["d_inf_distance"] = d_inf(conditional_emp->mean, target);
  }

  // Per-color comparison records and the long-range verdict.
  r["comparison"] = json::array();
  bool long_range = false;
  out.table.header = {"color", "target", "exact_value", "empirical_value", "stderr", "exact_ratio", "empirical_ratio"};
  for (std::size_t k = 0; k < h; ++k) {
    const auto c = static_cast<Color>(k);
    json rec = {{"color", g.label(c)}};
    std::vector<std::string> row{g.label(c), "", "", "", "", "", ""};
    std::optional<double> ratio;
    if (!target.empty()) {
      rec["target"] = to_string(target[k]);
      row[1] = to_string(target[k]);
    }
    if (exact) {
      rec["exact_value"] = to_string(exact->conditional[k]);
      row[2] = to_string(exact->conditional[k]);
      if (exact->ratio[k]) {
        ratio = exact->ratio[k]->get_d();
        row[5] = to_string(*exact->ratio[k]);
      }
    }
    if (conditional_emp) {
      rec["empirical_value"] = conditional_emp->mean[k];
      rec["stderr"] = conditional_emp->stderr_[k];
      row[3] = fmt(conditional_emp->mean[k]);
      row[4] = fmt(conditional_emp->stderr_[k]);
      if (marginal_emp->mean[k] > 0) {
        const double er = influence_ratio(conditional_emp->mean[k], marginal_emp->mean[k]);
        row[6] = fmt(er);
        if (!ratio) ratio = er;
      }
    }
    if (ratio) {
      rec["long_range"] = is_long_range(*ratio, cfg.tolerance);
      long_range = long_range || *rec["long_range"].get_ptr<const bool*>();
    }
    r["comparison"].push_back(std::move(rec));
    out.table.rows.push_back(std::move(row));
  }
  r["long_range"] = long_range;
  if (!cfg.k.empty()) {
    const Color focus = g.resolve_color(cfg.k);
    r["k"] = g.label(focus);
    r["focus"] = r["comparison"][focus];
  }
  return out;
}

namespace {

/// "6e^(1)"-style sum of count * e^(exponent) over the distinct correction exponents.
std::string symbolic_prefactor(const std::map<Rational, std::size_t>& groups) {
  std::string out;
  for (const auto& [exponent, count] : groups) {
    if (!out.empty()) out += " + ";
    out += std::to_string(count) + "e^(" + to_string(exponent) + ")";
  }
  return out;
}

}  // namespace

CommandOutput run_conjecture(const RunConfig& cfg) {
  const Instance inst = load_instance(cfg);
  const auto& g = inst.g();
  const auto& w = inst.w();
  const ExtremalStructure ex = eta_and_maximal_pairs(g, w);
  const bool kq = is_complete_unweighted(g, w) && cfg.m == 2;
  const int q = static_cast<int>(g.num_colors());

  CommandOutput out;
  json& r = out.result;
  r["instance"] = inst.name;
  r["m"] = cfg.m;
  r["eta"] = to_string(ex.eta);
  r["rows"] = json::array();
  out.table.header = {"d", "prefactor_symbolic", "prefactor", "log_prediction", "exact_log_z", "ratio"};

  for (int d : cfg.ds) {
    const TorusGraph t(cfg.m, d);
    json row = {{"d", d}, {"torus", torus_name(t)}};
    std::map<Rational, std::size_t> groups;
    json pairs = json::array();
    double max_log = -INFINITY;
    std::vector<double> logs;
    BigInt leading;
    for (const auto& p : ex.pairs) {
      const ConjecturePrediction pred = conjecture_weight_prediction(g, w, p, t);
      leading = pred.leading_exponent;
      ++groups[pred.correction_exponent];
      pairs.push_back({{"pair", format_pair(g, p)},
                       {"L", to_string(conjecture_L(g, w, p, t))},
                       {"correction_exponent", to_string(pred.correction_exponent)},
                       {"log_prediction", pred.log_prediction}});
      logs.push_back(pred.log_prediction);
      max_log = std::max(max_log, pred.log_prediction);
    }
    double sum = 0;
    for (double v : logs) sum += std::exp(v - max_log);
    const double log_prediction = max_log + std::log(sum);
    double prefactor = 0;
    for (const auto& [exponent, count] : groups) prefactor += static_cast<double>(count) * std::exp(exponent.get_d());

    row["leading"] = "eta^(" + to_string(leading) + ")";
    row["pairs"] = pairs;
    row["prefactor_symbolic"] = symbolic_prefactor(groups);
    row["prefactor"] = prefactor;
    row["log_prediction"] = log_prediction;

    std::string exact_cell;
    std::string ratio_cell;
    try {
      const auto z = partition_function(t, g, w, budget_of(cfg));
      const double log_z = log_of(z.z);
      row["exact_z"] = to_string(z.z);
      row["exact_log_z"] = log_z;
      row["ratio"] = std::exp(log_z - log_prediction);
      exact_cell = fmt(log_z);
      ratio_cell = fmt(std::exp(log_z - log_prediction));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::BudgetExceeded) throw;
      row["exact_z"] = nullptr;
    }

    if (kq) {
      const ColoringCountPrediction cp = coloring_count_prediction(q, d);
      row["coloring_count"] = {{"q", q},
                               {"f", to_string(cp.f)},
                               {"symbolic", cp.symbolic},
                               {"prefactor", to_string(cp.prefactor)},
                               {"base", to_string(cp.base)},
                               {"base_exponent", to_string(cp.base_exponent)},
                               {"log_value", cp.log_value},
                               {"consistent_with_L", consistency_L_vs_f(q, d)}};
    }
    out.table.rows.push_back(
        {std::to_string(d), row["prefactor_symbolic"], fmt(prefactor), fmt(log_prediction), exact_cell, ratio_cell});
    r["rows"].push_back(std::move(row));
  }
  return out;
}

CommandOutput run_identities(const RunConfig& cfg) {
  const Instance inst = load_instance(cfg);
  ConstraintGraph g = inst.g();
  WeightSet w = inst.w();

  CommandOutput out;
  json& r = out.result;
  r["instance"] = inst.name;
  if (!w.is_uniform()) {
    const Blowup up = blowup(g, w);
    r["blowup_scale"] = to_string(up.scale);
    g = up.graph;
    w = WeightSet::uniform(g.num_colors());
  }
  IdentityCaps caps;
  caps.max_nodes = cfg.max_nodes;

  r["results"] = json::array();
  out.table.header = {"m", "eta", "delta", "identities_hold", "witnesses"};
  std::optional<BigInt> min_delta;
  bool all_hold = true;
  for (int m : cfg.ms) {
    const IdentityReport rep = verify_extremal_identities(g, w, m, caps);
    json ids = json::array();
    for (const auto& id : rep.identities)
      ids.push_back({{"pair", format_pair(g, id.pair)},
                     {"g_alt", to_string(id.g_alt)},
                     {"g_neighborhood", to_string(id.g_neighborhood)},
                     {"holds", id.holds}});
    json wit = json::array();
    for (const auto& gw : rep.witnesses)
      wit.push_back({{"tuple", format_tuple(g, gw.tuple)},
                     {"g", to_string(gw.g)},
                     {"g_neighborhood", to_string(gw.g_neighborhood)}});
    r["results"].push_back({{"m", m},
                            {"eta", to_string(rep.eta)},
                            {"target", to_string(rep.target)},
                            {"identities", ids},
                            {"identities_hold", rep.identities_hold},
                            {"delta", to_string(rep.delta)},
                            {"witnesses", wit},
                            {"witnesses_truncated", rep.witnesses_truncated},
                            {"trivial_bound_holds", rep.trivial_bound_holds},
                            {"tuples_evaluated", rep.tuples_evaluated},
                            {"nodes_visited", rep.nodes_visited}});
    out.table.rows.push_back({std::to_string(m), to_string(rep.eta), to_string(rep.delta),
                              rep.identities_hold ? "true" : "false", std::to_string(rep.witnesses.size())});
    all_hold = all_hold && rep.identities_hold && rep.trivial_bound_holds;
    if (!min_delta || rep.delta < *min_delta) min_delta = rep.delta;
  }
  r["min_delta"] = min_delta ? json(to_string(*min_delta)) : json(nullptr);
  r["all_hold"] = all_hold;
  if (!all_hold) out.exit_code = exit_status(ErrorCode::OracleMismatch);
  return out;
}

CommandOutput run_corpus(const RunConfig& cfg) {
  namespace fs = std::filesystem;
  if (cfg.dir.empty()) throw Error(ErrorCode::Config, "corpus needs --dir");
  if (!fs::is_directory(cfg.dir)) throw Error(ErrorCode::Config, "not a directory: " + cfg.dir);
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(cfg.dir))
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  struct Outcome {
    std::string status;
    std::string detail;
    std::string command;
  };
  std::vector<Outcome> outcomes(files.size());

  auto run_one = [&](std::size_t i) {
    Outcome& o = outcomes[i];
    try {
      std::ifstream in(files[i]);
      const json doc = json::parse(in);
      if (!doc.contains("settings")) throw Error(ErrorCode::Config, "missing \"settings\"");
      const RunConfig sub = RunConfig::from_settings(parse_settings_json(doc["settings"], files[i].string()));
      if (sub.command == "corpus") throw Error(ErrorCode::Config, "nested corpus");
      o.command = sub.command;
      const CommandOutput res = run_command(sub);
      if (cfg.write) {
        json updated = doc;
        updated["expected"] = res.result;
        std::ofstream(files[i]) << updated.dump(2) << '\n';
        o.status = "written";
      } else if (!doc.contains("expected")) {
        o.status = "missing";
        o.detail = "no \"expected\" section";
      } else if (doc["expected"] == res.result) {
        o.status = "pass";
      } else {
        o.status = "fail";
        o.detail = json::diff(doc["expected"], res.result).dump();
      }
    } catch (const std::exception& e) {
      o.status = "error";
      o.detail = e.what();
    }
  };

  const unsigned workers = std::min<unsigned>(worker_count(cfg.threads), std::max<std::size_t>(files.size(), 1));
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned k = 0; k < workers; ++k)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < files.size(); i = next++) run_one(i);
    });
  pool.clear();

  CommandOutput out;
  json& r = out.result;
  r["dir"] = cfg.dir;
  r["instances"] = json::array();
  out.table.header = {"file", "command", "status", "detail"};
  std::size_t passed = 0;
  std::size_t failed = 0;
  for (std::size_t i = 0; i < files.size(); ++i) {
    const Outcome& o = outcomes[i];
    const std::string name = files[i].filename().string();
    json rec = {{"file", name}, {"command", o.command}, {"status", o.status}};
    if (!o.detail.empty()) rec["detail"] = o.detail;
    r["instances"].push_back(rec);
    out.table.rows.push_back({name, o.command, o.status, o.detail});
    if (o.status == "pass" || o.status == "written") ++passed;
    else ++failed;
  }
  r["passed"] = passed;
  r["failed"] = failed;
  if (failed > 0) out.exit_code = exit_status(ErrorCode::OracleMismatch);
  return out;
}

CommandOutput run_command(const RunConfig& cfg) {
  if (cfg.command == "analyze") return run_analyze(cfg);
  if (cfg.command == "count") return run_count(cfg);
  if (cfg.command == "sample") return run_sample(cfg);
  if (cfg.command == "influence") return run_influence(cfg);
  if (cfg.command == "conjecture") return run_conjecture(cfg);
  if (cfg.command == "identities") return run_identities(cfg);
  if (cfg.command == "corpus") return run_corpus(cfg);
  throw Error(ErrorCode::Config, "unknown command '" + cfg.command + "'");
}

}  // namespace torushom::cli
