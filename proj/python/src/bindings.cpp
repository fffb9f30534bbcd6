#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "commands.hpp"
#include "run_config.hpp"
#include "torushom/analysis.hpp"
#include "torushom/errors.hpp"
#include "torushom/exact.hpp"
#include "torushom/graph_io.hpp"
#include "torushom/sampler.hpp"

namespace py = pybind11;
using namespace torushom;

namespace {

WeightedGraph load(const std::string& h, const std::optional<std::string>& weights) {
  WeightedGraph wg = load_graph(h);
  if (weights) wg.weights = parse_weight_list(*weights, wg.graph.num_colors());
  return wg;
}

std::vector<std::string> strings(const std::vector<Rational>& v) {
  std::vector<std::string> out;
  for (const auto& r : v) out.push_back(to_string(r));
  return out;
}

Vertex vertex_of(const TorusGraph& t, const std::vector<int>& coords) {
  if (static_cast<int>(coords.size()) != t.dim())
    throw Error(ErrorCode::OutOfRange, "expected " + std::to_string(t.dim()) + " coordinates");
  for (int c : coords)
    if (c < 0 || c >= t.side()) throw Error(ErrorCode::OutOfRange, "coordinate out of range");
  return t.encode(coords);
}

}  // namespace

PYBIND11_MODULE(_torushom, m) {
  m.doc() = "Weighted H-colorings of even discrete tori (native core)";

  static py::exception<Error> error(m, "Error");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      // args = (code name, message)
      PyErr_SetObject(error.ptr(), py::make_tuple(error_name(e.code()), e.what()).ptr());
    }
  });

  m.def(
      "maximal_pairs",
      [](const std::string& h, std::optional<std::string> weights) {
        const auto wg = load(h, weights);
        const auto ex = eta_and_maximal_pairs(wg.graph, wg.weights);
        std::vector<std::pair<std::vector<Color>, std::vector<Color>>> pairs;
        for (const auto& p : ex.pairs) pairs.emplace_back(p.a.members(), p.b.members());
        return py::make_tuple(to_string(ex.eta), pairs, std::string(to_string(classify_equipartition(wg.graph, wg.weights, ex))));
      },
      py::arg("h"), py::arg("weights") = py::none(),
      "(eta, [(A, B), ...], equipartition class) with colors as 0-based indices.");

  m.def(
      "partition_function",
      [](const std::string& h, int md, int d, std::optional<std::string> weights, const std::string& method) {
        const auto wg = load(h, weights);
        const TorusGraph t(md, d);
        PartitionFunctionResult res;
        if (method == "brute") res = brute_force_partition_function(t, wg.graph, wg.weights);
        else if (method == "transfer") res = transfer_matrix_partition_function(t, wg.graph, wg.weights);
        else if (method == "auto") res = partition_function(t, wg.graph, wg.weights);
        else throw Error(ErrorCode::Config, "method must be auto, brute or transfer");
        return to_string(res.z);
      },
      py::arg("h"), py::arg("m"), py::arg("d"), py::arg("weights") = py::none(), py::arg("method") = "auto",
      "Exact Z as a 'p/q' string.");

  m.def(
      "exact_occupation",
      [](const std::string& h, int md, int d, const std::vector<int>& x,
         std::optional<std::pair<std::vector<int>, int>> pin, std::optional<std::string> weights) {
        const auto wg = load(h, weights);
        const TorusGraph t(md, d);
        std::optional<Pin> condition;
        if (pin) {
          if (pin->second < 0 || pin->second >= static_cast<int>(wg.graph.num_colors()))
            throw Error(ErrorCode::OutOfRange, "pinned color out of range");
          condition = Pin{vertex_of(t, pin->first), static_cast<Color>(pin->second)};
        }
        return strings(exact_occupation(t, wg.graph, wg.weights, vertex_of(t, x), condition));
      },
      py::arg("h"), py::arg("m"), py::arg("d"), py::arg("x"), py::arg("pin") = py::none(),
      py::arg("weights") = py::none());

  m.def(
      "conditional_target",
      [](const std::string& h, const std::string& relation, int l, std::optional<std::string> weights) {
        const auto wg = load(h, weights);
        if (l < 0 || l >= static_cast<int>(wg.graph.num_colors())) throw Error(ErrorCode::OutOfRange, "color out of range");
        Relation rel;
        if (relation == "same") rel = Relation::SameSide;
        else if (relation == "cross") rel = Relation::CrossSide;
        else throw Error(ErrorCode::Config, "relation must be 'same' or 'cross'");
        return strings(theorem_conditional_vector(wg.graph, wg.weights, rel, static_cast<Color>(l)));
      },
      py::arg("h"), py::arg("relation"), py::arg("l"), py::arg("weights") = py::none());

  m.def(
      "occupation_target",
      [](const std::string& h, std::optional<std::string> weights) {
        const auto wg = load(h, weights);
        return strings(theorem_occupation_vector(wg.graph, wg.weights, Side::Even));
      },
      py::arg("h"), py::arg("weights") = py::none());

  m.def("f_q", [](int q, int d) { return to_string(conjecture_f_q(q, d)); }, py::arg("q"), py::arg("d"));
  m.def("splitmix64", &splitmix64, py::arg("x"));

  m.def(
      "run",
      [](const std::string& command, const std::map<std::string, std::string>& settings) {
        cli::Settings s(settings.begin(), settings.end());
        s["command"] = command;
        const auto cfg = cli::RunConfig::from_settings(s);
        cli::CommandOutput out;
        {
          py::gil_scoped_release release;
          out = cli::run_command(cfg);
        }
        return py::make_tuple(out.result.dump(), out.exit_code);
      },
      py::arg("command"), py::arg("settings"),
      "Runs a CLI command; returns (result JSON text, exit code).");
}
