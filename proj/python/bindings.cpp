/*
 * Copyright 2026 The gorag Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gorag/classify.hpp"
#include "gorag/corpus.hpp"
#include "gorag/error.hpp"
#include "gorag/graph_index.hpp"
#include "gorag/harness.hpp"
#include "gorag/metrics.hpp"
#include "gorag/retrieval.hpp"
#include "gorag/synthetic.hpp"

namespace py = pybind11;
using namespace gorag;

namespace {

py::dict counts_dict(const GraphCounts& c) {
  py::dict d;
  d["nodes"] = c.nodes;
  d["edges"] = c.edges;
  d["keyword_nodes"] = c.keyword_nodes;
  d["label_nodes"] = c.label_nodes;
  d["keyword_label_edges"] = c.keyword_label_edges;
  d["label_label_edges"] = c.label_label_edges;
  return d;
}

std::string retrieve(const WeightedGraph& g, const std::vector<std::string>& keywords, const std::string& paths,
                     bool unit_weights) {
  std::vector<std::string> normalized;
  for (const auto& k : keywords) normalized.push_back(normalize_phrase(k));
  const auto terminals = split_keywords(g, normalized);
  RetrievalOptions opts{path_domain_from_string(paths), unit_weights ? WeightMode::unit : WeightMode::stored};
  return result_to_json(g, terminals, steiner_candidates(g, terminals, opts));
}

std::string retrieve_exact(const WeightedGraph& g, const std::vector<std::string>& keywords, bool unit_weights) {
  std::vector<std::string> normalized;
  for (const auto& k : keywords) normalized.push_back(normalize_phrase(k));
  const auto terminals = split_keywords(g, normalized);
  return result_to_json(g, terminals, steiner_exact(g, terminals, unit_weights ? WeightMode::unit : WeightMode::stored));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Graph-based online retrieval for dynamic few-shot text classification";
  m.attr("__version__") = GORAG_VERSION;

  auto base = py::register_exception<Error>(m, "Error");
  py::register_exception<ParseError>(m, "ParseError", base.ptr());
  py::register_exception<InvariantError>(m, "InvariantError", base.ptr());
  py::register_exception<TransportError>(m, "TransportError", base.ptr());
  py::register_exception<DisconnectedGraphError>(m, "DisconnectedGraphError", base.ptr());

  m.def("tokenize", [](const std::string& s) { return tokenize(s); }, py::arg("text"));
  m.def("normalize_phrase", [](const std::string& s) { return normalize_phrase(s); }, py::arg("phrase"));

  py::class_<WeightedGraph>(m, "Graph")
      .def_static("load", &load_graph, py::arg("path"))
      .def_static("from_json", [](const std::string& s) { return graph_from_json(s); }, py::arg("text"))
      .def("to_json", [](const WeightedGraph& g) { return graph_to_json(g); })
      .def("save", [](const WeightedGraph& g, const std::string& path) { save_graph(g, path); }, py::arg("path"))
      .def_property_readonly("round", &WeightedGraph::round)
      .def_property_readonly("node_count", &WeightedGraph::node_count)
      .def_property_readonly("edge_count", &WeightedGraph::edge_count)
      .def("labels",
           [](const WeightedGraph& g) {
             std::vector<std::string> out;
             for (const auto& l : g.label_defs()) out.push_back(l.id);
             return out;
           })
      .def("stats", [](const WeightedGraph& g) { return counts_dict(graph_counts(g)); })
      .def("__eq__", [](const WeightedGraph& a, const WeightedGraph& b) { return a == b; });

  m.def("_steiner_candidates", &retrieve, py::arg("graph"), py::arg("keywords"), py::arg("paths") = "mst",
        py::arg("unit_weights") = false);
  m.def("_steiner_exact", &retrieve_exact, py::arg("graph"), py::arg("keywords"), py::arg("unit_weights") = false);

  m.def(
      "compute_metrics",
      [](const std::vector<std::optional<std::string>>& predicted, const std::vector<std::optional<std::string>>& gold,
         const std::vector<bool>& hallucination) {
        if (predicted.size() != gold.size() || predicted.size() != hallucination.size()) {
          throw InvariantError("compute_metrics: argument lengths differ");
        }
        std::vector<Prediction> preds;
        for (std::size_t i = 0; i < predicted.size(); ++i) {
          preds.push_back(Prediction{predicted[i], gold[i], hallucination[i], false});
        }
        const auto mt = compute_metrics(preds);
        py::dict d;
        d["count"] = mt.count;
        d["accuracy"] = mt.accuracy;
        d["macro_recall"] = mt.macro_recall;
        d["hallucination_rate"] = mt.hallucination_rate;
        d["error_rate"] = mt.error_rate;
        return d;
      },
      py::arg("predicted"), py::arg("gold"), py::arg("hallucination"));

  m.def(
      "_run",
      [](const std::string& config_json, const std::string& base_dir) {
        RunReport report;
        {
          py::gil_scoped_release release;
          report = run(RunConfig::from_json(config_json, base_dir));
        }
        return py::make_tuple(report.complete, report.to_json());
      },
      py::arg("config_json"), py::arg("base_dir") = "");

  m.def(
      "synth",
      [](const std::string& output_dir, std::size_t labels, std::size_t rounds, std::size_t train_per_label,
         std::size_t test_per_label, double noise, std::uint64_t seed) {
        SynthConfig c;
        c.labels = labels;
        c.rounds = rounds;
        c.train_per_label = train_per_label;
        c.test_per_label = test_per_label;
        c.noise = noise;
        c.seed = seed;
        write_synthetic(make_synthetic(c), output_dir);
      },
      py::arg("output_dir"), py::arg("labels") = 20, py::arg("rounds") = 4, py::arg("train_per_label") = 10,
      py::arg("test_per_label") = 8, py::arg("noise") = 0.0, py::arg("seed") = 7);
}
