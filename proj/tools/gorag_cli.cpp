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

#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gorag/classify.hpp"
#include "gorag/corpus.hpp"
#include "gorag/error.hpp"
#include "gorag/graph_index.hpp"
#include "gorag/harness.hpp"
#include "gorag/llm_gateway.hpp"
#include "gorag/log.hpp"
#include "gorag/metrics.hpp"
#include "gorag/retrieval.hpp"
#include "gorag/synthetic.hpp"

namespace {

using namespace gorag;
using json = nlohmann::json;

std::string read_input(const std::string& path) {
  if (path == "-") return {std::istreambuf_iterator<char>(std::cin), {}};
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& body) {
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << body;
}

// Backend flags shared by every subcommand that talks to a model.
struct BackendFlags {
  std::string backend;
  std::string endpoint;
  std::string model;
  double temperature = -1.0;
  std::string markers_file;
  double df_fraction = -1.0;

  void add(CLI::App* app) {
    app->add_option("--backend", backend, "Model backend")->check(CLI::IsMember({"http", "mock"}));
    app->add_option("--endpoint", endpoint, "Chat-completion endpoint URL");
    app->add_option("--model", model, "Model name");
    app->add_option("--temperature", temperature, "Sampling temperature")->check(CLI::Range(0.0, 2.0));
    app->add_option("--markers", markers_file, "Mock backend marker phrase file");
    app->add_option("--df-fraction", df_fraction, "Mock backend document-frequency cut-off");
  }

  void apply(RunConfig& c) const {
    if (!backend.empty()) c.backend = backend_from_string(backend);
    if (!endpoint.empty()) c.http.endpoint = endpoint;
    if (!model.empty()) c.http.model = model;
    if (temperature >= 0.0) c.http.temperature = temperature;
    if (!markers_file.empty()) c.mock.markers_file = markers_file;
    if (df_fraction >= 0.0) c.mock.df_fraction = df_fraction;
  }
};

RoundPlan plan_or_empty(const std::string& dataset) {
  return dataset.empty() ? RoundPlan{} : load_dataset(dataset);
}

// Statistics holding every training text of the dataset (if any) plus the
// label descriptions, approximating the state the graph was built with.
CorpusStats stats_for(const RoundPlan& plan) {
  CorpusStats stats;
  for (const auto& round : plan.rounds) {
    for (const auto& doc : round.train) stats.ingest(doc, {});
  }
  return stats;
}

LabelKeywords glosses_for(const WeightedGraph& graph, LlmGateway& gateway) {
  LabelKeywords out;
  for (const auto& label : graph.label_defs()) {
    if (label.name) out[label.id] = gateway.generate_label_keywords(label);
  }
  return out;
}

std::vector<std::string> query_keywords(const std::string& keywords, const std::string& text, LlmGateway& gateway) {
  if (!keywords.empty()) return parse_keyword_reply(keywords);
  return gateway.extract_keywords(read_input(text));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gorag: graph-based online retrieval for dynamic few-shot text classification"};
  app.set_version_flag("--version", std::string(GORAG_VERSION));
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  // run
  auto* run_cmd = app.add_subcommand("run", "Multi-round evaluation run from a config file");
  std::string config_path;
  std::string out_dir;
  std::string paths;
  std::string ablation;
  std::string eval_graph;
  BackendFlags run_backend;
  run_cmd->add_option("--config", config_path, "Run config (JSON)")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--output-dir", out_dir, "Override the output directory");
  run_cmd->add_option("--paths", paths, "Steiner path domain")->check(CLI::IsMember({"mst", "graph"}));
  run_cmd->add_option("--ablation", ablation, "Ablation variant")
      ->check(CLI::IsMember({"none", "offline", "unit", "keyword"}));
  run_cmd->add_option("--eval-graph", eval_graph, "Graph used for re-testing earlier rounds")
      ->check(CLI::IsMember({"round-end", "current"}));
  run_backend.add(run_cmd);

  // split
  auto* split_cmd = app.add_subcommand("split", "Assign round numbers to a flat labeled JSONL file");
  std::string split_in;
  std::string split_out;
  std::size_t split_rounds_n = 0;
  std::uint64_t split_seed = 0;
  std::vector<std::size_t> per_round;
  split_cmd->add_option("--input", split_in, "Flat labeled JSONL")->required();
  split_cmd->add_option("--output", split_out, "Round-annotated JSONL (default stdout)");
  split_cmd->add_option("--rounds", split_rounds_n, "Number of rounds")->required()->check(CLI::PositiveNumber);
  split_cmd->add_option("--seed", split_seed, "Shuffle seed");
  split_cmd->add_option("--labels-per-round", per_round, "Label count per round")->delimiter(',');

  // index
  auto* index_cmd = app.add_subcommand("index", "Build the weighted graph from a dataset's training texts");
  std::string index_dataset;
  std::string index_out;
  std::size_t index_k = 0;
  std::size_t index_rounds = 0;
  std::uint64_t index_seed = 0;
  int index_only = 0;
  BackendFlags index_backend;
  index_cmd->add_option("--dataset", index_dataset, "Round-annotated JSONL")->required();
  index_cmd->add_option("--output", index_out, "Graph file (default stdout)");
  index_cmd->add_option("--k-shot", index_k, "Training texts per label (0 = all)");
  index_cmd->add_option("--rounds", index_rounds, "Rounds to index (0 = all)");
  index_cmd->add_option("--seed", index_seed, "k-shot sampling seed");
  index_cmd->add_option("--round-only", index_only, "Write only this round's subgraph");
  index_backend.add(index_cmd);

  // merge
  auto* merge_cmd = app.add_subcommand("merge", "Merge a round subgraph into a graph");
  std::string merge_graph;
  std::string merge_next;
  std::string merge_out;
  merge_cmd->add_option("--graph", merge_graph, "Graph through round r-1")->required();
  merge_cmd->add_option("--next", merge_next, "Round-r subgraph")->required();
  merge_cmd->add_option("--output", merge_out, "Merged graph (default stdout)");

  // retrieve
  auto* retrieve_cmd = app.add_subcommand("retrieve", "Candidate labels for one text");
  std::string r_graph;
  std::string r_text = "-";
  std::string r_keywords;
  std::string r_dataset;
  std::string r_paths = "mst";
  bool r_unit = false;
  BackendFlags r_backend;
  retrieve_cmd->add_option("--graph", r_graph, "Graph file")->required();
  retrieve_cmd->add_option("--text", r_text, "Text file, or - for stdin");
  retrieve_cmd->add_option("--keywords", r_keywords, "Comma-separated keywords instead of extraction");
  retrieve_cmd->add_option("--dataset", r_dataset, "Dataset supplying the mock backend's background corpus");
  retrieve_cmd->add_option("--paths", r_paths, "Steiner path domain")->check(CLI::IsMember({"mst", "graph"}));
  retrieve_cmd->add_flag("--unit-weights", r_unit, "Every edge costs 1");
  r_backend.add(retrieve_cmd);

  // classify
  auto* classify_cmd = app.add_subcommand("classify", "Classify one text against a graph");
  std::string c_graph;
  std::string c_text = "-";
  std::string c_id = "query";
  std::string c_dataset;
  std::string c_save;
  std::string c_paths = "mst";
  std::string c_ablation = "none";
  BackendFlags c_backend;
  classify_cmd->add_option("--graph", c_graph, "Graph file")->required();
  classify_cmd->add_option("--text", c_text, "Text file, or - for stdin");
  classify_cmd->add_option("--id", c_id, "Text id used for online indexing");
  classify_cmd->add_option("--dataset", c_dataset, "Dataset whose training texts seed the statistics");
  classify_cmd->add_option("--save", c_save, "Write the graph after online indexing here");
  classify_cmd->add_option("--paths", c_paths, "Steiner path domain")->check(CLI::IsMember({"mst", "graph"}));
  classify_cmd->add_option("--ablation", c_ablation, "Ablation variant")
      ->check(CLI::IsMember({"none", "offline", "unit", "keyword"}));
  c_backend.add(classify_cmd);

  // graph-stats
  auto* stats_cmd = app.add_subcommand("graph-stats", "Node and edge counts");
  std::vector<std::string> s_graphs;
  std::string s_report;
  bool s_json = false;
  stats_cmd->add_option("--graph", s_graphs, "Graph files, one row each");
  stats_cmd->add_option("--report", s_report, "report.json of a run (offline and online side by side)");
  stats_cmd->add_flag("--json", s_json, "Print JSON instead of a table");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic planted-keyword dataset");
  SynthConfig sc;
  std::string synth_dir;
  synth_cmd->add_option("--output-dir", synth_dir, "Directory for dataset.jsonl and markers.txt")->required();
  synth_cmd->add_option("--labels", sc.labels, "Number of labels");
  synth_cmd->add_option("--rounds", sc.rounds, "Number of rounds");
  synth_cmd->add_option("--train-per-label", sc.train_per_label, "Training texts per label");
  synth_cmd->add_option("--test-per-label", sc.test_per_label, "Test texts per label");
  synth_cmd->add_option("--noise", sc.noise, "Probability of swapping a planted word")->check(CLI::Range(0.0, 1.0));
  synth_cmd->add_option("--seed", sc.seed, "Generator seed");

  CLI11_PARSE(app, argc, argv);
  if (verbose) set_log_level(LogLevel::info);

  try {
    if (*run_cmd) {
      auto cfg = RunConfig::load(config_path);
      run_backend.apply(cfg);
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (!paths.empty()) cfg.paths = path_domain_from_string(paths);
      if (!ablation.empty()) cfg.ablation = ablation_from_string(ablation);
      if (!eval_graph.empty()) cfg.eval_graph = eval_graph_from_string(eval_graph);
      const auto report = run(cfg);
      std::cout << report.to_text();
      if (!report.complete) {
        std::cerr << "gorag: run incomplete: " << report.error << "\n";
        return 1;
      }
      return 0;
    }

    if (*split_cmd) {
      write_output(split_out, split_rounds(read_input(split_in), split_rounds_n, split_seed, per_round));
      return 0;
    }

    if (*index_cmd) {
      RunConfig cfg;
      index_backend.apply(cfg);
      const auto full = load_dataset(index_dataset);
      auto plan = index_k > 0 ? sample_k_shot(full, index_k, index_seed) : full;
      if (index_rounds > 0 && index_rounds < plan.rounds.size()) plan.rounds.resize(index_rounds);
      auto gateway = make_gateway(cfg, full);
      CorpusStats stats;
      WeightedGraph graph;
      for (std::size_t ri = 0; ri < plan.rounds.size(); ++ri) {
        const int r = static_cast<int>(ri + 1);
        const auto& round = plan.rounds[ri];
        auto res = index_training_round(r, round.new_labels, round.train, stats, *gateway, graph);
        if (r == index_only) {
          write_output(index_out, graph_to_json(res.subgraph));
          return 0;
        }
        merge_round(graph, res.subgraph);
      }
      if (index_only != 0) throw Error("round " + std::to_string(index_only) + " is not in the dataset");
      write_output(index_out, graph_to_json(graph));
      return 0;
    }

    if (*merge_cmd) {
      auto graph = load_graph(merge_graph);
      merge_round(graph, load_graph(merge_next));
      write_output(merge_out, graph_to_json(graph));
      return 0;
    }

    if (*retrieve_cmd) {
      RunConfig cfg;
      r_backend.apply(cfg);
      const auto graph = load_graph(r_graph);
      auto gateway = make_gateway(cfg, plan_or_empty(r_dataset));
      const auto kws = query_keywords(r_keywords, r_text, *gateway);
      const auto terminals = split_keywords(graph, kws);
      RetrievalOptions opts{path_domain_from_string(r_paths), r_unit ? WeightMode::unit : WeightMode::stored};
      const auto result = steiner_candidates(graph, terminals, opts);
      std::cout << result_to_json(graph, terminals, result) << "\n";
      return 0;
    }

    if (*classify_cmd) {
      RunConfig cfg;
      c_backend.apply(cfg);
      auto graph = load_graph(c_graph);
      const auto plan = plan_or_empty(c_dataset);
      auto gateway = make_gateway(cfg, plan);
      auto stats = stats_for(plan);
      auto opts = ClassifyOptions::for_ablation(ablation_from_string(c_ablation), path_domain_from_string(c_paths));
      opts.commit = !c_save.empty();
      const auto glosses = glosses_for(graph, *gateway);
      const auto doc = TextDoc::make(c_id, read_input(c_text));
      const auto rec = classify_text(graph, stats, *gateway, doc, glosses, opts);
      std::cout << record_to_json(RunRecord{graph.round(), 0, false, rec}) << "\n";
      if (!c_save.empty()) save_graph(graph, c_save);
      return 0;
    }

    if (*stats_cmd) {
      std::vector<GrowthRow> rows;
      if (!s_report.empty()) {
        const auto j = json::parse(read_input(s_report));
        auto counts = [](const json& c) {
          GraphCounts g;
          g.nodes = c.at("nodes").get<std::size_t>();
          g.edges = c.at("edges").get<std::size_t>();
          g.keyword_nodes = c.at("keyword_nodes").get<std::size_t>();
          g.label_nodes = c.at("label_nodes").get<std::size_t>();
          g.keyword_label_edges = c.at("keyword_label_edges").get<std::size_t>();
          g.label_label_edges = c.at("label_label_edges").get<std::size_t>();
          return g;
        };
        for (const auto& row : j.at("graph_growth")) {
          rows.push_back({row.at("name").get<std::string>(), counts(row.at("offline")), counts(row.at("online"))});
        }
      }
      for (const auto& path : s_graphs) {
        const auto g = load_graph(path);
        const auto c = graph_counts(g);
        rows.push_back({"Round " + std::to_string(g.round()), c, c});
      }
      if (rows.empty()) throw Error("graph-stats needs --graph or --report");
      if (s_json) {
        json out = json::array();
        for (const auto& r : rows) {
          out.push_back({{"name", r.name},
                         {"offline", {{"nodes", r.offline.nodes}, {"edges", r.offline.edges}}},
                         {"online", {{"nodes", r.online.nodes}, {"edges", r.online.edges}}}});
        }
        std::cout << out.dump(2) << "\n";
      } else {
        std::cout << growth_table(rows);
      }
      return 0;
    }

    if (*synth_cmd) {
      write_synthetic(make_synthetic(sc), synth_dir);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "gorag: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
