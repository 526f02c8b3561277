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

// Multi-round evaluation runs: configuration, the round loop and reports.
//
// Config file (JSON, unknown keys rejected, relative paths resolved against
// the file's directory):
//
//   {
//     "dataset": "data.jsonl",        round-annotated JSONL (required)
//     "k_shot": 5,                    0 = zero-shot from label names
//     "rounds": 0,                    0 = every round in the dataset
//     "seed": 0,
//     "backend": "mock",              "mock" or "http"
//     "http": {"endpoint", "model", "temperature", "max_tokens",
//              "timeout_ms", "retries", "retry_backoff_ms",
//              "max_in_flight", "max_prompt_chars", "api_key_env"},
//     "mock": {"df_fraction", "markers": [...], "markers_file",
//              "hallucination_rate"},
//     "ablation": "none",             none | offline | unit | keyword
//     "paths": "mst",                 mst | graph
//     "eval_graph": "round-end",      round-end | current
//     "workers": 1,
//     "output_dir": "out",
//     "audit_log": false
//   }

#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "gorag/classify.hpp"
#include "gorag/corpus.hpp"
#include "gorag/graph_index.hpp"
#include "gorag/llm_gateway.hpp"
#include "gorag/metrics.hpp"

namespace gorag {

/// Graph used when earlier rounds' test texts are evaluated again.
enum class EvalGraph {
  round_end,  // the graph at the end of the round, read-only
  current,    // same graph, and the re-tests run online indexing too
};

std::string_view to_string(EvalGraph e);
EvalGraph eval_graph_from_string(std::string_view name);

struct MockSettings {
  double df_fraction = 0.1;
  std::vector<std::string> markers;
  std::string markers_file;
  double hallucination_rate = 0.0;
};

struct RunConfig {
  std::string dataset;
  std::size_t k_shot = 5;
  std::size_t rounds = 0;
  std::uint64_t seed = 0;
  BackendKind backend = BackendKind::mock;
  BackendConfig http;
  MockSettings mock;
  Ablation ablation = Ablation::none;
  PathDomain paths = PathDomain::mst;
  EvalGraph eval_graph = EvalGraph::round_end;
  std::size_t workers = 1;
  std::string output_dir;
  bool audit_log = false;

  /// Throws ParseError on malformed or unknown fields.
  static RunConfig from_json(std::string_view text, const std::string& base_dir = "");
  static RunConfig load(const std::string& path);
  std::string to_json() const;
};

struct RoundReport {
  int round = 0;
  std::size_t labels = 0;      // |Y^r|
  std::size_t new_labels = 0;  // |Y^r_new|
  std::size_t train_texts = 0;
  Metrics metrics;  // every test text of rounds 1..r evaluated in round r
  double mean_candidates = 0.0;
  std::size_t fallbacks = 0;
  GraphCounts offline;  // after the round's merge
  GraphCounts online;
  // Timings; kept out of the deterministic report.
  double index_seconds = 0.0;
  double mean_retrieval_ms = 0.0;
  double mean_llm_ms = 0.0;
};

struct RunRecord {
  int eval_round = 0;
  int text_round = 0;
  bool retest = false;
  ClassifyRecord record;
};

struct RunReport {
  RunConfig config;
  std::vector<RoundReport> rounds;
  Metrics overall;  // every classification call of the run
  GraphCounts final_offline;
  GraphCounts final_online;
  bool complete = false;
  std::string error;
  std::vector<RunRecord> records;
  WeightedGraph graph;  // final online graph

  std::vector<GrowthRow> growth_rows() const;
  /// Deterministic: no timings.
  std::string to_json() const;
  std::string to_text() const;
  std::string timing_json() const;
};

std::string record_to_json(const RunRecord& r);

/// Backend named by the config. The mock's background corpus is `plan`.
std::unique_ptr<LlmGateway> make_gateway(const RunConfig& config, const RoundPlan& plan);

/// Loads the dataset, builds the backend, runs, and writes the outputs
/// when output_dir is set.
RunReport run(const RunConfig& config);

/// Round loop over an already loaded plan. Errors are caught and returned
/// as an incomplete report. When `results_path` is non-empty, records are
/// streamed there as JSONL as they complete.
RunReport run(const RunConfig& config, const RoundPlan& plan, LlmGateway& gateway,
              const std::string& results_path = "");

/// report.json, report.txt, timing.json and graph.json under `dir`.
void write_report(const RunReport& report, const std::string& dir);

}  // namespace gorag
