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

// Evaluation metrics and graph-size reporting.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gorag/corpus.hpp"
#include "gorag/graph_index.hpp"

namespace gorag {

struct Prediction {
  std::optional<LabelId> predicted;
  std::optional<LabelId> gold;
  bool hallucination = false;
  bool failed = false;
};

struct Metrics {
  std::size_t count = 0;
  double accuracy = 0.0;
  /// Mean per-class recall over the classes present among the gold labels.
  double macro_recall = 0.0;
  double hallucination_rate = 0.0;
  /// Real but wrong labels. accuracy + error_rate + hallucination_rate = 1.
  double error_rate = 0.0;
  /// Backend gave no reply; a subset of the hallucinations.
  double failure_rate = 0.0;
};

/// All rates are 0 for an empty input. Throws InvariantError when a
/// prediction has no gold label.
Metrics compute_metrics(std::span<const Prediction> predictions);

struct GraphCounts {
  std::size_t nodes = 0;
  std::size_t edges = 0;
  std::size_t keyword_nodes = 0;
  std::size_t label_nodes = 0;
  std::size_t keyword_label_edges = 0;
  std::size_t label_label_edges = 0;
  bool operator==(const GraphCounts&) const = default;
};

GraphCounts graph_counts(const WeightedGraph& graph);

/// One row of the offline-versus-online growth table.
struct GrowthRow {
  std::string name;  // "Round r" or "After R"
  GraphCounts offline;
  GraphCounts online;
};

/// Fixed-width text table: name, offline nodes/edges, online nodes/edges.
std::string growth_table(std::span<const GrowthRow> rows);

}  // namespace gorag
