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

#include "gorag/metrics.hpp"

#include <cstdio>
#include <map>

#include "gorag/error.hpp"

namespace gorag {

Metrics compute_metrics(std::span<const Prediction> predictions) {
  Metrics m;
  m.count = predictions.size();
  if (predictions.empty()) return m;

  std::size_t correct = 0;
  std::size_t hallucinated = 0;
  std::size_t wrong = 0;
  std::size_t failed = 0;
  std::map<LabelId, std::pair<std::size_t, std::size_t>> per_class;  // hits, total
  for (const auto& p : predictions) {
    if (!p.gold) throw InvariantError("metrics: prediction without a gold label");
    const bool hit = !p.hallucination && p.predicted && *p.predicted == *p.gold;
    correct += hit;
    hallucinated += p.hallucination;
    wrong += !hit && !p.hallucination;
    failed += p.failed;
    auto& c = per_class[*p.gold];
    c.first += hit;
    ++c.second;
  }
  const auto n = static_cast<double>(predictions.size());
  m.accuracy = static_cast<double>(correct) / n;
  m.hallucination_rate = static_cast<double>(hallucinated) / n;
  m.error_rate = static_cast<double>(wrong) / n;
  m.failure_rate = static_cast<double>(failed) / n;
  double recall_sum = 0.0;
  for (const auto& [label, c] : per_class) recall_sum += static_cast<double>(c.first) / static_cast<double>(c.second);
  m.macro_recall = recall_sum / static_cast<double>(per_class.size());
  return m;
}

GraphCounts graph_counts(const WeightedGraph& graph) {
  GraphCounts c;
  c.nodes = graph.node_count();
  c.edges = graph.edge_count();
  c.label_nodes = graph.labels().size();
  c.keyword_nodes = c.nodes - c.label_nodes;
  for (const auto& e : graph.edges()) {
    if (e.kind == EdgeKind::label_label) {
      ++c.label_label_edges;
    } else {
      ++c.keyword_label_edges;
    }
  }
  return c;
}

std::string growth_table(std::span<const GrowthRow> rows) {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %14s %14s %14s %14s\n", "", "offline nodes", "offline edges", "online nodes",
                "online edges");
  out += buf;
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%-10s %14zu %14zu %14zu %14zu\n", r.name.c_str(), r.offline.nodes, r.offline.edges,
                  r.online.nodes, r.online.edges);
    out += buf;
  }
  return out;
}

}  // namespace gorag
