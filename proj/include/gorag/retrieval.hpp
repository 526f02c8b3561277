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

// Candidate-label retrieval: query keywords are mapped onto the graph, a
// Steiner tree is grown over the ones that exist, and the label nodes in
// that tree become the candidate set.

#pragma once

#include <span>
#include <string>
#include <vector>

#include "gorag/graph_index.hpp"
#include "gorag/steiner.hpp"

namespace gorag {

using steiner::PathDomain;

enum class WeightMode {
  stored,  // edge weights as indexed
  unit,    // every edge costs 1
};

struct RetrievalOptions {
  PathDomain paths = PathDomain::mst;
  WeightMode weights = WeightMode::stored;
};

std::string_view to_string(PathDomain domain);
PathDomain path_domain_from_string(std::string_view name);

struct TerminalSet {
  std::vector<std::string> exist;      // keywords that map onto graph nodes
  std::vector<std::string> not_exist;  // keywords absent from the graph
  std::vector<NodeId> nodes;           // distinct nodes of `exist`, first-seen order
};

/// Partitions keywords by graph membership. A keyword naming a label counts
/// as existing. Duplicates are dropped.
TerminalSet split_keywords(const WeightedGraph& graph, std::span<const std::string> keywords);

enum class Fallback {
  none,
  label_neighbors,  // tree held no label; nearest labels of the terminals used
  full_label_set,   // nothing usable; the caller should offer every label
};

std::string_view to_string(Fallback f);

struct TreeEdge {
  NodeId a{};
  NodeId b{};
  double weight = 0.0;
};

struct SteinerResult {
  std::vector<NodeId> tree_nodes;  // NodeRef order
  std::vector<TreeEdge> tree_edges;
  double total_cost = 0.0;
  std::vector<LabelId> candidates;  // ascending incident tree cost, then label id
  Fallback fallback = Fallback::none;
};

/// Cost-graph view of the weighted graph. Node i is NodeId i; ranks follow
/// NodeRef ordering.
steiner::CostGraph cost_graph(const WeightedGraph& graph, WeightMode mode = WeightMode::stored);

/// On a disconnected graph (a first round has no label-label edges) one
/// tree is grown per component holding terminals and the trees are united.
SteinerResult steiner_candidates(const WeightedGraph& graph, const TerminalSet& terminals,
                                 const RetrievalOptions& options = {});

/// Optimal tree; graphs of at most steiner::kExactNodeLimit nodes.
SteinerResult steiner_exact(const WeightedGraph& graph, const TerminalSet& terminals,
                            WeightMode mode = WeightMode::stored);

/// {"candidates": [...], "total_cost": c, "fallback": "...", "tree_nodes": [...],
///  "tree_edges": [[a, b, w], ...], "terminals": {...}}
std::string result_to_json(const WeightedGraph& graph, const TerminalSet& terminals, const SteinerResult& result);

}  // namespace gorag
