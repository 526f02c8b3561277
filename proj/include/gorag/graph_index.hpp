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

// Weighted keyword/label graph.
//
// Keyword-label edges carry the list of (text, correlation score) pairs
// that produced them; their weight is always the mean of (1 - score) over
// that list, so it can be re-derived from a saved graph. Scores are frozen
// when an occurrence is recorded. Label-label edges are the connectivity
// edges added when a round is merged.
//
// A keyword whose normalized form equals a label's id or name resolves to
// that label node and never becomes a keyword node.

#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "gorag/corpus.hpp"

namespace gorag {

class LlmGateway;

enum class NodeKind : std::uint8_t { keyword, label };
enum class EdgeKind : std::uint8_t { keyword_label, label_label };

std::string_view to_string(NodeKind kind);
std::string_view to_string(EdgeKind kind);

enum class NodeId : std::uint32_t {};
constexpr std::uint32_t index(NodeId id) { return static_cast<std::uint32_t>(id); }

struct NodeRef {
  NodeKind kind;
  std::string key;

  // Lexicographic on key first; this is the tie-break order everywhere.
  std::strong_ordering operator<=>(const NodeRef& o) const {
    if (auto c = key <=> o.key; c != 0) return c;
    return kind <=> o.kind;
  }
  bool operator==(const NodeRef&) const = default;
};

struct Occurrence {
  TextId text;
  double cs = 0.0;
  bool operator==(const Occurrence&) const = default;
};

struct EdgeRecord {
  NodeId a{};  // a < b by node id
  NodeId b{};
  EdgeKind kind = EdgeKind::keyword_label;
  double weight = 0.0;
  std::vector<Occurrence> occurrences;  // keyword_label only
  bool operator==(const EdgeRecord&) const = default;
};

struct NodeRecord {
  NodeRef ref;
  std::optional<std::string> label_name;  // label nodes
  int round_introduced = 0;               // label nodes
  bool operator==(const NodeRecord&) const = default;
};

struct Neighbor {
  NodeId node;
  std::uint32_t edge;
};

class WeightedGraph {
 public:
  WeightedGraph() = default;

  int round() const { return round_; }
  void set_round(int r) { round_ = r; }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<NodeRecord>& nodes() const { return nodes_; }
  const std::vector<EdgeRecord>& edges() const { return edges_; }
  const NodeRecord& node(NodeId id) const { return nodes_[index(id)]; }
  const EdgeRecord& edge(std::uint32_t e) const { return edges_[e]; }
  std::span<const Neighbor> neighbors(NodeId id) const { return adjacency_[index(id)]; }

  /// Label node ids in insertion order.
  const std::vector<NodeId>& labels() const { return labels_; }
  std::vector<LabelDef> label_defs() const;
  std::optional<NodeId> find_label(const LabelId& id) const;
  std::optional<NodeId> find_keyword(std::string_view keyword) const;

  /// Node a normalized keyword maps to: a label when it equals a label id or
  /// normalized name, otherwise the keyword node if present.
  std::optional<NodeId> resolve(std::string_view keyword) const;

  /// True when the keyword equals some label's id or normalized name.
  bool names_label(std::string_view keyword) const;

  /// Throws InvariantError if the label id is already present.
  NodeId add_label(const LabelDef& label);
  /// Returns the existing node when present.
  NodeId add_keyword(std::string_view keyword);

  /// Appends an occurrence to the keyword-label edge (creating it) and
  /// re-averages its weight.
  std::uint32_t add_occurrence(NodeId keyword, NodeId label, Occurrence occ);

  /// Creates or overwrites a label-label edge.
  std::uint32_t set_label_edge(NodeId a, NodeId b, double weight);

  std::optional<std::uint32_t> find_edge(NodeId a, NodeId b) const;

  /// Number of keyword nodes adjacent to the label (|M_y|) and the sum of
  /// their edge weights.
  std::pair<std::size_t, double> keyword_neighborhood(NodeId label) const;

  bool operator==(const WeightedGraph& o) const {
    return round_ == o.round_ && nodes_ == o.nodes_ && edges_ == o.edges_;
  }

  /// Rebuilds lookup tables from nodes/edges (used by the loader).
  static WeightedGraph from_parts(int round, std::vector<NodeRecord> nodes, std::vector<EdgeRecord> edges);

 private:
  static std::uint64_t pair_key(NodeId a, NodeId b);
  NodeId push_node(NodeRecord rec);
  std::uint32_t push_edge(EdgeRecord rec);

  int round_ = 0;
  std::vector<NodeRecord> nodes_;
  std::vector<EdgeRecord> edges_;
  std::vector<std::vector<Neighbor>> adjacency_;
  std::vector<NodeId> labels_;
  std::unordered_map<std::string, NodeId> keyword_index_;
  std::unordered_map<std::string, NodeId> label_index_;
  std::unordered_map<std::string, NodeId> label_alias_;  // normalized id and name
  std::unordered_map<std::uint64_t, std::uint32_t> edge_index_;
};

/// (count(v,t)/|t|) * ln(|T| / (1 + df(v))), clamped to [0, 1].
/// Throws InvariantError when t is not in the statistics.
double correlation_score(std::string_view keyword, const TextId& text, const CorpusStats& stats);

/// Weight of the label-label edge between y_new and y_old: the mean of the
/// two labels' half-terms sum(w)/(2|M|), 0.5 for a label with no keywords.
double connectivity_weight(const WeightedGraph& g, NodeId y_new, NodeId y_old);

/// Keywords generated for each label from its description (K_y).
using LabelKeywords = std::unordered_map<LabelId, std::vector<std::string>>;

/// Pseudo-text id under which a label description enters the statistics.
std::string description_text_id(const LabelId& label);

struct IndexRoundResult {
  WeightedGraph subgraph;
  LabelKeywords label_keywords;
  std::size_t failed_extractions = 0;
};

/// Builds the round-r subgraph from its training texts (and label
/// descriptions when labels are named). Every training text and
/// description is ingested into `stats` before any score is computed.
/// `previous` is consulted so keywords naming older labels are not
/// indexed as keywords.
IndexRoundResult index_training_round(int round, std::span<const LabelDef> new_labels,
                                      std::span<const TextDoc> train, CorpusStats& stats, LlmGateway& gateway,
                                      const WeightedGraph& previous);

/// Unions `next` into `graph` and adds a connectivity edge for every
/// (new label, old label) pair. Requires next.round() == graph.round() + 1
/// and disjoint label sets.
void merge_round(WeightedGraph& graph, const WeightedGraph& next);

/// Online insertion for a classified query text: each keyword gains an
/// occurrence on its edge to `predicted` (new keyword nodes for unseen
/// keywords). Returns false and leaves the graph untouched when
/// `predicted` is not a label in the graph.
bool online_index(WeightedGraph& graph, const TextId& text, std::span<const std::string> exist,
                  std::span<const std::string> not_exist, const LabelId& predicted, const CorpusStats& stats);

inline constexpr int kGraphSchemaVersion = 1;

void save_graph(const WeightedGraph& graph, const std::string& path);
WeightedGraph load_graph(const std::string& path);
std::string graph_to_json(const WeightedGraph& graph);
WeightedGraph graph_from_json(std::string_view text);

}  // namespace gorag
