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

#include "gorag/graph_index.hpp"

#include <algorithm>
#include <cmath>

#include "gorag/error.hpp"
#include "gorag/llm_gateway.hpp"
#include "gorag/log.hpp"

namespace gorag {

std::string_view to_string(NodeKind kind) { return kind == NodeKind::label ? "label" : "keyword"; }
std::string_view to_string(EdgeKind kind) { return kind == EdgeKind::label_label ? "label_label" : "keyword_label"; }

std::uint64_t WeightedGraph::pair_key(NodeId a, NodeId b) {
  auto lo = std::min(index(a), index(b));
  auto hi = std::max(index(a), index(b));
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

NodeId WeightedGraph::push_node(NodeRecord rec) {
  const NodeId id{static_cast<std::uint32_t>(nodes_.size())};
  if (rec.ref.kind == NodeKind::label) {
    label_index_.emplace(rec.ref.key, id);
    labels_.push_back(id);
    for (const auto* alias : {&rec.ref.key, rec.label_name ? &*rec.label_name : nullptr}) {
      if (!alias) continue;
      auto norm = normalize_phrase(*alias);
      if (!norm.empty()) label_alias_.try_emplace(std::move(norm), id);
    }
  } else {
    keyword_index_.emplace(rec.ref.key, id);
  }
  nodes_.push_back(std::move(rec));
  adjacency_.emplace_back();
  return id;
}

std::uint32_t WeightedGraph::push_edge(EdgeRecord rec) {
  if (rec.a == rec.b) throw InvariantError("self-loop on node '" + node(rec.a).ref.key + "'");
  if (index(rec.a) > index(rec.b)) std::swap(rec.a, rec.b);
  const auto e = static_cast<std::uint32_t>(edges_.size());
  edge_index_.emplace(pair_key(rec.a, rec.b), e);
  adjacency_[index(rec.a)].push_back({rec.b, e});
  adjacency_[index(rec.b)].push_back({rec.a, e});
  edges_.push_back(std::move(rec));
  return e;
}

std::vector<LabelDef> WeightedGraph::label_defs() const {
  std::vector<LabelDef> out;
  out.reserve(labels_.size());
  for (auto id : labels_) {
    const auto& n = node(id);
    out.push_back(LabelDef{n.ref.key, n.label_name, n.round_introduced});
  }
  return out;
}

std::optional<NodeId> WeightedGraph::find_label(const LabelId& id) const {
  auto it = label_index_.find(id);
  if (it == label_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> WeightedGraph::find_keyword(std::string_view keyword) const {
  auto it = keyword_index_.find(std::string(keyword));
  if (it == keyword_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<NodeId> WeightedGraph::resolve(std::string_view keyword) const {
  if (auto it = label_alias_.find(std::string(keyword)); it != label_alias_.end()) return it->second;
  return find_keyword(keyword);
}

bool WeightedGraph::names_label(std::string_view keyword) const {
  return label_alias_.contains(std::string(keyword));
}

NodeId WeightedGraph::add_label(const LabelDef& label) {
  if (label_index_.contains(label.id)) throw InvariantError("label '" + label.id + "' already in graph");
  return push_node(NodeRecord{NodeRef{NodeKind::label, label.id}, label.name, label.round_introduced});
}

NodeId WeightedGraph::add_keyword(std::string_view keyword) {
  if (keyword.empty()) throw InvariantError("empty keyword");
  if (auto existing = find_keyword(keyword)) return *existing;
  return push_node(NodeRecord{NodeRef{NodeKind::keyword, std::string(keyword)}, std::nullopt, 0});
}

std::optional<std::uint32_t> WeightedGraph::find_edge(NodeId a, NodeId b) const {
  auto it = edge_index_.find(pair_key(a, b));
  if (it == edge_index_.end()) return std::nullopt;
  return it->second;
}

std::uint32_t WeightedGraph::add_occurrence(NodeId keyword, NodeId label, Occurrence occ) {
  if (node(keyword).ref.kind != NodeKind::keyword || node(label).ref.kind != NodeKind::label) {
    throw InvariantError("occurrences belong on keyword-label edges");
  }
  if (!(occ.cs >= 0.0 && occ.cs <= 1.0)) throw InvariantError("correlation score outside [0, 1]");
  std::uint32_t e;
  if (auto found = find_edge(keyword, label)) {
    e = *found;
  } else {
    e = push_edge(EdgeRecord{keyword, label, EdgeKind::keyword_label, 0.0, {}});
  }
  auto& rec = edges_[e];
  rec.occurrences.push_back(std::move(occ));
  double sum = 0.0;
  for (const auto& o : rec.occurrences) sum += 1.0 - o.cs;
  rec.weight = sum / static_cast<double>(rec.occurrences.size());
  return e;
}

std::uint32_t WeightedGraph::set_label_edge(NodeId a, NodeId b, double weight) {
  if (node(a).ref.kind != NodeKind::label || node(b).ref.kind != NodeKind::label) {
    throw InvariantError("label edges join two label nodes");
  }
  if (auto found = find_edge(a, b)) {
    edges_[*found].weight = weight;
    return *found;
  }
  return push_edge(EdgeRecord{a, b, EdgeKind::label_label, weight, {}});
}

std::pair<std::size_t, double> WeightedGraph::keyword_neighborhood(NodeId label) const {
  std::size_t n = 0;
  double sum = 0.0;
  for (const auto& nb : neighbors(label)) {
    if (node(nb.node).ref.kind != NodeKind::keyword) continue;
    ++n;
    sum += edges_[nb.edge].weight;
  }
  return {n, sum};
}

WeightedGraph WeightedGraph::from_parts(int round, std::vector<NodeRecord> nodes, std::vector<EdgeRecord> edges) {
  WeightedGraph g;
  g.round_ = round;
  for (auto& n : nodes) {
    if (n.ref.kind == NodeKind::label ? g.label_index_.contains(n.ref.key) : g.keyword_index_.contains(n.ref.key)) {
      throw InvariantError("duplicate node '" + n.ref.key + "'");
    }
    g.push_node(std::move(n));
  }
  for (auto& e : edges) {
    if (index(e.a) >= g.nodes_.size() || index(e.b) >= g.nodes_.size()) {
      throw InvariantError("edge refers to a missing node");
    }
    if (g.find_edge(e.a, e.b)) throw InvariantError("duplicate edge");
    g.push_edge(std::move(e));
  }
  return g;
}

double correlation_score(std::string_view keyword, const TextId& text, const CorpusStats& stats) {
  const std::size_t len = stats.length(text);
  const std::size_t count = stats.count(keyword, text);
  if (len == 0 || count == 0) return 0.0;
  const double tf = static_cast<double>(count) / static_cast<double>(len);
  const double idf = std::log(static_cast<double>(stats.total_texts()) /
                              (1.0 + static_cast<double>(stats.doc_freq(keyword))));
  return std::clamp(tf * idf, 0.0, 1.0);
}

namespace {
double half_term(const WeightedGraph& g, NodeId label) {
  const auto [n, sum] = g.keyword_neighborhood(label);
  if (n == 0) return 0.5;
  return sum / (2.0 * static_cast<double>(n));
}
}  // namespace

double connectivity_weight(const WeightedGraph& g, NodeId y_new, NodeId y_old) {
  return 0.5 * (half_term(g, y_new) + half_term(g, y_old));
}

std::string description_text_id(const LabelId& label) { return "label-description:" + label; }

IndexRoundResult index_training_round(int round, std::span<const LabelDef> new_labels,
                                      std::span<const TextDoc> train, CorpusStats& stats, LlmGateway& gateway,
                                      const WeightedGraph& previous) {
  IndexRoundResult res;
  WeightedGraph& sub = res.subgraph;
  sub.set_round(round);
  for (const auto& label : new_labels) {
    if (previous.find_label(label.id)) throw InvariantError("label '" + label.id + "' already indexed");
    sub.add_label(label);
  }

  std::vector<std::vector<std::string>> keywords(train.size());
  for (std::size_t i = 0; i < train.size(); ++i) {
    try {
      keywords[i] = gateway.extract_keywords(train[i].body);
    } catch (const TransportError& e) {
      ++res.failed_extractions;
      warn("keyword extraction failed for text '" + train[i].id + "': " + e.what());
    }
  }
  for (std::size_t i = 0; i < train.size(); ++i) stats.ingest(train[i], keywords[i]);

  std::vector<std::pair<TextDoc, std::vector<std::string>>> descriptions;
  for (const auto& label : new_labels) {
    if (!label.name) continue;
    LabelDescription desc;
    try {
      desc = gateway.describe_label(label);
    } catch (const TransportError& e) {
      ++res.failed_extractions;
      warn("label description failed for '" + label.id + "': " + e.what());
    }
    res.label_keywords[label.id] = desc.keywords;
    auto doc = TextDoc::make(description_text_id(label.id), desc.text, label.id);
    stats.ingest(doc, desc.keywords);
    descriptions.emplace_back(std::move(doc), std::move(desc.keywords));
  }

  auto attach = [&](const TextDoc& doc, const std::vector<std::string>& kws) {
    if (!doc.gold_label) throw InvariantError("training text '" + doc.id + "' has no label");
    const auto label = sub.find_label(*doc.gold_label);
    if (!label) {
      throw InvariantError("training text '" + doc.id + "' is labeled '" + *doc.gold_label +
                           "', which is not new in round " + std::to_string(round));
    }
    for (const auto& kw : kws) {
      if (sub.names_label(kw) || previous.names_label(kw)) continue;
      const NodeId v = sub.add_keyword(kw);
      sub.add_occurrence(v, *label, Occurrence{doc.id, correlation_score(kw, doc.id, stats)});
    }
  };
  for (std::size_t i = 0; i < train.size(); ++i) attach(train[i], keywords[i]);
  for (const auto& [doc, kws] : descriptions) attach(doc, kws);
  return res;
}

void merge_round(WeightedGraph& graph, const WeightedGraph& next) {
  if (next.round() != graph.round() + 1) {
    throw InvariantError("cannot merge a round-" + std::to_string(next.round()) + " subgraph into a round-" +
                         std::to_string(graph.round()) + " graph");
  }
  for (auto id : next.labels()) {
    if (graph.find_label(next.node(id).ref.key)) {
      throw InvariantError("label '" + next.node(id).ref.key + "' is present in both graphs");
    }
  }
  const std::vector<NodeId> old_labels = graph.labels();

  std::vector<NodeId> remap(next.node_count());
  std::vector<NodeId> new_labels;
  for (std::size_t i = 0; i < next.node_count(); ++i) {
    const auto& n = next.nodes()[i];
    if (n.ref.kind == NodeKind::label) {
      remap[i] = graph.add_label(LabelDef{n.ref.key, n.label_name, n.round_introduced});
      new_labels.push_back(remap[i]);
    } else {
      remap[i] = graph.add_keyword(n.ref.key);
    }
  }
  for (const auto& e : next.edges()) {
    const NodeId a = remap[index(e.a)];
    const NodeId b = remap[index(e.b)];
    if (e.kind == EdgeKind::label_label) {
      graph.set_label_edge(a, b, e.weight);
      continue;
    }
    const bool a_is_kw = graph.node(a).ref.kind == NodeKind::keyword;
    for (const auto& occ : e.occurrences) graph.add_occurrence(a_is_kw ? a : b, a_is_kw ? b : a, occ);
  }

  std::vector<double> half(graph.node_count(), 0.0);
  for (auto y : graph.labels()) {
    const auto [n, sum] = graph.keyword_neighborhood(y);
    half[index(y)] = n == 0 ? 0.5 : sum / (2.0 * static_cast<double>(n));
  }
  for (auto yn : new_labels) {
    for (auto yo : old_labels) graph.set_label_edge(yn, yo, 0.5 * (half[index(yn)] + half[index(yo)]));
  }
  graph.set_round(next.round());
}

bool online_index(WeightedGraph& graph, const TextId& text, std::span<const std::string> exist,
                  std::span<const std::string> not_exist, const LabelId& predicted, const CorpusStats& stats) {
  const auto label = graph.find_label(predicted);
  if (!label) {
    warn("online indexing skipped: predicted label '" + predicted + "' is not in the graph");
    return false;
  }
  if (!stats.contains(text)) throw InvariantError("text '" + text + "' must be ingested before online indexing");

  for (const auto& kw : exist) {
    const auto node = graph.resolve(kw);
    if (!node || graph.node(*node).ref.kind != NodeKind::keyword) continue;
    graph.add_occurrence(*node, *label, Occurrence{text, correlation_score(kw, text, stats)});
  }
  for (const auto& kw : not_exist) {
    if (graph.names_label(kw)) continue;
    const NodeId v = graph.add_keyword(kw);
    graph.add_occurrence(v, *label, Occurrence{text, correlation_score(kw, text, stats)});
  }
  return true;
}

}  // namespace gorag
