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

#include "gorag/retrieval.hpp"

#include <algorithm>
#include <cassert>
#include <map>
#include <numeric>
#include <tuple>
#include <unordered_set>

#include <json.hpp>

#include "gorag/error.hpp"

namespace gorag {

std::string_view to_string(PathDomain domain) { return domain == PathDomain::mst ? "mst" : "graph"; }

PathDomain path_domain_from_string(std::string_view name) {
  if (name == "mst") return PathDomain::mst;
  if (name == "graph") return PathDomain::graph;
  throw InvariantError("unknown path domain '" + std::string(name) + "' (expected mst or graph)");
}

std::string_view to_string(Fallback f) {
  switch (f) {
    case Fallback::none:
      return "none";
    case Fallback::label_neighbors:
      return "label_neighbors";
    case Fallback::full_label_set:
      return "full_label_set";
  }
  return "none";
}

TerminalSet split_keywords(const WeightedGraph& graph, std::span<const std::string> keywords) {
  TerminalSet ts;
  std::unordered_set<std::string> seen;
  std::unordered_set<std::uint32_t> seen_nodes;
  for (const auto& kw : keywords) {
    if (kw.empty() || !seen.insert(kw).second) continue;
    if (auto node = graph.resolve(kw)) {
      ts.exist.push_back(kw);
      if (seen_nodes.insert(index(*node)).second) ts.nodes.push_back(*node);
    } else {
      ts.not_exist.push_back(kw);
    }
  }
  return ts;
}

steiner::CostGraph cost_graph(const WeightedGraph& graph, WeightMode mode) {
  steiner::CostGraph cg;
  cg.node_count = static_cast<std::uint32_t>(graph.node_count());
  cg.edges.reserve(graph.edge_count());
  for (const auto& e : graph.edges()) {
    cg.edges.push_back({index(e.a), index(e.b), mode == WeightMode::unit ? 1.0 : e.weight});
  }
  std::vector<std::uint32_t> order(cg.node_count);
  std::iota(order.begin(), order.end(), 0u);
  const auto& nodes = graph.nodes();
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return nodes[a].ref < nodes[b].ref; });
  cg.rank.resize(cg.node_count);
  for (std::uint32_t r = 0; r < cg.node_count; ++r) cg.rank[order[r]] = r;
  return cg;
}

namespace {

SteinerResult to_result(const WeightedGraph& graph, const steiner::CostGraph& cg, const steiner::Tree& tree) {
  SteinerResult res;
  res.total_cost = tree.cost;
  for (auto v : tree.nodes) res.tree_nodes.push_back(NodeId{v});
  std::sort(res.tree_nodes.begin(), res.tree_nodes.end(),
            [&](NodeId a, NodeId b) { return cg.rank[index(a)] < cg.rank[index(b)]; });

  std::map<std::uint32_t, double> incident;  // label node -> sum of incident tree weights
  for (auto v : tree.nodes) {
    if (graph.nodes()[v].ref.kind == NodeKind::label) incident.emplace(v, 0.0);
  }
  for (auto e : tree.edges) {
    const auto& ed = cg.edges[e];
    auto [a, b] = std::minmax(ed.u, ed.v, [&](auto x, auto y) { return cg.rank[x] < cg.rank[y]; });
    res.tree_edges.push_back(TreeEdge{NodeId{a}, NodeId{b}, ed.w});
    if (auto it = incident.find(ed.u); it != incident.end()) it->second += ed.w;
    if (auto it = incident.find(ed.v); it != incident.end()) it->second += ed.w;
  }
  std::sort(res.tree_edges.begin(), res.tree_edges.end(), [&](const TreeEdge& x, const TreeEdge& y) {
    return std::pair(cg.rank[index(x.a)], cg.rank[index(x.b)]) < std::pair(cg.rank[index(y.a)], cg.rank[index(y.b)]);
  });

  std::vector<std::pair<double, const std::string*>> ranked;
  for (const auto& [v, sum] : incident) ranked.emplace_back(sum, &graph.nodes()[v].ref.key);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& x, const auto& y) { return x.first != y.first ? x.first < y.first : *x.second < *y.second; });
  for (const auto& [sum, key] : ranked) res.candidates.push_back(*key);
  return res;
}

std::vector<std::uint32_t> terminal_ids(const TerminalSet& t) {
  std::vector<std::uint32_t> ids;
  for (auto n : t.nodes) ids.push_back(index(n));
  return ids;
}

// One approximate tree per connected component that holds terminals. A
// first-round graph has no label-label edges yet, so it may be split.
steiner::Tree steiner_forest(const steiner::CostGraph& cg, const std::vector<std::uint32_t>& ids,
                             PathDomain paths) {
  std::vector<std::uint32_t> parent(cg.node_count);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::uint32_t components = cg.node_count;
  for (const auto& e : cg.edges) {
    const auto a = find(e.u);
    const auto b = find(e.v);
    if (a != b) {
      parent[a] = b;
      --components;
    }
  }
  if (components <= 1) {
    auto tree = steiner::approximate(cg, ids, paths);
    assert(steiner::is_steiner_tree(cg, tree, ids));
    return tree;
  }

  std::map<std::uint32_t, std::vector<std::uint32_t>> groups;  // root -> terminals
  for (auto t : ids) groups[find(t)].push_back(t);
  steiner::Tree forest;
  for (const auto& [root, group] : groups) {
    std::vector<std::uint32_t> local(cg.node_count, UINT32_MAX);
    std::vector<std::uint32_t> global;
    for (std::uint32_t v = 0; v < cg.node_count; ++v) {
      if (find(v) != root) continue;
      local[v] = static_cast<std::uint32_t>(global.size());
      global.push_back(v);
    }
    steiner::CostGraph sub;
    sub.node_count = static_cast<std::uint32_t>(global.size());
    for (auto v : global) sub.rank.push_back(cg.rank_of(v));
    std::vector<std::uint32_t> edge_map;
    for (std::uint32_t i = 0; i < cg.edges.size(); ++i) {
      const auto& e = cg.edges[i];
      if (local[e.u] == UINT32_MAX) continue;
      sub.edges.push_back({local[e.u], local[e.v], e.w});
      edge_map.push_back(i);
    }
    std::vector<std::uint32_t> sub_terms;
    for (auto t : group) sub_terms.push_back(local[t]);
    const auto tree = steiner::approximate(sub, sub_terms, paths);
    assert(steiner::is_steiner_tree(sub, tree, sub_terms));
    for (auto v : tree.nodes) forest.nodes.push_back(global[v]);
    for (auto e : tree.edges) forest.edges.push_back(edge_map[e]);
    forest.cost += tree.cost;
  }
  std::sort(forest.nodes.begin(), forest.nodes.end());
  std::sort(forest.edges.begin(), forest.edges.end());
  return forest;
}

}  // namespace

SteinerResult steiner_candidates(const WeightedGraph& graph, const TerminalSet& terminals,
                                 const RetrievalOptions& options) {
  if (terminals.nodes.empty()) {
    SteinerResult res;
    res.fallback = Fallback::full_label_set;
    return res;
  }
  const auto cg = cost_graph(graph, options.weights);
  const auto ids = terminal_ids(terminals);
  const auto tree = steiner_forest(cg, ids, options.paths);
  SteinerResult res = to_result(graph, cg, tree);
  if (!res.candidates.empty()) return res;

  // Tree without labels (typically a single keyword terminal): take each
  // terminal's cheapest label neighbour.
  std::map<std::uint32_t, double> nearest;
  for (auto t : terminals.nodes) {
    std::optional<std::tuple<double, std::uint32_t, std::uint32_t>> best;  // weight, rank, node
    for (const auto& nb : graph.neighbors(t)) {
      if (graph.node(nb.node).ref.kind != NodeKind::label) continue;
      const std::tuple<double, std::uint32_t, std::uint32_t> cand{cg.edges[nb.edge].w, cg.rank[index(nb.node)],
                                                                   index(nb.node)};
      if (!best || cand < *best) best = cand;
    }
    if (!best) continue;
    const auto [w, rank, node] = *best;
    auto [it, fresh] = nearest.try_emplace(node, w);
    if (!fresh) it->second = std::min(it->second, w);
  }
  if (nearest.empty()) {
    res.fallback = Fallback::full_label_set;
    return res;
  }
  std::vector<std::pair<double, const std::string*>> ranked;
  for (const auto& [v, w] : nearest) ranked.emplace_back(w, &graph.nodes()[v].ref.key);
  std::sort(ranked.begin(), ranked.end(),
            [](const auto& x, const auto& y) { return x.first != y.first ? x.first < y.first : *x.second < *y.second; });
  for (const auto& [w, key] : ranked) res.candidates.push_back(*key);
  res.fallback = Fallback::label_neighbors;
  return res;
}

SteinerResult steiner_exact(const WeightedGraph& graph, const TerminalSet& terminals, WeightMode mode) {
  const auto cg = cost_graph(graph, mode);
  const auto tree = steiner::exact(cg, terminal_ids(terminals));
  return to_result(graph, cg, tree);
}

std::string result_to_json(const WeightedGraph& graph, const TerminalSet& terminals, const SteinerResult& result) {
  using json = nlohmann::json;
  json nodes = json::array();
  for (auto v : result.tree_nodes) nodes.push_back(graph.node(v).ref.key);
  json edges = json::array();
  for (const auto& e : result.tree_edges) {
    edges.push_back(json::array({graph.node(e.a).ref.key, graph.node(e.b).ref.key, e.weight}));
  }
  json doc{{"candidates", result.candidates},
           {"total_cost", result.total_cost},
           {"fallback", to_string(result.fallback)},
           {"tree_nodes", std::move(nodes)},
           {"tree_edges", std::move(edges)},
           {"terminals", {{"exist", terminals.exist}, {"not_exist", terminals.not_exist}}}};
  return doc.dump();
}

}  // namespace gorag
