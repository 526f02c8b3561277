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

#include "gorag/steiner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <tuple>
#include <unordered_map>

#include "gorag/error.hpp"

namespace gorag::steiner {
namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr double kInf = std::numeric_limits<double>::infinity();

class DisjointSets {
 public:
  explicit DisjointSets(std::uint32_t n) : parent_(n), size_(n, 1) { std::iota(parent_.begin(), parent_.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (size_[a] < size_[b]) std::swap(a, b);
    parent_[b] = a;
    size_[a] += size_[b];
    return true;
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint32_t> size_;
};

// Sort key for an edge: weight, then ranks of its endpoints.
auto edge_key(const CostGraph& g, std::uint32_t e) {
  const auto& ed = g.edges[e];
  const auto ru = g.rank_of(ed.u);
  const auto rv = g.rank_of(ed.v);
  return std::make_tuple(ed.w, std::min(ru, rv), std::max(ru, rv), e);
}

std::vector<std::uint32_t> kruskal(const CostGraph& g, std::vector<std::uint32_t> candidates,
                                   std::uint32_t* components) {
  std::sort(candidates.begin(), candidates.end(),
            [&](std::uint32_t a, std::uint32_t b) { return edge_key(g, a) < edge_key(g, b); });
  DisjointSets ds(g.node_count);
  std::vector<std::uint32_t> chosen;
  for (auto e : candidates) {
    if (ds.unite(g.edges[e].u, g.edges[e].v)) chosen.push_back(e);
  }
  if (components) *components = g.node_count - static_cast<std::uint32_t>(chosen.size());
  return chosen;
}

struct Csr {
  std::vector<std::uint32_t> offset;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> adj;  // (neighbor, edge)

  Csr(const CostGraph& g, std::span<const std::uint32_t> edge_ids) : offset(g.node_count + 1, 0) {
    for (auto e : edge_ids) {
      ++offset[g.edges[e].u + 1];
      ++offset[g.edges[e].v + 1];
    }
    std::partial_sum(offset.begin(), offset.end(), offset.begin());
    adj.resize(offset.back());
    std::vector<std::uint32_t> fill(offset.begin(), offset.end() - 1);
    for (auto e : edge_ids) {
      adj[fill[g.edges[e].u]++] = {g.edges[e].v, e};
      adj[fill[g.edges[e].v]++] = {g.edges[e].u, e};
    }
  }
  std::span<const std::pair<std::uint32_t, std::uint32_t>> of(std::uint32_t v) const {
    return {adj.data() + offset[v], adj.data() + offset[v + 1]};
  }
};

std::vector<std::uint32_t> all_edges(const CostGraph& g) {
  std::vector<std::uint32_t> ids(g.edges.size());
  std::iota(ids.begin(), ids.end(), 0u);
  return ids;
}

std::vector<std::uint32_t> unique_terminals(const CostGraph& g, std::span<const std::uint32_t> terminals) {
  std::vector<std::uint32_t> t(terminals.begin(), terminals.end());
  for (auto v : t) {
    if (v >= g.node_count) throw InvariantError("terminal outside the graph");
  }
  std::sort(t.begin(), t.end(), [&](auto a, auto b) { return g.rank_of(a) < g.rank_of(b); });
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

void require_connected(const CostGraph& g, std::uint32_t components) {
  if (g.node_count > 0 && components != 1) {
    throw DisconnectedGraphError("graph has " + std::to_string(components) + " connected components");
  }
}

Tree finish(const CostGraph& g, std::vector<std::uint32_t> edges, std::span<const std::uint32_t> terminals) {
  Tree t;
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  t.edges = std::move(edges);
  for (auto e : t.edges) {
    t.nodes.push_back(g.edges[e].u);
    t.nodes.push_back(g.edges[e].v);
    t.cost += g.edges[e].w;
  }
  t.nodes.insert(t.nodes.end(), terminals.begin(), terminals.end());
  std::sort(t.nodes.begin(), t.nodes.end());
  t.nodes.erase(std::unique(t.nodes.begin(), t.nodes.end()), t.nodes.end());
  return t;
}

// Repeatedly removes leaves that are not terminals.
std::vector<std::uint32_t> prune_leaves(const CostGraph& g, std::vector<std::uint32_t> edges,
                                        std::span<const std::uint32_t> terminals) {
  std::unordered_map<std::uint32_t, std::uint32_t> degree;
  for (auto e : edges) {
    ++degree[g.edges[e].u];
    ++degree[g.edges[e].v];
  }
  std::vector<bool> is_terminal(g.node_count, false);
  for (auto t : terminals) is_terminal[t] = true;
  std::vector<bool> removed(edges.size(), false);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t i = 0; i < edges.size(); ++i) {
      if (removed[i]) continue;
      const auto& ed = g.edges[edges[i]];
      for (auto v : {ed.u, ed.v}) {
        if (!is_terminal[v] && degree[v] == 1) {
          removed[i] = true;
          --degree[ed.u];
          --degree[ed.v];
          changed = true;
          break;
        }
      }
    }
  }
  std::vector<std::uint32_t> kept;
  for (std::size_t i = 0; i < edges.size(); ++i) {
    if (!removed[i]) kept.push_back(edges[i]);
  }
  return kept;
}

}  // namespace

std::vector<std::uint32_t> minimum_spanning_forest(const CostGraph& g, std::uint32_t* components) {
  return kruskal(g, all_edges(g), components);
}

Tree mst_path_steiner(const CostGraph& g, std::span<const std::uint32_t> terminal_span) {
  const auto terminals = unique_terminals(g, terminal_span);
  std::uint32_t components = 0;
  const auto mst = minimum_spanning_forest(g, &components);
  require_connected(g, components);
  if (terminals.size() <= 1) return finish(g, {}, terminals);

  // Root the MST at the first terminal.
  const Csr tree(g, mst);
  const std::uint32_t n = g.node_count;
  std::vector<std::uint32_t> parent(n, kNone), parent_edge(n, kNone), depth(n, 0);
  std::vector<double> dist(n, 0.0);
  {
    std::vector<std::uint32_t> stack{terminals.front()};
    parent[terminals.front()] = terminals.front();
    while (!stack.empty()) {
      const auto v = stack.back();
      stack.pop_back();
      for (auto [u, e] : tree.of(v)) {
        if (parent[u] != kNone) continue;
        parent[u] = v;
        parent_edge[u] = e;
        depth[u] = depth[v] + 1;
        dist[u] = dist[v] + g.edges[e].w;
        stack.push_back(u);
      }
    }
  }

  // Binary lifting for lowest common ancestors.
  const int levels = std::max(1, static_cast<int>(std::bit_width(n)));
  std::vector<std::vector<std::uint32_t>> up(levels, parent);
  for (int k = 1; k < levels; ++k) {
    for (std::uint32_t v = 0; v < n; ++v) up[k][v] = up[k - 1][up[k - 1][v]];
  }
  auto lca = [&](std::uint32_t a, std::uint32_t b) {
    if (depth[a] < depth[b]) std::swap(a, b);
    for (int k = levels - 1; k >= 0; --k) {
      if (depth[a] - depth[b] >= (1u << k)) a = up[k][a];
    }
    if (a == b) return a;
    for (int k = levels - 1; k >= 0; --k) {
      if (up[k][a] != up[k][b]) {
        a = up[k][a];
        b = up[k][b];
      }
    }
    return parent[a];
  };

  // Prim over the complete auxiliary graph on the terminals.
  const std::size_t t = terminals.size();
  std::vector<double> best(t, kInf);
  std::vector<std::size_t> link(t, 0);
  std::vector<bool> in_tree(t, false);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> aux_edges;
  best[0] = 0.0;
  for (std::size_t step = 0; step < t; ++step) {
    std::size_t pick = t;
    for (std::size_t i = 0; i < t; ++i) {
      if (!in_tree[i] && (pick == t || best[i] < best[pick])) pick = i;  // ties: lower rank (sorted)
    }
    in_tree[pick] = true;
    if (step > 0) aux_edges.emplace_back(terminals[link[pick]], terminals[pick]);
    for (std::size_t i = 0; i < t; ++i) {
      if (in_tree[i]) continue;
      const auto a = terminals[pick], b = terminals[i];
      const double d = dist[a] + dist[b] - 2.0 * dist[lca(a, b)];
      if (d < best[i]) {
        best[i] = d;
        link[i] = pick;
      }
    }
  }

  std::vector<std::uint32_t> edges;
  for (auto [a, b] : aux_edges) {
    const auto top = lca(a, b);
    for (auto v : {a, b}) {
      while (v != top) {
        edges.push_back(parent_edge[v]);
        v = parent[v];
      }
    }
  }
  return finish(g, std::move(edges), terminals);
}

Tree mehlhorn_steiner(const CostGraph& g, std::span<const std::uint32_t> terminal_span) {
  const auto terminals = unique_terminals(g, terminal_span);
  {
    std::uint32_t components = 0;
    DisjointSets ds(g.node_count);
    components = g.node_count;
    for (const auto& e : g.edges) {
      if (ds.unite(e.u, e.v)) --components;
    }
    require_connected(g, components);
  }
  if (terminals.size() <= 1) return finish(g, {}, terminals);

  const std::uint32_t n = g.node_count;
  const Csr csr(g, all_edges(g));
  std::vector<double> dist(n, kInf);
  std::vector<std::uint32_t> source(n, kNone), pred_edge(n, kNone);
  using Item = std::tuple<double, std::uint32_t, std::uint32_t>;  // dist, rank, node
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  for (auto s : terminals) {
    dist[s] = 0.0;
    source[s] = s;
    pq.emplace(0.0, g.rank_of(s), s);
  }
  while (!pq.empty()) {
    const auto [d, r, v] = pq.top();
    pq.pop();
    if (d > dist[v]) continue;
    for (auto [u, e] : csr.of(v)) {
      const double nd = d + g.edges[e].w;
      if (nd < dist[u]) {
        dist[u] = nd;
        source[u] = source[v];
        pred_edge[u] = e;
        pq.emplace(nd, g.rank_of(u), u);
      }
    }
  }

  // Cheapest bridge edge between every pair of adjacent Voronoi regions.
  struct Bridge {
    double cost;
    std::uint32_t edge;
  };
  std::unordered_map<std::uint64_t, Bridge> bridges;
  for (std::uint32_t e = 0; e < g.edges.size(); ++e) {
    const auto& ed = g.edges[e];
    const auto su = source[ed.u], sv = source[ed.v];
    if (su == sv) continue;
    const auto lo = std::min(su, sv), hi = std::max(su, sv);
    const double c = dist[ed.u] + ed.w + dist[ed.v];
    const auto key = (static_cast<std::uint64_t>(lo) << 32) | hi;
    auto [it, fresh] = bridges.try_emplace(key, Bridge{c, e});
    if (!fresh && c < it->second.cost) it->second = Bridge{c, e};
  }

  CostGraph aux;
  aux.node_count = n;
  aux.rank = g.rank;
  std::vector<std::uint32_t> bridge_of;
  for (const auto& [key, b] : bridges) {
    aux.edges.push_back(Edge{static_cast<std::uint32_t>(key >> 32), static_cast<std::uint32_t>(key), b.cost});
    bridge_of.push_back(b.edge);
  }
  // unordered_map iteration order is unspecified; sort to a canonical order.
  std::vector<std::uint32_t> order(aux.edges.size());
  std::iota(order.begin(), order.end(), 0u);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return bridge_of[a] < bridge_of[b]; });
  CostGraph aux_sorted{aux.node_count, {}, aux.rank};
  std::vector<std::uint32_t> bridge_sorted;
  for (auto i : order) {
    aux_sorted.edges.push_back(aux.edges[i]);
    bridge_sorted.push_back(bridge_of[i]);
  }

  std::vector<std::uint32_t> realized;
  for (auto ae : minimum_spanning_forest(aux_sorted)) {
    const auto e = bridge_sorted[ae];
    realized.push_back(e);
    for (auto v : {g.edges[e].u, g.edges[e].v}) {
      while (pred_edge[v] != kNone) {
        realized.push_back(pred_edge[v]);
        const auto& pe = g.edges[pred_edge[v]];
        v = pe.u == v ? pe.v : pe.u;
      }
    }
  }
  std::sort(realized.begin(), realized.end());
  realized.erase(std::unique(realized.begin(), realized.end()), realized.end());

  auto sub_mst = kruskal(g, realized, nullptr);
  return finish(g, prune_leaves(g, std::move(sub_mst), terminals), terminals);
}

Tree approximate(const CostGraph& g, std::span<const std::uint32_t> terminals, PathDomain domain) {
  return domain == PathDomain::mst ? mst_path_steiner(g, terminals) : mehlhorn_steiner(g, terminals);
}

bool is_steiner_tree(const CostGraph& g, const Tree& t, std::span<const std::uint32_t> terminals) {
  if (t.nodes.empty()) return terminals.empty() && t.edges.empty();
  if (t.edges.size() + 1 != t.nodes.size()) return false;
  std::unordered_map<std::uint32_t, std::uint32_t> local;
  for (std::uint32_t i = 0; i < t.nodes.size(); ++i) local.emplace(t.nodes[i], i);
  for (auto v : terminals) {
    if (!local.contains(v)) return false;
  }
  DisjointSets ds(static_cast<std::uint32_t>(t.nodes.size()));
  double cost = 0.0;
  for (auto e : t.edges) {
    if (e >= g.edges.size()) return false;
    const auto a = local.find(g.edges[e].u), b = local.find(g.edges[e].v);
    if (a == local.end() || b == local.end()) return false;
    if (!ds.unite(a->second, b->second)) return false;  // cycle
    cost += g.edges[e].w;
  }
  return std::abs(cost - t.cost) <= 1e-9 * std::max(1.0, cost);
}

}  // namespace gorag::steiner
