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

#include <algorithm>
#include <limits>

#include "gorag/error.hpp"
#include "gorag/steiner.hpp"

namespace gorag::steiner {
namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
}  // namespace

// Dreyfus-Wagner. dp[S][v] is the cheapest tree spanning terminal subset S
// plus node v. Base: shortest-path distance from the single terminal.
// Step: dp[S][v] = min_u (min_{S1 split of S} dp[S1][u] + dp[S\S1][u]) + d(u, v).
Tree exact(const CostGraph& g, std::span<const std::uint32_t> terminal_span) {
  if (g.node_count > kExactNodeLimit) {
    throw InvariantError("exact Steiner solver is limited to " + std::to_string(kExactNodeLimit) + " nodes, got " +
                         std::to_string(g.node_count));
  }
  std::vector<std::uint32_t> terminals(terminal_span.begin(), terminal_span.end());
  std::sort(terminals.begin(), terminals.end());
  terminals.erase(std::unique(terminals.begin(), terminals.end()), terminals.end());
  for (auto t : terminals) {
    if (t >= g.node_count) throw InvariantError("terminal outside the graph");
  }

  Tree tree;
  if (terminals.empty()) return tree;
  if (terminals.size() == 1) {
    tree.nodes = terminals;
    return tree;
  }

  const std::uint32_t n = g.node_count;
  // All-pairs shortest paths with the cheapest direct edge per pair.
  std::vector<double> d(n * n, kInf);
  std::vector<std::uint32_t> direct(n * n, kNone);
  std::vector<std::uint32_t> next(n * n, kNone);  // first hop from i toward j
  for (std::uint32_t i = 0; i < n; ++i) {
    d[i * n + i] = 0.0;
    next[i * n + i] = i;
  }
  for (std::uint32_t e = 0; e < g.edges.size(); ++e) {
    const auto [u, v, w] = g.edges[e];
    if (u == v) continue;
    if (w < d[u * n + v]) {
      d[u * n + v] = d[v * n + u] = w;
      direct[u * n + v] = direct[v * n + u] = e;
      next[u * n + v] = v;
      next[v * n + u] = u;
    }
  }
  for (std::uint32_t k = 0; k < n; ++k)
    for (std::uint32_t i = 0; i < n; ++i)
      for (std::uint32_t j = 0; j < n; ++j) {
        if (d[i * n + k] + d[k * n + j] < d[i * n + j]) {
          d[i * n + j] = d[i * n + k] + d[k * n + j];
          next[i * n + j] = next[i * n + k];
        }
      }
  for (auto t : terminals) {
    for (auto u : terminals) {
      if (d[t * n + u] == kInf) throw DisconnectedGraphError("terminals are not connected");
    }
  }

  const std::size_t k = terminals.size();
  const std::size_t full = (std::size_t{1} << k) - 1;
  std::vector<double> dp((full + 1) * n, kInf);
  std::vector<std::uint32_t> via((full + 1) * n, kNone);     // u for dp[S][v]
  std::vector<std::size_t> split((full + 1) * n, 0);         // S1 for merge at u
  std::vector<double> merged(n);

  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t s = std::size_t{1} << i;
    for (std::uint32_t v = 0; v < n; ++v) {
      dp[s * n + v] = d[terminals[i] * n + v];
      via[s * n + v] = terminals[i];
    }
  }
  for (std::size_t s = 1; s <= full; ++s) {
    if ((s & (s - 1)) == 0) continue;
    const std::size_t low = s & (~s + 1);
    for (std::uint32_t u = 0; u < n; ++u) {
      merged[u] = kInf;
      // Enumerate proper subsets containing the lowest bit, each split once.
      for (std::size_t s1 = (s - 1) & s; s1 > 0; s1 = (s1 - 1) & s) {
        if (!(s1 & low)) continue;
        const double c = dp[s1 * n + u] + dp[(s ^ s1) * n + u];
        if (c < merged[u]) {
          merged[u] = c;
          split[s * n + u] = s1;
        }
      }
    }
    for (std::uint32_t v = 0; v < n; ++v) {
      for (std::uint32_t u = 0; u < n; ++u) {
        const double c = merged[u] + d[u * n + v];
        if (c < dp[s * n + v]) {
          dp[s * n + v] = c;
          via[s * n + v] = u;
        }
      }
    }
  }

  std::vector<std::uint32_t> edges;
  auto add_path = [&](std::uint32_t from, std::uint32_t to) {
    while (from != to) {
      const auto hop = next[from * n + to];
      edges.push_back(direct[from * n + hop]);
      from = hop;
    }
  };
  // Explicit stack of (subset, node) pairs to expand.
  std::vector<std::pair<std::size_t, std::uint32_t>> work{{full, terminals.front()}};
  while (!work.empty()) {
    const auto [s, v] = work.back();
    work.pop_back();
    const auto u = via[s * n + v];
    add_path(u, v);
    if ((s & (s - 1)) == 0) continue;  // u is the terminal itself
    const auto s1 = split[s * n + u];
    work.emplace_back(s1, u);
    work.emplace_back(s ^ s1, u);
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

  // The expanded paths may share nodes; keep a spanning tree of them.
  CostGraph sub{n, {}, g.rank};
  for (auto e : edges) sub.edges.push_back(g.edges[e]);
  std::vector<std::uint32_t> kept;
  for (auto local : minimum_spanning_forest(sub)) kept.push_back(edges[local]);
  std::sort(kept.begin(), kept.end());

  tree.edges = kept;
  for (auto e : kept) {
    tree.nodes.push_back(g.edges[e].u);
    tree.nodes.push_back(g.edges[e].v);
    tree.cost += g.edges[e].w;
  }
  tree.nodes.insert(tree.nodes.end(), terminals.begin(), terminals.end());
  std::sort(tree.nodes.begin(), tree.nodes.end());
  tree.nodes.erase(std::unique(tree.nodes.begin(), tree.nodes.end()), tree.nodes.end());
  return tree;
}

}  // namespace gorag::steiner
