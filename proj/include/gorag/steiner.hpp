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

// Steiner tree routines on a plain undirected cost graph.
//
// All ties are broken by a caller-supplied node rank (lower first), then by
// edge index, so results are reproducible bit for bit.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace gorag::steiner {

struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;
  double w = 0.0;
};

struct CostGraph {
  std::uint32_t node_count = 0;
  std::vector<Edge> edges;
  /// Tie-break order per node; empty means node index order.
  std::vector<std::uint32_t> rank;

  std::uint32_t rank_of(std::uint32_t v) const { return rank.empty() ? v : rank[v]; }
};

struct Tree {
  std::vector<std::uint32_t> nodes;  // ascending node index
  std::vector<std::uint32_t> edges;  // ascending edge index into CostGraph::edges
  double cost = 0.0;
};

enum class PathDomain {
  mst,    // terminal paths are taken inside a minimum spanning tree of the graph
  graph,  // Mehlhorn: shortest paths in the graph itself
};

/// Kruskal. Returns edge indices of a minimum spanning forest and the
/// number of connected components.
std::vector<std::uint32_t> minimum_spanning_forest(const CostGraph& g, std::uint32_t* components = nullptr);

/// 1. MST of the graph. 2. Pairwise terminal distances along MST paths.
/// 3. Complete auxiliary graph over the terminals. 4. Its MST.
/// 5. Union of the MST paths realizing the auxiliary edges.
/// Throws DisconnectedGraphError when the graph is not connected.
Tree mst_path_steiner(const CostGraph& g, std::span<const std::uint32_t> terminals);

/// Mehlhorn's 2-approximation: Voronoi regions around the terminals from a
/// multi-source Dijkstra, the bridge-edge auxiliary graph, its MST, the
/// realized paths, then an MST of that subgraph with non-terminal leaves
/// pruned. Throws DisconnectedGraphError when the graph is not connected.
Tree mehlhorn_steiner(const CostGraph& g, std::span<const std::uint32_t> terminals);

Tree approximate(const CostGraph& g, std::span<const std::uint32_t> terminals, PathDomain domain);

inline constexpr std::uint32_t kExactNodeLimit = 16;

/// Optimal Steiner tree by Dreyfus-Wagner dynamic programming.
/// Throws InvariantError above kExactNodeLimit nodes.
Tree exact(const CostGraph& g, std::span<const std::uint32_t> terminals);

/// True when `t` is a tree on its nodes containing every terminal, with
/// cost equal to the sum of its edges.
bool is_steiner_tree(const CostGraph& g, const Tree& t, std::span<const std::uint32_t> terminals);

}  // namespace gorag::steiner
