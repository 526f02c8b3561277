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

#include <doctest.h>

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include "gorag/error.hpp"
#include "gorag/steiner.hpp"

using namespace gorag;
using namespace gorag::steiner;
using Ids = std::vector<std::uint32_t>;

namespace {

// Optimal Steiner cost by enumeration: the optimum is a minimum spanning
// tree of some node set containing the terminals, so try every superset.
// Prim on a dense matrix, independent of the library's Kruskal.
double enumerate_optimum(const CostGraph& g, const Ids& terminals) {
  const std::uint32_t n = g.node_count;
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> w(n, std::vector<double>(n, inf));
  for (const auto& e : g.edges) {
    w[e.u][e.v] = std::min(w[e.u][e.v], e.w);
    w[e.v][e.u] = std::min(w[e.v][e.u], e.w);
  }
  std::uint32_t must = 0;
  for (auto t : terminals) must |= 1u << t;
  double best = inf;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if ((mask & must) != must || mask == 0) continue;
    Ids nodes;
    for (std::uint32_t v = 0; v < n; ++v) {
      if (mask >> v & 1) nodes.push_back(v);
    }
    std::vector<double> key(nodes.size(), inf);
    std::vector<bool> in(nodes.size(), false);
    key[0] = 0.0;
    double cost = 0.0;
    for (std::size_t it = 0; it < nodes.size(); ++it) {
      std::size_t pick = nodes.size();
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!in[i] && (pick == nodes.size() || key[i] < key[pick])) pick = i;
      }
      if (key[pick] == inf) {
        cost = inf;
        break;
      }
      in[pick] = true;
      cost += key[pick];
      for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!in[i]) key[i] = std::min(key[i], w[nodes[pick]][nodes[i]]);
      }
    }
    best = std::min(best, cost);
  }
  return best;
}

// Random connected graph: a random spanning tree plus extra edges.
CostGraph random_graph(std::mt19937_64& gen, std::uint32_t n, double extra_density) {
  std::uniform_real_distribution<double> weight(std::nextafter(0.0, 1.0), 1.0);
  CostGraph g;
  g.node_count = n;
  Ids order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::shuffle(order.begin(), order.end(), gen);
  std::vector<std::vector<bool>> has(n, std::vector<bool>(n, false));
  for (std::uint32_t i = 1; i < n; ++i) {
    const auto u = order[i];
    const auto v = order[gen() % i];
    g.edges.push_back({u, v, weight(gen)});
    has[u][v] = has[v][u] = true;
  }
  std::bernoulli_distribution coin(extra_density);
  for (std::uint32_t u = 0; u < n; ++u) {
    for (std::uint32_t v = u + 1; v < n; ++v) {
      if (!has[u][v] && coin(gen)) g.edges.push_back({u, v, weight(gen)});
    }
  }
  return g;
}

Ids random_terminals(std::mt19937_64& gen, std::uint32_t n, std::uint32_t k) {
  Ids all(n);
  std::iota(all.begin(), all.end(), 0u);
  std::shuffle(all.begin(), all.end(), gen);
  all.resize(k);
  return all;
}

// k1=0, y1=1, k2=2, y2=3
CostGraph fixture() {
  CostGraph g;
  g.node_count = 4;
  g.edges = {{0, 1, 0.2}, {2, 1, 0.3}, {2, 3, 0.9}, {1, 3, 0.5}};
  return g;
}

}  // namespace

TEST_CASE("fixture: both approximations and the exact solver find cost 0.5") {
  const auto g = fixture();
  const Ids terms{0, 2};
  for (auto domain : {PathDomain::mst, PathDomain::graph}) {
    const auto t = approximate(g, terms, domain);
    CHECK(t.cost == doctest::Approx(0.5));
    CHECK(t.nodes == Ids{0, 1, 2});
    CHECK(is_steiner_tree(g, t, terms));
  }
  const auto ex = exact(g, terms);
  CHECK(ex.cost == doctest::Approx(0.5));
  CHECK(ex.nodes == Ids{0, 1, 2});
  CHECK(enumerate_optimum(g, terms) == doctest::Approx(0.5));
}

TEST_CASE("degenerate terminal sets") {
  const auto g = fixture();
  for (auto domain : {PathDomain::mst, PathDomain::graph}) {
    const auto single = approximate(g, Ids{2}, domain);
    CHECK(single.nodes == Ids{2});
    CHECK(single.edges.empty());
    CHECK(single.cost == 0.0);
    // Duplicated terminals behave like one.
    CHECK(approximate(g, Ids{0, 0, 2}, domain).cost == doctest::Approx(0.5));
  }
  CHECK(exact(g, Ids{3}).cost == 0.0);
  // All nodes terminal -> minimum spanning tree.
  const auto mst = minimum_spanning_forest(g);
  double mst_cost = 0.0;
  for (auto e : mst) mst_cost += g.edges[e].w;
  CHECK(mst_cost == doctest::Approx(1.0));
  CHECK(exact(g, Ids{0, 1, 2, 3}).cost == doctest::Approx(mst_cost));
  CHECK(approximate(g, Ids{0, 1, 2, 3}, PathDomain::graph).cost == doctest::Approx(mst_cost));
  CHECK(approximate(g, Ids{0, 1, 2, 3}, PathDomain::mst).cost == doctest::Approx(mst_cost));
}

TEST_CASE("minimum spanning forest counts components") {
  CostGraph g;
  g.node_count = 5;
  g.edges = {{0, 1, 1.0}, {1, 2, 0.5}, {0, 2, 0.7}, {3, 4, 0.1}};
  std::uint32_t components = 0;
  const auto f = minimum_spanning_forest(g, &components);
  CHECK(components == 2);
  CHECK(f.size() == 3);
  double cost = 0.0;
  for (auto e : f) cost += g.edges[e].w;
  CHECK(cost == doctest::Approx(1.3));
  for (auto domain : {PathDomain::mst, PathDomain::graph}) {
    CHECK_THROWS_AS(approximate(g, Ids{0, 3}, domain), DisconnectedGraphError);
  }
}

TEST_CASE("exact solver agrees with subset enumeration") {
  std::mt19937_64 gen(2024);
  for (int trial = 0; trial < 150; ++trial) {
    const std::uint32_t n = 2 + static_cast<std::uint32_t>(gen() % 9);
    const auto g = random_graph(gen, n, 0.3);
    const auto terms = random_terminals(gen, n, 1 + static_cast<std::uint32_t>(gen() % std::min<std::uint32_t>(n, 5)));
    const auto t = exact(g, terms);
    CHECK(is_steiner_tree(g, t, terms));
    CHECK(std::abs(t.cost - enumerate_optimum(g, terms)) < 1e-9);
  }
}

TEST_CASE("approximations return valid trees within their bounds") {
  std::mt19937_64 gen(99);
  double worst_mst_ratio = 1.0;
  for (int trial = 0; trial < 300; ++trial) {
    const std::uint32_t n = 3 + static_cast<std::uint32_t>(gen() % 10);
    const auto g = random_graph(gen, n, 0.35);
    const auto terms = random_terminals(gen, n, 2 + static_cast<std::uint32_t>(gen() % 3));
    const double opt = exact(g, terms).cost;
    const auto mehlhorn = mehlhorn_steiner(g, terms);
    const auto via_mst = mst_path_steiner(g, terms);
    CHECK(is_steiner_tree(g, mehlhorn, terms));
    CHECK(is_steiner_tree(g, via_mst, terms));
    CHECK(mehlhorn.cost <= 2.0 * opt + 1e-12);
    CHECK(mehlhorn.cost >= opt - 1e-12);
    CHECK(via_mst.cost >= opt - 1e-12);
    worst_mst_ratio = std::max(worst_mst_ratio, via_mst.cost / opt);
  }
  MESSAGE("worst mst-path ratio " << worst_mst_ratio);
}

TEST_CASE("results are deterministic under equal weights") {
  // A 4-cycle of unit edges: several optimal trees exist.
  CostGraph g;
  g.node_count = 4;
  g.edges = {{0, 1, 1.0}, {1, 2, 1.0}, {2, 3, 1.0}, {3, 0, 1.0}};
  for (auto domain : {PathDomain::mst, PathDomain::graph}) {
    const auto a = approximate(g, Ids{0, 2}, domain);
    for (int i = 0; i < 5; ++i) {
      const auto b = approximate(g, Ids{2, 0}, domain);
      CHECK(a.nodes == b.nodes);
      CHECK(a.edges == b.edges);
    }
    CHECK(a.cost == 2.0);
  }
  // Ranks steer the choice.
  auto ranked = g;
  ranked.rank = {0, 3, 2, 1};
  const auto a = approximate(g, Ids{0, 2}, PathDomain::graph);
  const auto b = approximate(ranked, Ids{0, 2}, PathDomain::graph);
  CHECK(a.cost == b.cost);
}

TEST_CASE("is_steiner_tree rejects malformed trees") {
  const auto g = fixture();
  Tree missing{{0, 1}, {0}, 0.2};
  CHECK_FALSE(is_steiner_tree(g, missing, Ids{0, 2}));
  Tree wrong_cost{{0, 1, 2}, {0, 1}, 0.4};
  CHECK_FALSE(is_steiner_tree(g, wrong_cost, Ids{0, 2}));
  Tree cycle{{1, 2, 3}, {1, 2, 3}, 1.7};
  CHECK_FALSE(is_steiner_tree(g, cycle, Ids{1, 3}));
  Tree ok{{0, 1, 2}, {0, 1}, 0.5};
  CHECK(is_steiner_tree(g, ok, Ids{0, 2}));
}

TEST_CASE("exact solver size guard") {
  CostGraph g;
  g.node_count = kExactNodeLimit + 1;
  for (std::uint32_t i = 1; i < g.node_count; ++i) g.edges.push_back({i - 1, i, 1.0});
  CHECK_THROWS_AS(exact(g, Ids{0, 5}), InvariantError);
}
