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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "gorag/corpus.hpp"
#include "gorag/error.hpp"
#include "gorag/graph_index.hpp"
#include "gorag/llm_gateway.hpp"

using namespace gorag;
using Strings = std::vector<std::string>;

namespace {

std::string repeat_body(const Strings& words) {
  std::string s;
  for (const auto& w : words) s += w + " ";
  return s;
}

}  // namespace

TEST_CASE("correlation score hand case") {
  // count=3, |t|=12, N=4, df=1: (3/12) * ln(4/2)
  CorpusStats stats;
  stats.ingest(TextDoc::make("t", repeat_body({"k", "a", "k", "b", "c", "k", "d", "e", "f", "g", "h", "i"})), {});
  for (const char* id : {"u", "v", "w"}) stats.ingest(TextDoc::make(id, "x y z"), {});
  CHECK(correlation_score("k", "t", stats) == doctest::Approx(0.173287).epsilon(1e-6));
  CHECK(std::abs(correlation_score("k", "t", stats) - 0.25 * std::log(2.0)) < 1e-15);
  CHECK(correlation_score("k", "u", stats) == 0.0);
  CHECK_THROWS_AS(correlation_score("k", "nope", stats), InvariantError);
}

TEST_CASE("correlation score is clamped to [0, 1]") {
  CorpusStats stats;
  stats.ingest(TextDoc::make("only", "k"), {});
  // ln(1/2) < 0
  CHECK(correlation_score("k", "only", stats) == 0.0);
  CorpusStats big;
  big.ingest(TextDoc::make("t", "k"), {});
  for (int i = 0; i < 100; ++i) big.ingest(TextDoc::make("f" + std::to_string(i), "x"), {});
  // tf = 1, idf = ln(101/2) > 1
  CHECK(correlation_score("k", "t", big) == 1.0);
}

TEST_CASE("edge weight is the mean of 1 - cs") {
  WeightedGraph g;
  const auto y = g.add_label(LabelDef{"y", std::nullopt, 1});
  const auto k = g.add_keyword("k");
  const auto e = g.add_occurrence(k, y, {"t1", 0.2});
  CHECK(g.edge(e).weight == doctest::Approx(0.8));
  g.add_occurrence(k, y, {"t2", 0.4});
  CHECK(g.edge(e).weight == doctest::Approx(0.7));
  CHECK(g.edge(e).occurrences.size() == 2);
  CHECK(g.edge_count() == 1);
  CHECK_THROWS_AS(g.add_occurrence(k, y, {"t3", 1.5}), InvariantError);
  CHECK_THROWS_AS(g.add_occurrence(k, y, {"t3", std::nan("")}), InvariantError);
  CHECK_THROWS_AS(g.add_occurrence(y, k, {"t3", 0.5}), InvariantError);
}

TEST_CASE("edge weight property: stored weight equals a fresh scalar mean") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  WeightedGraph g;
  std::vector<NodeId> labels;
  std::vector<NodeId> kws;
  for (int i = 0; i < 4; ++i) labels.push_back(g.add_label(LabelDef{"y" + std::to_string(i), std::nullopt, 1}));
  for (int i = 0; i < 10; ++i) kws.push_back(g.add_keyword("k" + std::to_string(i)));
  for (int i = 0; i < 500; ++i) {
    g.add_occurrence(kws[gen() % kws.size()], labels[gen() % labels.size()], {"t" + std::to_string(i), unit(gen)});
  }
  for (const auto& e : g.edges()) {
    double sum = 0.0;
    for (const auto& o : e.occurrences) sum += 1.0 - o.cs;
    CHECK(std::abs(e.weight - sum / static_cast<double>(e.occurrences.size())) < 1e-12);
  }
}

TEST_CASE("connectivity weight") {
  WeightedGraph g;
  const auto yn = g.add_label(LabelDef{"new", std::nullopt, 2});
  const auto yo = g.add_label(LabelDef{"old", std::nullopt, 1});
  const auto k = g.add_keyword("k");
  g.add_occurrence(k, yn, {"t1", 0.2});
  g.add_occurrence(k, yn, {"t2", 0.4});
  // h(new) = 0.7 / 2, h(old) = 0.5 (no keywords)
  CHECK(connectivity_weight(g, yn, yo) == doctest::Approx(0.425));
  const auto k2 = g.add_keyword("k2");
  g.add_occurrence(k2, yn, {"t3", 0.9});
  // h(new) = (0.7 + 0.1) / 4
  CHECK(connectivity_weight(g, yn, yo) == doctest::Approx(0.5 * (0.2 + 0.5)));
}

TEST_CASE("graph nodes, lookup and label aliases") {
  WeightedGraph g;
  const auto y = g.add_label(LabelDef{"EC", "Electrical Circuits", 1});
  CHECK(g.resolve("electrical circuits") == y);
  CHECK(g.resolve("ec") == y);
  CHECK(g.names_label("electrical circuits"));
  CHECK_FALSE(g.names_label("electrical"));
  CHECK_THROWS_AS(g.add_label(LabelDef{"EC", std::nullopt, 1}), InvariantError);
  const auto k = g.add_keyword("circuit");
  CHECK(g.add_keyword("circuit") == k);
  CHECK(g.find_keyword("circuit") == k);
  CHECK_FALSE(g.find_keyword("nothing"));
  CHECK(g.resolve("circuit") == k);
  CHECK_THROWS_AS(g.add_keyword(""), InvariantError);
  CHECK(g.label_defs() == std::vector<LabelDef>{LabelDef{"EC", "Electrical Circuits", 1}});
  CHECK_THROWS_AS(g.set_label_edge(y, k, 0.3), InvariantError);
  CHECK(NodeRef{NodeKind::keyword, "a"} < NodeRef{NodeKind::label, "b"});
  CHECK(NodeRef{NodeKind::keyword, "a"} < NodeRef{NodeKind::label, "a"});
}

namespace {

struct Fixture {
  MockGateway gateway{MockConfig{0.5, {}, 0.0, "?"}, nullptr};
  CorpusStats stats;
  WeightedGraph graph;

  void add_round(int r, std::vector<LabelDef> labels, std::vector<TextDoc> train) {
    auto res = index_training_round(r, labels, train, stats, gateway, graph);
    merge_round(graph, res.subgraph);
  }
};

}  // namespace

TEST_CASE("index_training_round attaches keywords with frozen scores") {
  Fixture f;
  f.add_round(1, {LabelDef{"A", std::nullopt, 1}, LabelDef{"B", std::nullopt, 1}},
              {TextDoc::make("1", "apple banana", "A"), TextDoc::make("2", "apple cherry", "B"),
               TextDoc::make("3", "apple banana banana", "A")});
  CHECK(f.graph.round() == 1);
  CHECK(f.stats.total_texts() == 3);
  const auto a = *f.graph.find_label("A");
  const auto banana = *f.graph.find_keyword("banana");
  const auto e = *f.graph.find_edge(a, banana);
  REQUIRE(f.graph.edge(e).occurrences.size() == 2);
  // Scores computed after both texts were ingested: N = 3, df(banana) = 2.
  const double idf = std::log(3.0 / 3.0);
  CHECK(f.graph.edge(e).occurrences[0].cs == doctest::Approx(std::max(0.0, 0.5 * idf)));
  // No label-label edges in the first round.
  for (const auto& ed : f.graph.edges()) CHECK(ed.kind == EdgeKind::keyword_label);

  const auto before = f.graph.edge(e).occurrences;
  f.add_round(2, {LabelDef{"C", std::nullopt, 2}}, {TextDoc::make("4", "banana durian", "C")});
  CHECK(f.graph.edge(*f.graph.find_edge(a, banana)).occurrences == before);
}

TEST_CASE("index_training_round skips keywords naming labels and indexes descriptions") {
  Fixture f;
  f.add_round(1, {LabelDef{"sports", "Team Sports", 1}, LabelDef{"law", std::nullopt, 1}},
              {TextDoc::make("1", "team sports today", "sports"), TextDoc::make("2", "sports law court", "law")});
  // "sports" names a label: it resolves to the label and never becomes a keyword node.
  CHECK_FALSE(f.graph.find_keyword("sports"));
  CHECK(f.graph.resolve("sports") == f.graph.find_label("sports"));
  // Description keywords "team" and "sports" -> "team" attaches to the label.
  CHECK(f.stats.contains(description_text_id("sports")));
  const auto team = *f.graph.find_keyword("team");
  const auto e = f.graph.find_edge(team, *f.graph.find_label("sports"));
  REQUIRE(e);
  bool from_description = false;
  for (const auto& o : f.graph.edge(*e).occurrences) from_description |= o.text == description_text_id("sports");
  CHECK(from_description);
}

TEST_CASE("index_training_round rejects texts of unknown labels") {
  Fixture f;
  CHECK_THROWS_AS(f.add_round(1, {LabelDef{"A", std::nullopt, 1}}, {TextDoc::make("1", "x", "B")}), InvariantError);
}

TEST_CASE("merge_round unions graphs and connects every new label to every old one") {
  Fixture f;
  f.add_round(1, {LabelDef{"A", std::nullopt, 1}, LabelDef{"B", std::nullopt, 1}},
              {TextDoc::make("1", "apple banana", "A"), TextDoc::make("2", "cherry", "B")});
  f.add_round(2, {LabelDef{"C", std::nullopt, 2}, LabelDef{"D", std::nullopt, 2}, LabelDef{"E", std::nullopt, 2}},
              {TextDoc::make("3", "apple", "C"), TextDoc::make("4", "fig", "D"), TextDoc::make("5", "grape", "E")});
  std::size_t label_edges = 0;
  for (const auto& e : f.graph.edges()) label_edges += e.kind == EdgeKind::label_label;
  CHECK(label_edges == 3 * 2);
  CHECK(f.graph.find_keyword("apple"));
  CHECK(f.graph.node_count() == 5 + 5);  // apple banana cherry fig grape + 5 labels

  // Connectivity weights from the post-merge neighbourhoods.
  const auto c = *f.graph.find_label("C");
  const auto a = *f.graph.find_label("A");
  CHECK(f.graph.edge(*f.graph.find_edge(c, a)).weight == doctest::Approx(connectivity_weight(f.graph, c, a)));

  WeightedGraph wrong_round;
  wrong_round.set_round(5);
  CHECK_THROWS_AS(merge_round(f.graph, wrong_round), InvariantError);
  WeightedGraph dup;
  dup.set_round(3);
  dup.add_label(LabelDef{"A", std::nullopt, 3});
  CHECK_THROWS_AS(merge_round(f.graph, dup), InvariantError);
}

TEST_CASE("online_index adds occurrences for the predicted label") {
  Fixture f;
  f.add_round(1, {LabelDef{"A", std::nullopt, 1}, LabelDef{"B", std::nullopt, 1}},
              {TextDoc::make("1", "apple banana", "A"), TextDoc::make("2", "cherry", "B")});
  const auto nodes = f.graph.node_count();
  const auto edges = f.graph.edge_count();
  f.stats.ingest(TextDoc::make("q", "apple kiwi"), {});
  CHECK_FALSE(online_index(f.graph, "q", Strings{"apple"}, Strings{"kiwi"}, "Z", f.stats));
  CHECK(f.graph.node_count() == nodes);
  CHECK_THROWS_AS(online_index(f.graph, "missing", Strings{}, Strings{"kiwi"}, "B", f.stats), InvariantError);

  CHECK(online_index(f.graph, "q", Strings{"apple"}, Strings{"kiwi", "a"}, "B", f.stats));
  // "kiwi" is new; "a" names label A and is skipped; apple gains an edge to B.
  CHECK(f.graph.node_count() == nodes + 1);
  CHECK(f.graph.edge_count() == edges + 2);
  CHECK(f.graph.find_edge(*f.graph.find_keyword("apple"), *f.graph.find_label("B")));
}

TEST_CASE("graph files round-trip and reject bad input") {
  Fixture f;
  f.add_round(1, {LabelDef{"A", "Apples", 1}}, {TextDoc::make("1", "apple banana", "A")});
  f.add_round(2, {LabelDef{"B", std::nullopt, 2}}, {TextDoc::make("2", "cherry", "B")});
  const auto text = graph_to_json(f.graph);
  const auto back = graph_from_json(text);
  CHECK(back == f.graph);
  CHECK(graph_to_json(back) == text);
  CHECK(back.resolve("apples") == back.find_label("A"));

  const auto path = (std::filesystem::temp_directory_path() / "gorag_test_graph.json").string();
  save_graph(f.graph, path);
  CHECK(load_graph(path) == f.graph);
  std::filesystem::remove(path);

  auto bumped = text;
  bumped.replace(bumped.find("\"schema_version\":1"), 18, "\"schema_version\":9");
  CHECK_THROWS_WITH_AS(graph_from_json(bumped), doctest::Contains("schema version"), ParseError);
  CHECK_THROWS_AS(graph_from_json(text.substr(0, text.size() / 2)), ParseError);
  CHECK_THROWS_AS(graph_from_json("{\"schema_version\":1}"), ParseError);
  CHECK_THROWS_AS(load_graph("/nonexistent/graph.json"), Error);
}
