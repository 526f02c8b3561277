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
#include <random>
#include <set>
#include <string>
#include <vector>

#include "gorag/corpus.hpp"
#include "gorag/error.hpp"
#include "gorag/rng.hpp"

using namespace gorag;
using Strings = std::vector<std::string>;

TEST_CASE("tokenize lowercases and splits on word boundaries") {
  CHECK(tokenize("TF-IDF score") == Strings{"tf", "idf", "score"});
  CHECK(tokenize("Don't stop, 3.14!") == Strings{"don't", "stop", "3.14"});
  CHECK(tokenize("ÉCOLE Normale") == Strings{"école", "normale"});
  CHECK(tokenize("  \t\n ").empty());
  CHECK(tokenize("").empty());
}

TEST_CASE("normalize_phrase joins tokens with single spaces") {
  CHECK(normalize_phrase("  Algorithm   Design ") == "algorithm design");
  CHECK(normalize_phrase("Electrical-Circuits") == "electrical circuits");
  CHECK(phrase_tokens("a bc d") == Strings{"a", "bc", "d"});
  CHECK(phrase_tokens("").empty());
}

TEST_CASE("count_phrase counts contiguous occurrences") {
  const Strings t{"a", "b", "a", "b", "c", "a"};
  CHECK(count_phrase(t, Strings{"a"}) == 3);
  CHECK(count_phrase(t, Strings{"a", "b"}) == 2);
  CHECK(count_phrase(t, Strings{"b", "a"}) == 1);
  CHECK(count_phrase(t, Strings{"c", "b"}) == 0);
  CHECK(count_phrase(t, Strings{}) == 0);
}

TEST_CASE("CorpusStats document frequency covers the full token content") {
  CorpusStats s;
  s.ingest(TextDoc::make("1", "graph neural network graph"), Strings{"graph"});
  s.ingest(TextDoc::make("2", "a neural network"), Strings{});
  s.ingest(TextDoc::make("3", "network of roads"), Strings{"roads"});
  CHECK(s.total_texts() == 3);
  CHECK(s.doc_freq("network") == 3);
  CHECK(s.doc_freq("neural network") == 2);
  CHECK(s.doc_freq("graph") == 1);
  CHECK(s.doc_freq("graph network") == 0);
  CHECK(s.doc_freq("absent") == 0);
  CHECK(s.count("graph", "1") == 2);
  CHECK(s.length("1") == 4);
  CHECK(s.per_text("3").keywords == Strings{"roads"});
  CHECK(s.contains("2"));
  CHECK_FALSE(s.contains("4"));
  CHECK_THROWS_AS(s.ingest(TextDoc::make("2", "again"), Strings{}), InvariantError);
  CHECK_THROWS_AS(s.length("9"), InvariantError);
  CHECK_THROWS_AS(s.count("graph", "9"), InvariantError);
}

TEST_CASE("CorpusStats phrase df agrees with a brute-force scan") {
  std::mt19937_64 gen(11);
  const Strings vocab{"a", "b", "c", "d"};
  CorpusStats s;
  std::vector<Strings> texts;
  for (int i = 0; i < 60; ++i) {
    std::string body;
    const int len = 1 + static_cast<int>(gen() % 8);
    for (int j = 0; j < len; ++j) body += vocab[gen() % vocab.size()] + " ";
    auto doc = TextDoc::make(std::to_string(i), body);
    texts.push_back(doc.tokens);
    s.ingest(doc, {});
  }
  for (const auto& a : vocab) {
    for (const auto& b : vocab) {
      const Strings phrase{a, b};
      std::size_t df = 0;
      for (const auto& t : texts) df += count_phrase(t, phrase) > 0;
      CHECK(s.doc_freq(a + " " + b) == df);
    }
  }
}

namespace {

const char* kDataset =
    R"({"id": "t1", "text": "alpha beta", "label": "A", "label_name": "Letters A", "round": 1}
{"id": "t2", "text": "alpha gamma", "label": "A", "round": 1}
{"id": "t3", "text": "delta", "label": "B", "round": 1}
{"id": "t4", "text": "epsilon", "label": "C", "round": 2}
{"id": 5, "text": "alpha", "label": "A", "round": 1, "split": "test"}
{"id": "t6", "text": "zeta", "label": "C", "round": 2, "split": "test"}
)";

}  // namespace

TEST_CASE("parse_dataset builds rounds in order") {
  const auto plan = parse_dataset(kDataset);
  REQUIRE(plan.rounds.size() == 2);
  CHECK(plan.rounds[0].new_labels.size() == 2);
  CHECK(plan.rounds[0].new_labels[0].id == "A");
  CHECK(plan.rounds[0].new_labels[0].name == std::optional<std::string>("Letters A"));
  CHECK(plan.rounds[0].new_labels[0].display() == "Letters A");
  CHECK(plan.rounds[0].new_labels[1].display() == "B");
  CHECK(plan.rounds[0].train.size() == 3);
  CHECK(plan.rounds[0].test.size() == 1);
  CHECK(plan.rounds[0].test[0].id == "5");
  CHECK(plan.rounds[1].new_labels[0].round_introduced == 2);
  CHECK(plan.label_count() == 3);
  CHECK(plan.labels_through(1).size() == 2);
  CHECK(plan.labels_through(2).size() == 3);
}

TEST_CASE("dump_dataset round-trips") {
  const auto plan = parse_dataset(kDataset);
  CHECK(parse_dataset(dump_dataset(plan)) == plan);
}

TEST_CASE("parse_dataset rejects bad input") {
  CHECK_THROWS_WITH_AS(parse_dataset(""), doctest::Contains("no rounds"), ParseError);
  CHECK_THROWS_WITH_AS(parse_dataset("{\"id\": \"a\", \"text\": \"x\", \"label\": \"A\", \"round\": 1}\n{oops\n"),
                       doctest::Contains("line 2"), ParseError);
  CHECK_THROWS_AS(parse_dataset("{\"id\": \"a\", \"text\": \"x\", \"label\": \"A\", \"round\": 0}"), ParseError);
  CHECK_THROWS_AS(parse_dataset("{\"id\": \"a\", \"label\": \"A\", \"round\": 1}"), ParseError);
  CHECK_THROWS_AS(parse_dataset(R"({"id": "a", "text": "x", "label": "A", "round": 1}
{"id": "a", "text": "y", "label": "A", "round": 1})"),
                  InvariantError);
  CHECK_THROWS_AS(parse_dataset(R"({"id": "a", "text": "x", "label": "A", "round": 1}
{"id": "b", "text": "y", "label": "A", "round": 2})"),
                  InvariantError);
  CHECK_THROWS_AS(parse_dataset(R"({"id": "a", "text": "x", "label": "A", "label_name": "p", "round": 1}
{"id": "b", "text": "y", "label": "A", "label_name": "q", "round": 1})"),
                  InvariantError);
}

TEST_CASE("sample_k_shot keeps k texts per label in original order") {
  RoundPlan plan;
  plan.rounds.resize(1);
  for (const char* l : {"A", "B"}) plan.rounds[0].new_labels.push_back(LabelDef{l, std::nullopt, 1});
  for (int i = 0; i < 20; ++i) {
    plan.rounds[0].train.push_back(TextDoc::make("t" + std::to_string(i), "x", i % 2 ? "A" : "B"));
  }
  const auto a = sample_k_shot(plan, 3, 5);
  const auto b = sample_k_shot(plan, 3, 5);
  CHECK(a == b);
  REQUIRE(a.rounds[0].train.size() == 6);
  std::size_t count_a = 0;
  std::vector<int> positions;
  for (const auto& d : a.rounds[0].train) {
    count_a += d.gold_label == "A";
    positions.push_back(std::stoi(d.id.substr(1)));
  }
  CHECK(count_a == 3);
  CHECK(std::is_sorted(positions.begin(), positions.end()));

  std::set<std::string> seen;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto sampled = sample_k_shot(plan, 3, seed);
    for (const auto& d : sampled.rounds[0].train) seen.insert(d.id);
  }
  CHECK(seen.size() == 20);  // every text is reachable

  CHECK_THROWS_WITH_AS(sample_k_shot(plan, 11, 0), doctest::Contains("label 'A'"), InvariantError);
  CHECK_THROWS_AS(sample_k_shot(plan, 0, 0), InvariantError);
}

TEST_CASE("split_rounds deals labels by the requested counts") {
  std::string flat;
  for (int i = 0; i < 30; ++i) {
    flat += R"({"id": "t)" + std::to_string(i) + R"(", "text": "w", "label": "L)" + std::to_string(i % 6) + "\"}\n";
  }
  const std::size_t counts[] = {1, 2, 3};
  const auto annotated = split_rounds(flat, 3, 9, counts);
  const auto plan = parse_dataset(annotated);
  REQUIRE(plan.rounds.size() == 3);
  CHECK(plan.rounds[0].new_labels.size() == 1);
  CHECK(plan.rounds[1].new_labels.size() == 2);
  CHECK(plan.rounds[2].new_labels.size() == 3);
  CHECK(split_rounds(flat, 3, 9, counts) == annotated);
  const auto even = parse_dataset(split_rounds(flat, 2, 1));
  CHECK(even.rounds[0].new_labels.size() == 3);
  const std::size_t bad[] = {1, 1, 1};
  CHECK_THROWS_AS(split_rounds(flat, 3, 9, bad), InvariantError);
}

TEST_CASE("Rng bounded draws are uniform and shuffles are permutations") {
  Rng rng(3);
  std::vector<int> hist(6, 0);
  for (int i = 0; i < 60000; ++i) ++hist[rng.below(6)];
  for (int h : hist) CHECK(std::abs(h - 10000) < 500);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.unit();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[i] = i;
  auto w = v;
  rng.shuffle(w);
  CHECK(w != v);
  std::sort(w.begin(), w.end());
  CHECK(w == v);
  // Same seed, same stream.
  Rng x(77);
  Rng y(77);
  for (int i = 0; i < 100; ++i) CHECK(x.below(1000003) == y.below(1000003));
}
