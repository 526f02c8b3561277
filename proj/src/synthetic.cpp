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

#include "gorag/synthetic.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <unordered_set>

#include "gorag/error.hpp"
#include "gorag/rng.hpp"

namespace gorag {
namespace {

class WordMaker {
 public:
  explicit WordMaker(Rng& rng) : rng_(rng) {}

  std::string next() {
    static constexpr std::string_view kOnset = "bdfgklmnprstvz";
    static constexpr std::string_view kVowel = "aeiou";
    for (;;) {
      std::string w;
      for (int s = 0; s < 3; ++s) {
        w += kOnset[rng_.below(kOnset.size())];
        w += kVowel[rng_.below(kVowel.size())];
      }
      if (rng_.below(2)) w += kOnset[rng_.below(kOnset.size())];
      if (used_.insert(w).second) return w;
    }
  }

 private:
  Rng& rng_;
  std::unordered_set<std::string> used_;
};

struct LabelVocab {
  LabelDef def;
  std::vector<std::string> topic;
  std::vector<std::string> markers;
};

}  // namespace

SynthCorpus make_synthetic(const SynthConfig& cfg) {
  if (cfg.labels == 0 || cfg.rounds == 0 || cfg.rounds > cfg.labels) {
    throw InvariantError("synthetic corpus needs 1 <= rounds <= labels");
  }
  if (cfg.topic_vocab < 2 || cfg.markers_per_label == 0) {
    throw InvariantError("synthetic corpus needs a topic vocabulary of at least 2 and one marker per label");
  }
  if (cfg.filler_per_text > cfg.filler_pool) throw InvariantError("filler_per_text exceeds filler_pool");
  if (cfg.noise < 0.0 || cfg.noise > 1.0) throw InvariantError("noise must lie in [0, 1]");

  Rng rng(cfg.seed);
  WordMaker words(rng);

  std::vector<std::string> filler(cfg.filler_pool);
  for (auto& w : filler) w = words.next();

  std::vector<LabelVocab> vocab(cfg.labels);
  SynthCorpus out;
  for (std::size_t i = 0; i < cfg.labels; ++i) {
    auto& v = vocab[i];
    char id[16];
    std::snprintf(id, sizeof id, "c%02zu", i + 1);
    v.def.id = id;
    v.topic.push_back(words.next());
    v.topic.push_back(words.next());
    if (cfg.named) v.def.name = v.topic[0] + " " + v.topic[1];
    while (v.topic.size() < cfg.topic_vocab) v.topic.push_back(words.next());
    for (std::size_t m = 0; m < cfg.markers_per_label; ++m) {
      v.markers.push_back(v.topic[m % 2] + " " + words.next());
      out.markers.push_back(v.markers.back());
    }
  }

  // Zipf-like skew over topic positions.
  std::vector<double> cumulative(cfg.topic_vocab);
  double total = 0.0;
  for (std::size_t i = 0; i < cfg.topic_vocab; ++i) cumulative[i] = total += 1.0 / static_cast<double>(i + 1);

  auto other_label = [&](std::size_t self) {
    if (cfg.labels == 1) return self;
    const std::size_t k = rng.below(cfg.labels - 1);
    return k >= self ? k + 1 : k;
  };
  auto topic_word = [&](std::size_t label) -> const std::string& {
    const double u = rng.unit() * total;
    std::size_t i = 0;
    while (i + 1 < cumulative.size() && cumulative[i] <= u) ++i;
    return vocab[label].topic[i];
  };

  std::size_t serial = 0;
  auto make_text = [&](std::size_t label) {
    std::vector<std::string> units;
    std::vector<std::string> pool = filler;
    for (std::size_t i = 0; i < cfg.filler_per_text; ++i) {
      std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
      units.push_back(pool[i]);
    }
    for (std::size_t i = 0; i < cfg.topic_per_text; ++i) {
      const std::size_t source = rng.unit() < cfg.noise ? other_label(label) : label;
      units.push_back(topic_word(source));
    }
    const std::size_t marker_source = rng.unit() < cfg.noise ? other_label(label) : label;
    const auto& markers = vocab[marker_source].markers;
    units.push_back(markers[rng.below(markers.size())]);
    rng.shuffle(units);

    std::string body;
    for (const auto& u : units) {
      if (!body.empty()) body += ' ';
      body += u;
    }
    body[0] = static_cast<char>(body[0] - 'a' + 'A');
    body += '.';
    char id[24];
    std::snprintf(id, sizeof id, "t%05zu", ++serial);
    return TextDoc::make(id, std::move(body), vocab[label].def.id);
  };

  out.plan.rounds.resize(cfg.rounds);
  for (std::size_t r = 0; r < cfg.rounds; ++r) {
    auto& round = out.plan.rounds[r];
    const std::size_t lo = r * cfg.labels / cfg.rounds;
    const std::size_t hi = (r + 1) * cfg.labels / cfg.rounds;
    for (std::size_t y = lo; y < hi; ++y) {
      vocab[y].def.round_introduced = static_cast<int>(r + 1);
      round.new_labels.push_back(vocab[y].def);
    }
    for (std::size_t y = lo; y < hi; ++y) {
      for (std::size_t i = 0; i < cfg.train_per_label; ++i) round.train.push_back(make_text(y));
    }
    for (std::size_t i = 0; i < cfg.test_per_label; ++i) {
      for (std::size_t y = lo; y < hi; ++y) round.test.push_back(make_text(y));
    }
  }
  return out;
}

void write_synthetic(const SynthCorpus& corpus, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir);
  std::ofstream data(base / "dataset.jsonl", std::ios::binary);
  std::ofstream markers(base / "markers.txt", std::ios::binary);
  if (!data || !markers) throw Error("cannot write synthetic corpus to '" + dir + "'");
  data << dump_dataset(corpus.plan);
  for (const auto& m : corpus.markers) markers << m << '\n';
}

}  // namespace gorag
