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

// Seeded synthetic corpora with planted keywords, for tests, benchmarks
// and offline demos.
//
// Every label owns a name of two pseudo-words, a topic vocabulary whose
// first two entries are the name words, and marker phrases made of one
// name word plus a fresh pseudo-word. A text of label y holds filler words
// drawn from a shared pool (high document frequency, so the mock extractor
// ignores them), a skewed sample of y's topic words and one of y's markers.
// With noise p each topic word and the marker are independently swapped
// for those of another label with probability p.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gorag/corpus.hpp"

namespace gorag {

struct SynthConfig {
  std::size_t labels = 20;
  std::size_t rounds = 4;
  std::size_t train_per_label = 10;
  std::size_t test_per_label = 8;
  double noise = 0.0;
  std::uint64_t seed = 7;
  std::size_t filler_pool = 30;
  std::size_t filler_per_text = 15;
  std::size_t topic_vocab = 20;
  std::size_t topic_per_text = 8;
  std::size_t markers_per_label = 2;
  bool named = true;
};

struct SynthCorpus {
  RoundPlan plan;
  std::vector<std::string> markers;
};

/// Labels are dealt to rounds in order, as evenly as possible.
SynthCorpus make_synthetic(const SynthConfig& config);

/// Writes <dir>/dataset.jsonl and <dir>/markers.txt.
void write_synthetic(const SynthCorpus& corpus, const std::string& dir);

}  // namespace gorag
