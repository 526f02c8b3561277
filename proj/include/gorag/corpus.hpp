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

// Texts, labels, round plans and the running corpus statistics that feed
// keyword/label edge weighting.
//
// Tokenization rule: the body is lowercased (ICU root locale), then split
// with the ICU word break iterator. Segments whose rule status is "none"
// (whitespace, punctuation, symbols) are dropped. Hyphens therefore split
// words ("TF-IDF" -> "tf", "idf") while apostrophes and decimal points
// inside a word or number do not ("don't", "3.14").
//
// Keywords are normalized phrases: the tokens of the phrase joined by a
// single space. A keyword is contained in a text when its token sequence
// occurs contiguously in the text's tokens.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace gorag {

using TextId = std::string;
using LabelId = std::string;

std::vector<std::string> tokenize(std::string_view body);

/// tokenize() joined by single spaces; the canonical form of a keyword.
std::string normalize_phrase(std::string_view phrase);

struct TextDoc {
  TextId id;
  std::string body;
  std::optional<LabelId> gold_label;
  std::vector<std::string> tokens;

  static TextDoc make(TextId id, std::string body, std::optional<LabelId> label = std::nullopt);
  bool operator==(const TextDoc&) const = default;
};

struct LabelDef {
  LabelId id;
  std::optional<std::string> name;
  int round_introduced = 1;

  /// Name when present, otherwise the id. This is what prompts show.
  const std::string& display() const { return name ? *name : id; }
  bool operator==(const LabelDef&) const = default;
};

struct Round {
  std::vector<LabelDef> new_labels;
  std::vector<TextDoc> train;
  std::vector<TextDoc> test;
  bool operator==(const Round&) const = default;
};

struct RoundPlan {
  std::vector<Round> rounds;

  /// Cumulative label set through `round` (1-based), in introduction order.
  std::vector<LabelDef> labels_through(std::size_t round) const;
  std::size_t label_count() const;
  bool operator==(const RoundPlan&) const = default;
};

enum class DatasetFormat { jsonl };

/// Records are {"id", "text", "label", "round"} with optional "split"
/// ("train" default, or "test") and "label_name".
RoundPlan load_dataset(const std::string& path, DatasetFormat format = DatasetFormat::jsonl);
RoundPlan parse_dataset(std::string_view jsonl);

/// Serializes back to the JSONL record form, round by round.
std::string dump_dataset(const RoundPlan& plan);

/// Keeps exactly k training texts per label, chosen uniformly with a
/// seeded generator. Selected texts keep their original relative order.
RoundPlan sample_k_shot(const RoundPlan& plan, std::size_t k, std::uint64_t seed);

/// Assigns round numbers to a flat labeled JSONL file. Labels are shuffled
/// with `seed` and dealt out according to `labels_per_round` (or evenly when
/// empty). Returns the annotated JSONL text.
std::string split_rounds(std::string_view flat_jsonl, std::size_t num_rounds, std::uint64_t seed,
                         std::span<const std::size_t> labels_per_round = {});

/// Append-only statistics over every text seen so far (training texts,
/// label-description pseudo-texts and query texts).
///
/// Document frequencies are computed over the full token content of every
/// ingested text, not only over keywords supplied at ingestion, so a
/// keyword first extracted late still counts earlier texts containing it.
class CorpusStats {
 public:
  struct PerText {
    std::size_t length = 0;
    std::vector<std::string> keywords;
  };

  /// Throws InvariantError when doc.id was already ingested.
  void ingest(const TextDoc& doc, std::span<const std::string> keywords);

  bool contains(const TextId& id) const { return index_of_.contains(id); }
  std::size_t total_texts() const { return texts_.size(); }

  /// Number of ingested texts containing the keyword phrase.
  std::size_t doc_freq(std::string_view keyword) const;

  /// Contiguous occurrences of the keyword phrase in the text.
  /// Throws InvariantError for an unknown text id.
  std::size_t count(std::string_view keyword, const TextId& id) const;

  /// Token length |t|. Throws InvariantError for an unknown text id.
  std::size_t length(const TextId& id) const;

  const PerText& per_text(const TextId& id) const;

 private:
  struct Entry {
    TextId id;
    std::vector<std::string> tokens;
    PerText info;
  };

  const Entry& entry(const TextId& id) const;

  std::vector<Entry> texts_;
  std::unordered_map<TextId, std::uint32_t> index_of_;
  // token -> ascending indices of texts containing it
  std::unordered_map<std::string, std::vector<std::uint32_t>> postings_;
};

/// Number of contiguous occurrences of `phrase` in `tokens`.
std::size_t count_phrase(std::span<const std::string> tokens, std::span<const std::string> phrase);

/// Splits a normalized keyword on single spaces.
std::vector<std::string> phrase_tokens(std::string_view keyword);

}  // namespace gorag
