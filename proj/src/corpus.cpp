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
#include <unordered_set>

#include "gorag/corpus.hpp"
#include "gorag/error.hpp"

namespace gorag {

TextDoc TextDoc::make(TextId id, std::string body, std::optional<LabelId> label) {
  TextDoc doc{std::move(id), std::move(body), std::move(label), {}};
  doc.tokens = tokenize(doc.body);
  return doc;
}

std::vector<LabelDef> RoundPlan::labels_through(std::size_t round) const {
  std::vector<LabelDef> out;
  for (std::size_t r = 0; r < round && r < rounds.size(); ++r) {
    out.insert(out.end(), rounds[r].new_labels.begin(), rounds[r].new_labels.end());
  }
  return out;
}

std::size_t RoundPlan::label_count() const {
  std::size_t n = 0;
  for (const auto& r : rounds) n += r.new_labels.size();
  return n;
}

void CorpusStats::ingest(const TextDoc& doc, std::span<const std::string> keywords) {
  if (index_of_.contains(doc.id)) {
    throw InvariantError("text '" + doc.id + "' already ingested");
  }
  const auto idx = static_cast<std::uint32_t>(texts_.size());
  Entry e;
  e.id = doc.id;
  e.tokens = doc.tokens.empty() && !doc.body.empty() ? tokenize(doc.body) : doc.tokens;
  e.info.length = e.tokens.size();
  e.info.keywords.assign(keywords.begin(), keywords.end());

  std::unordered_set<std::string_view> seen;
  for (const auto& tok : e.tokens) {
    if (seen.insert(tok).second) postings_[tok].push_back(idx);
  }
  index_of_.emplace(doc.id, idx);
  texts_.push_back(std::move(e));
}

std::size_t CorpusStats::doc_freq(std::string_view keyword) const {
  const auto phrase = phrase_tokens(keyword);
  if (phrase.empty()) return 0;

  // Scan the shortest posting list among the phrase's tokens.
  const std::vector<std::uint32_t>* shortest = nullptr;
  for (const auto& tok : phrase) {
    auto it = postings_.find(tok);
    if (it == postings_.end()) return 0;
    if (!shortest || it->second.size() < shortest->size()) shortest = &it->second;
  }
  if (phrase.size() == 1) return shortest->size();

  std::size_t df = 0;
  for (auto idx : *shortest) {
    if (count_phrase(texts_[idx].tokens, phrase) > 0) ++df;
  }
  return df;
}

const CorpusStats::Entry& CorpusStats::entry(const TextId& id) const {
  auto it = index_of_.find(id);
  if (it == index_of_.end()) throw InvariantError("unknown text id '" + id + "'");
  return texts_[it->second];
}

std::size_t CorpusStats::count(std::string_view keyword, const TextId& id) const {
  const auto phrase = phrase_tokens(keyword);
  return count_phrase(entry(id).tokens, phrase);
}

std::size_t CorpusStats::length(const TextId& id) const { return entry(id).info.length; }

const CorpusStats::PerText& CorpusStats::per_text(const TextId& id) const { return entry(id).info; }

}  // namespace gorag
