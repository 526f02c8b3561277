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

#include "gorag/classify.hpp"

#include <chrono>
#include <unordered_map>

#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "gorag/error.hpp"
#include "gorag/log.hpp"

namespace gorag {
namespace {

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

bool is_quote(UChar32 c) {
  switch (c) {
    case '"':
    case '\'':
    case '`':
    case 0x201C:
    case 0x201D:
    case 0x2018:
    case 0x2019:
    case 0x00AB:
    case 0x00BB:
      return true;
    default:
      return false;
  }
}

bool is_terminal_punct(UChar32 c) {
  return c == '.' || c == ',' || c == ';' || c == ':' || c == '!' || c == '?' || c == 0x3002;
}

double ms_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

FilledPrompt build_prompt(const ClassifyInput& input, const PromptTemplate& tmpl, PromptMode mode) {
  if (tmpl.id != TemplateId::classify) throw InvariantError("build_prompt needs the classify template");

  std::string passage;
  if (mode == PromptMode::full_text) passage = "Passage:\n" + input.text.body + "\n\n";

  std::string candidates;
  std::string glosses;
  for (std::size_t i = 0; i < input.candidates.size(); ++i) {
    const auto& label = input.candidates[i];
    candidates += std::to_string(i + 1) + ". " + label.display() + "\n";
    auto it = input.label_keywords.find(label.id);
    if (it != input.label_keywords.end() && !it->second.empty()) {
      glosses += label.display() + ": " + join(it->second, ", ") + "\n";
    }
  }
  if (!glosses.empty()) glosses = "Label keywords:\n" + glosses + "\n";

  return fill(tmpl, {{"passage", std::move(passage)},
                     {"keywords", join(input.keywords, ", ")},
                     {"candidates", std::move(candidates)},
                     {"label_keywords", std::move(glosses)}});
}

std::string normalize_answer(std::string_view text) {
  icu::UnicodeString s =
      icu::UnicodeString::fromUTF8(icu::StringPiece(text.data(), static_cast<int32_t>(text.size())));
  bool changed = true;
  while (changed && !s.isEmpty()) {
    changed = false;
    s.trim();
    if (s.isEmpty()) break;
    const UChar32 first = s.char32At(0);
    const UChar32 last = s.char32At(s.length() - 1);
    if (is_terminal_punct(last)) {
      s.truncate(s.moveIndex32(s.length(), -1));
      changed = true;
    } else if (is_quote(last)) {
      s.truncate(s.moveIndex32(s.length(), -1));
      changed = true;
    }
    if (!s.isEmpty() && is_quote(first)) {
      s.remove(0, U16_LENGTH(first));
      changed = true;
    }
  }
  s.foldCase();
  std::string out;
  s.toUTF8String(out);
  return out;
}

ClassifyOutcome parse_and_match(std::string_view reply, std::span<const LabelDef> candidates,
                                std::span<const LabelDef> full_labels) {
  ClassifyOutcome out;
  out.raw_reply = std::string(reply);
  if (reply == kNoAnswer) return out;

  const std::string answer = normalize_answer(reply);
  if (answer.empty()) return out;
  auto matches = [&](const LabelDef& l) {
    return normalize_answer(l.id) == answer || (l.name && normalize_answer(*l.name) == answer);
  };
  for (const auto* set : {&candidates, &full_labels}) {
    for (const auto& label : *set) {
      if (matches(label)) {
        out.predicted = label.id;
        out.matched = MatchKind::exact;
        out.hallucination = false;
        return out;
      }
    }
  }
  return out;
}

std::string_view to_string(Ablation a) {
  switch (a) {
    case Ablation::none:
      return "none";
    case Ablation::offline:
      return "offline";
    case Ablation::unit:
      return "unit";
    case Ablation::keyword:
      return "keyword";
  }
  return "none";
}

Ablation ablation_from_string(std::string_view name) {
  if (name == "none") return Ablation::none;
  if (name == "offline") return Ablation::offline;
  if (name == "unit") return Ablation::unit;
  if (name == "keyword") return Ablation::keyword;
  throw InvariantError("unknown ablation '" + std::string(name) + "' (expected none, offline, unit or keyword)");
}

ClassifyOptions ClassifyOptions::for_ablation(Ablation a, PathDomain paths) {
  ClassifyOptions o;
  o.retrieval.paths = paths;
  o.retrieval.weights = a == Ablation::unit ? WeightMode::unit : WeightMode::stored;
  o.online_indexing = a != Ablation::offline;
  o.prompt = a == Ablation::keyword ? PromptMode::keywords_only : PromptMode::full_text;
  return o;
}

ClassifyRecord classify_query(const WeightedGraph& graph, LlmGateway& gateway, const TextDoc& text,
                              const LabelKeywords& label_keywords, const ClassifyOptions& options,
                              const std::vector<std::string>* keywords) {
  ClassifyRecord rec;
  rec.text_id = text.id;
  rec.gold = text.gold_label;

  if (keywords) {
    rec.keywords = *keywords;
  } else {
    try {
      rec.keywords = gateway.extract_keywords(text.body);
    } catch (const TransportError& e) {
      warn("keyword extraction failed for query '" + text.id + "': " + e.what());
    }
  }

  const auto start = std::chrono::steady_clock::now();
  rec.terminals = split_keywords(graph, rec.keywords);
  const auto result = steiner_candidates(graph, rec.terminals, options.retrieval);
  rec.retrieval_ms = ms_since(start);
  rec.tree_cost = result.total_cost;
  rec.fallback = result.fallback;

  const auto all_labels = graph.label_defs();
  std::vector<LabelDef> candidates;
  if (result.fallback == Fallback::full_label_set) {
    candidates = all_labels;
  } else {
    std::unordered_map<LabelId, const LabelDef*> by_id;
    for (const auto& l : all_labels) by_id.emplace(l.id, &l);
    for (const auto& id : result.candidates) candidates.push_back(*by_id.at(id));
  }
  for (const auto& c : candidates) rec.candidates.push_back(c.id);

  ClassifyInput input{text, rec.keywords, candidates, {}};
  for (const auto& c : candidates) {
    if (auto it = label_keywords.find(c.id); it != label_keywords.end()) input.label_keywords.emplace(*it);
  }
  const auto prompt = build_prompt(input, PromptTemplate::classify(), options.prompt);
  rec.prompt_chars = prompt.text.size();

  std::string reply;
  const auto llm_start = std::chrono::steady_clock::now();
  try {
    reply = gateway.classify(prompt);
  } catch (const TransportError& e) {
    warn("classification failed for query '" + text.id + "': " + e.what());
    reply = std::string(kNoAnswer);
  }
  rec.llm_ms = ms_since(llm_start);
  rec.outcome = parse_and_match(reply, candidates, all_labels);
  return rec;
}

void commit_query(WeightedGraph& graph, CorpusStats& stats, const TextDoc& text, ClassifyRecord& record,
                  const ClassifyOptions& options) {
  if (!options.commit) return;
  if (!stats.contains(text.id)) stats.ingest(text, record.keywords);
  if (options.online_indexing && record.outcome.predicted) {
    record.indexed = online_index(graph, text.id, record.terminals.exist, record.terminals.not_exist,
                                  *record.outcome.predicted, stats);
  }
}

ClassifyRecord classify_text(WeightedGraph& graph, CorpusStats& stats, LlmGateway& gateway, const TextDoc& text,
                             const LabelKeywords& label_keywords, const ClassifyOptions& options,
                             const std::vector<std::string>* keywords) {
  auto rec = classify_query(graph, gateway, text, label_keywords, options, keywords);
  commit_query(graph, stats, text, rec, options);
  return rec;
}

}  // namespace gorag
