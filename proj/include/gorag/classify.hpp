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

// Classification stage: prompt assembly, answer matching, and the
// per-text pipeline that ties retrieval, the LLM and online indexing
// together.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gorag/corpus.hpp"
#include "gorag/graph_index.hpp"
#include "gorag/llm_gateway.hpp"
#include "gorag/prompts.hpp"
#include "gorag/retrieval.hpp"

namespace gorag {

enum class PromptMode {
  full_text,      // passage, keywords, candidates, label keywords
  keywords_only,  // passage omitted
};

struct ClassifyInput {
  TextDoc text;
  std::vector<std::string> keywords;
  std::vector<LabelDef> candidates;
  LabelKeywords label_keywords;
};

/// Fills the classify template. Candidates are listed "N. <label>" in the
/// given order; the label keyword block is omitted when no candidate has
/// keywords. Byte-deterministic.
FilledPrompt build_prompt(const ClassifyInput& input, const PromptTemplate& tmpl = PromptTemplate::classify(),
                          PromptMode mode = PromptMode::full_text);

/// Reply recorded when the backend could not answer.
inline constexpr std::string_view kNoAnswer = "<no-answer>";

enum class MatchKind { exact, none };

struct ClassifyOutcome {
  std::optional<LabelId> predicted;
  std::string raw_reply;
  MatchKind matched = MatchKind::none;
  bool hallucination = true;

  /// The backend gave no reply at all (also a hallucination).
  bool failed() const { return raw_reply == kNoAnswer; }
};

/// Trim, strip surrounding quotes and trailing punctuation, case-fold.
std::string normalize_answer(std::string_view text);

/// Exact match of the normalized reply against label ids and names,
/// candidates first and then the full label set. A reply matching no label
/// is a hallucination, and so is kNoAnswer.
ClassifyOutcome parse_and_match(std::string_view reply, std::span<const LabelDef> candidates,
                                std::span<const LabelDef> full_labels);

enum class Ablation { none, offline, unit, keyword };

std::string_view to_string(Ablation a);
Ablation ablation_from_string(std::string_view name);

struct ClassifyOptions {
  RetrievalOptions retrieval;
  PromptMode prompt = PromptMode::full_text;
  bool online_indexing = true;
  /// When false the text is neither ingested nor indexed (re-tests). A
  /// committed text that is already in the statistics is not re-ingested.
  bool commit = true;

  static ClassifyOptions for_ablation(Ablation a, PathDomain paths = PathDomain::mst);
};

struct ClassifyRecord {
  TextId text_id;
  std::optional<LabelId> gold;
  ClassifyOutcome outcome;
  std::vector<std::string> keywords;
  TerminalSet terminals;
  std::vector<LabelId> candidates;
  double tree_cost = 0.0;
  Fallback fallback = Fallback::none;
  bool indexed = false;
  std::size_t prompt_chars = 0;
  double retrieval_ms = 0.0;
  double llm_ms = 0.0;
};

/// Extract keywords -> ingest -> split -> Steiner candidates (or fallback)
/// -> prompt -> LLM -> match -> online indexing when the prediction is a
/// real label. LLM failures degrade to an empty keyword set or a
/// no-answer outcome. `keywords`, when given, replaces the extraction call.
/// Read-only half of classify_text(): everything up to the matched answer.
/// Safe to run concurrently against one graph.
ClassifyRecord classify_query(const WeightedGraph& graph, LlmGateway& gateway, const TextDoc& text,
                              const LabelKeywords& label_keywords, const ClassifyOptions& options,
                              const std::vector<std::string>* keywords = nullptr);

/// Write half: ingests the text and runs online indexing when the options
/// commit. Sets record.indexed.
void commit_query(WeightedGraph& graph, CorpusStats& stats, const TextDoc& text, ClassifyRecord& record,
                  const ClassifyOptions& options);

ClassifyRecord classify_text(WeightedGraph& graph, CorpusStats& stats, LlmGateway& gateway, const TextDoc& text,
                             const LabelKeywords& label_keywords, const ClassifyOptions& options,
                             const std::vector<std::string>* keywords = nullptr);

}  // namespace gorag
