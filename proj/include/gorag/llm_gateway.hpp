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

// Boundary to language models. Three calls matter to the pipeline:
// keyword extraction, label description, and classification. Two backends
// implement them: an OpenAI-compatible HTTP chat-completion client and a
// deterministic mock used by tests and offline runs.
//
// Mock rules (version 1):
//   extract   Tokenize the passage. Scanning left to right, a planted
//             marker phrase that starts at the current token is emitted as
//             one keyword and its tokens are consumed (longest marker
//             wins). Any other token is emitted when its document frequency
//             in the background corpus, divided by the corpus size, is
//             below `df_fraction` (an empty corpus keeps every token).
//             Output is deduplicated in first-seen order.
//   describe  The description is the label name; its keywords are the
//             name's tokens.
//   classify  Each candidate is scored by how many distinct query keyword
//             tokens also occur in the candidate's name or its listed label
//             keywords. The highest score wins; ties go to the
//             lexicographically smallest candidate. The reply is the
//             candidate exactly as listed. With `hallucination_rate` p > 0
//             the n-th call (0-based) instead replies with a non-label
//             string whenever floor((n+1)p) > floor(np), so exactly
//             round-down(N p) of N calls hallucinate.

#pragma once

#include <atomic>
#include <cstdint>
#include <fstream>
#include <memory>
#include <mutex>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

#include "gorag/corpus.hpp"
#include "gorag/prompts.hpp"

namespace gorag {

enum class BackendKind { http, mock };

std::string_view to_string(BackendKind kind);
BackendKind backend_from_string(std::string_view name);

struct LlmExchange {
  TemplateId template_id = TemplateId::extract;
  std::string filled_prompt;
  std::string raw_reply;
  BackendKind backend = BackendKind::mock;
  double latency_ms = 0.0;
};

/// Append-only JSONL log of exchanges. Writes are serialized.
class AuditLog {
 public:
  explicit AuditLog(const std::string& path);
  void append(const LlmExchange& exchange);

 private:
  std::mutex mu_;
  std::ofstream out_;
};

struct BackendConfig {
  std::string endpoint = "http://localhost:8000/v1/chat/completions";
  std::string model = "llama3";
  double temperature = 0.0;
  int max_tokens = 256;
  int timeout_ms = 60000;
  int retries = 2;
  int retry_backoff_ms = 250;
  std::size_t max_in_flight = 4;
  std::size_t max_prompt_chars = 32000;
  std::string api_key_env = "GORAG_API_KEY";
  std::string system_preamble =
      "You are a careful assistant for text classification. Follow the instructions exactly and "
      "answer concisely.";
};

struct LabelDescription {
  std::string text;
  std::vector<std::string> keywords;
};

/// Splits a free-form keyword reply on commas, semicolons and newlines,
/// strips list markers and "header:" prefixes, normalizes each item with
/// normalize_phrase() and drops empties and duplicates.
std::vector<std::string> parse_keyword_reply(std::string_view reply);

class LlmGateway {
 public:
  LlmGateway(BackendKind kind, std::size_t max_prompt_chars);
  virtual ~LlmGateway() = default;
  LlmGateway(const LlmGateway&) = delete;
  LlmGateway& operator=(const LlmGateway&) = delete;

  /// Throws TransportError when the backend fails after its retries.
  std::vector<std::string> extract_keywords(std::string_view text);

  /// Empty result for labels without a name.
  virtual LabelDescription describe_label(const LabelDef& label);
  std::vector<std::string> generate_label_keywords(const LabelDef& label);

  /// Verbatim reply. Throws TransportError on backend failure and when the
  /// prompt exceeds the character budget.
  std::string classify(const FilledPrompt& prompt);

  void set_audit_log(std::shared_ptr<AuditLog> log) { audit_ = std::move(log); }
  BackendKind kind() const { return kind_; }

 protected:
  virtual std::string complete(const FilledPrompt& prompt) = 0;

  /// complete() plus budget check, timing and audit logging.
  std::string call(const FilledPrompt& prompt);

 private:
  BackendKind kind_;
  std::size_t max_prompt_chars_;
  std::shared_ptr<AuditLog> audit_;
};

struct MockConfig {
  double df_fraction = 0.1;
  std::vector<std::string> markers;
  double hallucination_rate = 0.0;
  std::string hallucination_reply = "I cannot tell which category this passage belongs to.";
};

class MockGateway : public LlmGateway {
 public:
  MockGateway(MockConfig config, std::shared_ptr<const CorpusStats> background);

  LabelDescription describe_label(const LabelDef& label) override;

  /// The extraction rule, applied directly.
  std::vector<std::string> mock_keywords(std::string_view text) const;

  /// The classification rule applied to a filled classify prompt.
  std::string mock_classify(const FilledPrompt& prompt) const;

 protected:
  std::string complete(const FilledPrompt& prompt) override;

 private:
  MockConfig config_;
  std::vector<std::vector<std::string>> markers_;
  std::shared_ptr<const CorpusStats> background_;
  std::atomic<std::uint64_t> classify_calls_{0};
};

class HttpGateway : public LlmGateway {
 public:
  explicit HttpGateway(BackendConfig config);

  /// Chat-completion request body (compact JSON, keys sorted).
  static std::string request_body(const BackendConfig& config, const FilledPrompt& prompt);

  /// choices[0].message.content of a chat-completion response.
  static std::string reply_content(std::string_view response_body);

  const BackendConfig& config() const { return config_; }

 protected:
  std::string complete(const FilledPrompt& prompt) override;

 private:
  BackendConfig config_;
  std::string origin_;  // scheme://host[:port]
  std::string path_;
  std::counting_semaphore<1024> in_flight_;
};

/// Mock gateway whose background corpus holds every text of the plan.
std::unique_ptr<MockGateway> make_mock_gateway(const RoundPlan& plan, MockConfig config);

/// Reads a marker file: one phrase per line, blank lines ignored.
std::vector<std::string> load_markers(const std::string& path);

}  // namespace gorag
