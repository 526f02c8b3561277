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

#include "gorag/llm_gateway.hpp"

#include <atomic>
#include <chrono>
#include <iostream>
#include <unordered_set>

#include <json.hpp>

#include "gorag/error.hpp"
#include "gorag/log.hpp"

namespace gorag {

namespace {
std::atomic<LogLevel> g_level{LogLevel::warning};
std::mutex g_log_mu;
}  // namespace

void set_log_level(LogLevel level) { g_level = level; }
LogLevel log_level() { return g_level; }

void log(LogLevel level, std::string_view message) {
  if (level < g_level.load()) return;
  static constexpr const char* kNames[] = {"debug", "info", "warning", "error"};
  std::lock_guard lock(g_log_mu);
  std::clog << "[gorag " << kNames[static_cast<int>(level)] << "] " << message << '\n';
}

std::string_view to_string(BackendKind kind) { return kind == BackendKind::http ? "http" : "mock"; }

BackendKind backend_from_string(std::string_view name) {
  if (name == "http") return BackendKind::http;
  if (name == "mock") return BackendKind::mock;
  throw InvariantError("unknown backend '" + std::string(name) + "' (expected http or mock)");
}

AuditLog::AuditLog(const std::string& path) : out_(path, std::ios::app) {
  if (!out_) throw Error("cannot open audit log '" + path + "'");
}

void AuditLog::append(const LlmExchange& ex) {
  nlohmann::json rec;
  rec["template_id"] = to_string(ex.template_id);
  rec["filled_prompt"] = ex.filled_prompt;
  rec["raw_reply"] = ex.raw_reply;
  rec["backend"] = to_string(ex.backend);
  rec["latency_ms"] = ex.latency_ms;
  const std::string line = rec.dump();
  std::lock_guard lock(mu_);
  out_ << line << '\n';
  out_.flush();
}

std::vector<std::string> parse_keyword_reply(std::string_view reply) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  std::size_t pos = 0;
  while (pos <= reply.size()) {
    std::size_t end = reply.find_first_of(",;\n", pos);
    if (end == std::string_view::npos) end = reply.size();
    std::string_view item = reply.substr(pos, end - pos);
    pos = end + 1;

    auto trim = [](std::string_view s) {
      const auto b = s.find_first_not_of(" \t\r");
      if (b == std::string_view::npos) return std::string_view{};
      return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
    };
    item = trim(item);
    // "1." / "2)" numbering
    std::size_t digits = 0;
    while (digits < item.size() && item[digits] >= '0' && item[digits] <= '9') ++digits;
    if (digits > 0 && digits < item.size() && (item[digits] == '.' || item[digits] == ')')) {
      item = trim(item.substr(digits + 1));
    }
    if (const auto colon = item.rfind(':'); colon != std::string_view::npos) item = item.substr(colon + 1);

    std::string kw = normalize_phrase(item);
    if (kw.empty()) continue;
    if (seen.insert(kw).second) out.push_back(std::move(kw));
  }
  return out;
}

LlmGateway::LlmGateway(BackendKind kind, std::size_t max_prompt_chars)
    : kind_(kind), max_prompt_chars_(max_prompt_chars) {}

std::string LlmGateway::call(const FilledPrompt& prompt) {
  if (max_prompt_chars_ > 0 && prompt.text.size() > max_prompt_chars_) {
    throw TransportError("prompt of " + std::to_string(prompt.text.size()) + " characters exceeds the budget of " +
                         std::to_string(max_prompt_chars_));
  }
  const auto start = std::chrono::steady_clock::now();
  std::string reply = complete(prompt);
  const std::chrono::duration<double, std::milli> elapsed = std::chrono::steady_clock::now() - start;
  if (audit_) audit_->append(LlmExchange{prompt.id, prompt.text, reply, kind_, elapsed.count()});
  return reply;
}

std::vector<std::string> LlmGateway::extract_keywords(std::string_view text) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) return {};
  const auto reply = call(fill(PromptTemplate::extract(), {{"text", std::string(text)}}));
  auto keywords = parse_keyword_reply(reply);
  if (keywords.empty() && !reply.empty()) {
    warn("keyword reply could not be parsed; continuing with no keywords");
  }
  return keywords;
}

LabelDescription LlmGateway::describe_label(const LabelDef& label) {
  if (!label.name) return {};
  LabelDescription desc;
  desc.text = call(fill(PromptTemplate::gen_label_desc(), {{"label", *label.name}}));
  desc.keywords = extract_keywords(desc.text);
  return desc;
}

std::vector<std::string> LlmGateway::generate_label_keywords(const LabelDef& label) {
  return describe_label(label).keywords;
}

std::string LlmGateway::classify(const FilledPrompt& prompt) {
  if (prompt.id != TemplateId::classify) throw InvariantError("classify() needs a classify prompt");
  return call(prompt);
}

}  // namespace gorag
