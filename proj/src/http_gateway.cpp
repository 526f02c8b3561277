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

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "gorag/error.hpp"
#include "gorag/llm_gateway.hpp"
#include "gorag/log.hpp"

namespace gorag {
namespace {

using json = nlohmann::json;

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos) throw InvariantError("endpoint '" + url + "' has no scheme");
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

class SemaphoreGuard {
 public:
  explicit SemaphoreGuard(std::counting_semaphore<1024>& s) : s_(s) { s_.acquire(); }
  ~SemaphoreGuard() { s_.release(); }
  SemaphoreGuard(const SemaphoreGuard&) = delete;
  SemaphoreGuard& operator=(const SemaphoreGuard&) = delete;

 private:
  std::counting_semaphore<1024>& s_;
};

}  // namespace

HttpGateway::HttpGateway(BackendConfig config)
    : LlmGateway(BackendKind::http, config.max_prompt_chars),
      config_(std::move(config)),
      in_flight_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(config_.max_in_flight, 1, 1024))) {
  if (config_.temperature < 0.0) throw InvariantError("temperature must be >= 0");
  if (config_.max_tokens <= 0) throw InvariantError("max_tokens must be positive");
  std::tie(origin_, path_) = split_url(config_.endpoint);
}

std::string HttpGateway::request_body(const BackendConfig& config, const FilledPrompt& prompt) {
  json messages = json::array();
  if (!config.system_preamble.empty()) {
    messages.push_back({{"role", "system"}, {"content", config.system_preamble}});
  }
  messages.push_back({{"role", "user"}, {"content", prompt.text}});
  json body;
  body["model"] = config.model;
  body["messages"] = std::move(messages);
  body["temperature"] = config.temperature;
  body["max_tokens"] = config.max_tokens;
  body["stream"] = false;
  return body.dump();
}

std::string HttpGateway::reply_content(std::string_view response_body) {
  json doc;
  try {
    doc = json::parse(response_body);
  } catch (const json::parse_error& e) {
    throw TransportError(std::string("chat-completion response is not JSON: ") + e.what());
  }
  const auto& choices = doc.contains("choices") ? doc["choices"] : json();
  if (!choices.is_array() || choices.empty() || !choices[0].contains("message") ||
      !choices[0]["message"].contains("content")) {
    throw TransportError("chat-completion response has no choices[0].message.content");
  }
  const auto& content = choices[0]["message"]["content"];
  return content.is_string() ? content.get<std::string>() : std::string();
}

std::string HttpGateway::complete(const FilledPrompt& prompt) {
  const std::string body = request_body(config_, prompt);
  httplib::Headers headers;
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  SemaphoreGuard slot(in_flight_);
  std::string last_error;
  for (int attempt = 0; attempt <= config_.retries; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(config_.retry_backoff_ms << (attempt - 1)));
    }
    httplib::Client client(origin_);
    const auto timeout = std::chrono::milliseconds(config_.timeout_ms);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);

    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 200) return reply_content(res->body);
    last_error = "HTTP status " + std::to_string(res->status);
    if (res->status != 429 && res->status < 500) break;
  }
  throw TransportError("LLM backend at " + config_.endpoint + ": " + last_error);
}

}  // namespace gorag
