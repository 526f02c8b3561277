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
#include <fstream>
#include <set>
#include <unordered_set>

#include "gorag/error.hpp"
#include "gorag/llm_gateway.hpp"

namespace gorag {
namespace {

std::vector<std::string_view> lines_of(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < s.size()) {
    std::size_t end = s.find('\n', pos);
    if (end == std::string_view::npos) end = s.size();
    if (end > pos) out.push_back(s.substr(pos, end - pos));
    pos = end + 1;
  }
  return out;
}

std::string join(const std::vector<std::string>& items, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += sep;
    out += items[i];
  }
  return out;
}

void add_tokens(std::set<std::string>& into, std::string_view text) {
  for (auto& t : tokenize(text)) into.insert(std::move(t));
}

}  // namespace

MockGateway::MockGateway(MockConfig config, std::shared_ptr<const CorpusStats> background)
    : LlmGateway(BackendKind::mock, 0), config_(std::move(config)), background_(std::move(background)) {
  for (const auto& m : config_.markers) {
    auto toks = tokenize(m);
    if (!toks.empty()) markers_.push_back(std::move(toks));
  }
  // Longest first so the scan prefers the longest marker at a position.
  std::stable_sort(markers_.begin(), markers_.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });
}

std::vector<std::string> MockGateway::mock_keywords(std::string_view text) const {
  const auto tokens = tokenize(text);
  const std::size_t total = background_ ? background_->total_texts() : 0;
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  auto emit = [&](std::string kw) {
    if (seen.insert(kw).second) out.push_back(std::move(kw));
  };

  for (std::size_t i = 0; i < tokens.size();) {
    const std::vector<std::string>* hit = nullptr;
    for (const auto& m : markers_) {
      if (i + m.size() <= tokens.size() && std::equal(m.begin(), m.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        hit = &m;
        break;
      }
    }
    if (hit) {
      emit(join(*hit, " "));
      i += hit->size();
      continue;
    }
    const double fraction =
        total == 0 ? 0.0 : static_cast<double>(background_->doc_freq(tokens[i])) / static_cast<double>(total);
    if (fraction < config_.df_fraction) emit(tokens[i]);
    ++i;
  }
  return out;
}

std::string MockGateway::mock_classify(const FilledPrompt& prompt) const {
  std::set<std::string> query;
  for (const auto& kw : parse_keyword_reply(prompt.slot("keywords"))) add_tokens(query, kw);

  std::vector<std::string> candidates;
  for (auto line : lines_of(prompt.slot("candidates"))) {
    // "N. display"
    const auto dot = line.find(". ");
    candidates.emplace_back(dot == std::string_view::npos ? line : line.substr(dot + 2));
  }
  if (candidates.empty()) return config_.hallucination_reply;

  std::vector<std::set<std::string>> vocab(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) add_tokens(vocab[i], candidates[i]);
  for (auto line : lines_of(prompt.slot("label_keywords"))) {
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      const auto& c = candidates[i];
      if (line.size() > c.size() + 1 && line.substr(0, c.size()) == c && line.substr(c.size(), 2) == ": ") {
        for (const auto& kw : parse_keyword_reply(line.substr(c.size() + 2))) add_tokens(vocab[i], kw);
        break;
      }
    }
  }

  std::size_t best = 0;
  std::size_t best_score = 0;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    std::size_t score = 0;
    for (const auto& t : vocab[i]) score += query.count(t);
    if (i == 0 || score > best_score || (score == best_score && candidates[i] < candidates[best])) {
      best = i;
      best_score = score;
    }
  }
  return candidates[best];
}

std::string MockGateway::complete(const FilledPrompt& prompt) {
  switch (prompt.id) {
    case TemplateId::extract: {
      return join(mock_keywords(prompt.slot("text")), ", ");
    }
    case TemplateId::gen_label_desc:
      return std::string(prompt.slot("label"));
    case TemplateId::classify: {
      const double p = config_.hallucination_rate;
      if (p > 0.0) {
        const auto ppm = static_cast<std::uint64_t>(p * 1e6 + 0.5);
        const std::uint64_t n = classify_calls_.fetch_add(1);
        if ((n + 1) * ppm / 1000000 > n * ppm / 1000000) return config_.hallucination_reply;
      }
      return mock_classify(prompt);
    }
  }
  throw InvariantError("mock backend: unknown template");
}

LabelDescription MockGateway::describe_label(const LabelDef& label) {
  if (!label.name) return {};
  LabelDescription desc;
  desc.text = call(fill(PromptTemplate::gen_label_desc(), {{"label", *label.name}}));
  std::unordered_set<std::string> seen;
  for (auto& tok : tokenize(desc.text)) {
    if (seen.insert(tok).second) desc.keywords.push_back(std::move(tok));
  }
  return desc;
}

std::unique_ptr<MockGateway> make_mock_gateway(const RoundPlan& plan, MockConfig config) {
  auto background = std::make_shared<CorpusStats>();
  for (const auto& round : plan.rounds) {
    for (const auto* texts : {&round.train, &round.test}) {
      for (const auto& doc : *texts) background->ingest(doc, {});
    }
  }
  return std::make_unique<MockGateway>(std::move(config), std::move(background));
}

std::vector<std::string> load_markers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open marker file '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(line);
  }
  return out;
}

}  // namespace gorag
