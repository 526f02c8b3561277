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

#include "gorag/prompts.hpp"

#include <algorithm>

#include "gorag/error.hpp"

namespace gorag {

std::string_view to_string(TemplateId id) {
  switch (id) {
    case TemplateId::extract:
      return "extract";
    case TemplateId::gen_label_desc:
      return "gen_label_desc";
    case TemplateId::classify:
      return "classify";
  }
  return "unknown";
}

TemplateId template_from_string(std::string_view name) {
  if (name == "extract") return TemplateId::extract;
  if (name == "gen_label_desc") return TemplateId::gen_label_desc;
  if (name == "classify") return TemplateId::classify;
  throw InvariantError("unknown template id '" + std::string(name) + "'");
}

const PromptTemplate& PromptTemplate::extract() {
  static const PromptTemplate t{
      TemplateId::extract,
      "Please extract some keywords from the following passage. "
      "Reply with the keywords only, separated by commas.\n\n{text}"};
  return t;
}

const PromptTemplate& PromptTemplate::gen_label_desc() {
  static const PromptTemplate t{
      TemplateId::gen_label_desc,
      "Write a short description (two or three sentences) of the text category "
      "\"{label}\". Mention the topics, terms and entities typical of texts in this "
      "category.\n\nDescription:"};
  return t;
}

const PromptTemplate& PromptTemplate::classify() {
  static const PromptTemplate t{
      TemplateId::classify,
      "Classify the passage into exactly one of the candidate labels. "
      "Answer with the label only, copied exactly as listed.\n\n"
      "{passage}Keywords: {keywords}\n\nCandidate labels:\n{candidates}\n{label_keywords}Answer:"};
  return t;
}

const PromptTemplate& PromptTemplate::builtin(TemplateId id) {
  switch (id) {
    case TemplateId::extract:
      return extract();
    case TemplateId::gen_label_desc:
      return gen_label_desc();
    case TemplateId::classify:
      return classify();
  }
  throw InvariantError("unknown template id");
}

std::string_view FilledPrompt::slot(std::string_view name) const {
  for (const auto& [k, v] : slots) {
    if (k == name) return v;
  }
  return {};
}

FilledPrompt fill(const PromptTemplate& tmpl, Slots slots) {
  FilledPrompt out{tmpl.id, std::move(slots), {}};
  std::vector<bool> used(out.slots.size(), false);
  const std::string& t = tmpl.text;
  std::size_t pos = 0;
  while (pos < t.size()) {
    const std::size_t open = t.find('{', pos);
    if (open == std::string::npos) {
      out.text.append(t, pos);
      break;
    }
    const std::size_t close = t.find('}', open);
    if (close == std::string::npos) throw InvariantError("unterminated slot in template");
    out.text.append(t, pos, open - pos);
    const std::string_view name(t.data() + open + 1, close - open - 1);
    auto it = std::find_if(out.slots.begin(), out.slots.end(), [&](const auto& s) { return s.first == name; });
    if (it == out.slots.end()) throw InvariantError("missing slot '" + std::string(name) + "'");
    used[static_cast<std::size_t>(it - out.slots.begin())] = true;
    out.text += it->second;
    pos = close + 1;
  }
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (!used[i]) throw InvariantError("template has no slot '" + out.slots[i].first + "'");
  }
  return out;
}

}  // namespace gorag
