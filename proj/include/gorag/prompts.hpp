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

// Prompt templates for keyword extraction, label description and
// classification. Placeholders are written {slot}; filling is strict.
//
// Template versions are pinned (kPromptVersion). Only the extraction
// instruction is fixed wording; the description and classification
// prompts are our own phrasing.

#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gorag {

inline constexpr std::string_view kPromptVersion = "1";

enum class TemplateId { extract, gen_label_desc, classify };

std::string_view to_string(TemplateId id);
TemplateId template_from_string(std::string_view name);

struct PromptTemplate {
  TemplateId id;
  std::string text;

  static const PromptTemplate& extract();
  static const PromptTemplate& gen_label_desc();
  static const PromptTemplate& classify();
  static const PromptTemplate& builtin(TemplateId id);
};

using Slots = std::vector<std::pair<std::string, std::string>>;

struct FilledPrompt {
  TemplateId id;
  Slots slots;
  std::string text;

  /// Value of a slot, empty when absent.
  std::string_view slot(std::string_view name) const;
};

/// Substitutes every {name}. Throws InvariantError if the template uses a
/// slot that is not supplied or a supplied slot does not appear.
FilledPrompt fill(const PromptTemplate& tmpl, Slots slots);

}  // namespace gorag
