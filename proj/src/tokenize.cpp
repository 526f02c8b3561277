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

#include <memory>

#include <unicode/brkiter.h>
#include <unicode/locid.h>
#include <unicode/unistr.h>

#include "gorag/corpus.hpp"
#include "gorag/error.hpp"

namespace gorag {
namespace {

// Creating a word break iterator loads rule data; clone one per thread.
icu::BreakIterator& word_breaker() {
  thread_local std::unique_ptr<icu::BreakIterator> it = [] {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<icu::BreakIterator> bi(
        icu::BreakIterator::createWordInstance(icu::Locale::getRoot(), status));
    if (U_FAILURE(status) || !bi) {
      throw Error(std::string("ICU word break iterator unavailable: ") + u_errorName(status));
    }
    return bi;
  }();
  return *it;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view body) {
  std::vector<std::string> tokens;
  if (body.empty()) return tokens;

  icu::UnicodeString text =
      icu::UnicodeString::fromUTF8(icu::StringPiece(body.data(), static_cast<int32_t>(body.size())));
  text.toLower(icu::Locale::getRoot());

  icu::BreakIterator& it = word_breaker();
  it.setText(text);
  int32_t start = it.first();
  for (int32_t end = it.next(); end != icu::BreakIterator::DONE; start = end, end = it.next()) {
    if (it.getRuleStatus() == UBRK_WORD_NONE) continue;
    std::string token;
    text.tempSubStringBetween(start, end).toUTF8String(token);
    tokens.push_back(std::move(token));
  }
  return tokens;
}

std::string normalize_phrase(std::string_view phrase) {
  std::string out;
  for (const auto& tok : tokenize(phrase)) {
    if (!out.empty()) out.push_back(' ');
    out += tok;
  }
  return out;
}

std::vector<std::string> phrase_tokens(std::string_view keyword) {
  std::vector<std::string> parts;
  std::size_t pos = 0;
  while (pos <= keyword.size()) {
    std::size_t next = keyword.find(' ', pos);
    if (next == std::string_view::npos) next = keyword.size();
    if (next > pos) parts.emplace_back(keyword.substr(pos, next - pos));
    pos = next + 1;
  }
  return parts;
}

std::size_t count_phrase(std::span<const std::string> tokens, std::span<const std::string> phrase) {
  if (phrase.empty() || phrase.size() > tokens.size()) return 0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i + phrase.size() <= tokens.size(); ++i) {
    bool match = true;
    for (std::size_t j = 0; j < phrase.size(); ++j) {
      if (tokens[i + j] != phrase[j]) {
        match = false;
        break;
      }
    }
    if (match) ++hits;
  }
  return hits;
}

}  // namespace gorag
