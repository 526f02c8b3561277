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
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "gorag/corpus.hpp"
#include "gorag/error.hpp"
#include "gorag/rng.hpp"

namespace gorag {
namespace {

using json = nlohmann::json;

std::string scalar_string(const json& v, const char* field, std::size_t line) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError(std::string("field '") + field + "' must be a string or integer", line);
}

template <typename Fn>
void for_each_record(std::string_view jsonl, Fn&& fn) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t end = jsonl.find('\n', pos);
    if (end == std::string_view::npos) end = jsonl.size();
    std::string_view line = jsonl.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed JSON: ") + e.what(), line_no);
    }
    if (!rec.is_object()) throw ParseError("record is not a JSON object", line_no);
    fn(rec, line_no);
  }
}

}  // namespace

RoundPlan parse_dataset(std::string_view jsonl) {
  struct LabelInfo {
    int round;
    std::optional<std::string> name;
  };
  std::vector<std::vector<LabelId>> labels_by_round;
  std::unordered_map<LabelId, LabelInfo> label_info;
  std::unordered_set<TextId> ids;
  std::vector<std::pair<int, std::pair<bool, TextDoc>>> texts;  // round, (is_test, doc)

  for_each_record(jsonl, [&](const json& rec, std::size_t line) {
    for (const char* f : {"id", "text", "round"}) {
      if (!rec.contains(f)) throw ParseError(std::string("missing field '") + f + "'", line);
    }
    TextId id = scalar_string(rec["id"], "id", line);
    if (!rec["text"].is_string()) throw ParseError("field 'text' must be a string", line);
    if (!rec["round"].is_number_integer() || rec["round"].get<long long>() < 1) {
      throw ParseError("field 'round' must be a positive integer", line);
    }
    const int round = static_cast<int>(rec["round"].get<long long>());
    bool is_test = false;
    if (rec.contains("split")) {
      const auto split = rec["split"].is_string() ? rec["split"].get<std::string>() : "";
      if (split == "test") {
        is_test = true;
      } else if (split != "train") {
        throw ParseError("field 'split' must be \"train\" or \"test\"", line);
      }
    }
    std::optional<LabelId> label;
    if (rec.contains("label") && !rec["label"].is_null()) label = scalar_string(rec["label"], "label", line);
    if (!label && !is_test) throw ParseError("training record without 'label'", line);

    if (!ids.insert(id).second) throw InvariantError("line " + std::to_string(line) + ": duplicate text id '" + id + "'");

    if (label) {
      std::optional<std::string> name;
      if (rec.contains("label_name") && !rec["label_name"].is_null()) {
        if (!rec["label_name"].is_string()) throw ParseError("field 'label_name' must be a string", line);
        name = rec["label_name"].get<std::string>();
      }
      auto [it, fresh] = label_info.try_emplace(*label, LabelInfo{round, name});
      if (fresh) {
        if (labels_by_round.size() < static_cast<std::size_t>(round)) labels_by_round.resize(round);
        labels_by_round[round - 1].push_back(*label);
      } else {
        if (it->second.round != round) {
          throw InvariantError("line " + std::to_string(line) + ": label '" + *label + "' appears in rounds " +
                               std::to_string(it->second.round) + " and " + std::to_string(round));
        }
        if (name && !it->second.name) it->second.name = name;
        if (name && it->second.name != name) {
          throw InvariantError("line " + std::to_string(line) + ": label '" + *label + "' has conflicting names");
        }
      }
    }
    texts.push_back({round, {is_test, TextDoc::make(std::move(id), rec["text"].get<std::string>(), label)}});
  });

  if (labels_by_round.empty()) throw ParseError("no rounds");
  for (auto& [round, entry] : texts) {
    if (static_cast<std::size_t>(round) > labels_by_round.size()) labels_by_round.resize(round);
  }

  RoundPlan plan;
  plan.rounds.resize(labels_by_round.size());
  for (std::size_t r = 0; r < labels_by_round.size(); ++r) {
    if (labels_by_round[r].empty()) throw InvariantError("round " + std::to_string(r + 1) + " introduces no labels");
    for (const auto& id : labels_by_round[r]) {
      plan.rounds[r].new_labels.push_back(LabelDef{id, label_info[id].name, static_cast<int>(r + 1)});
    }
  }
  for (auto& [round, entry] : texts) {
    auto& dest = entry.first ? plan.rounds[round - 1].test : plan.rounds[round - 1].train;
    dest.push_back(std::move(entry.second));
  }
  return plan;
}

RoundPlan load_dataset(const std::string& path, DatasetFormat /*format*/) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open dataset '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_dataset(buf.str());
}

std::string dump_dataset(const RoundPlan& plan) {
  std::unordered_map<LabelId, const LabelDef*> defs;
  for (const auto& r : plan.rounds)
    for (const auto& l : r.new_labels) defs.emplace(l.id, &l);

  std::string out;
  auto emit = [&](const TextDoc& doc, std::size_t round, bool test) {
    json rec;
    rec["id"] = doc.id;
    rec["text"] = doc.body;
    rec["round"] = round;
    rec["split"] = test ? "test" : "train";
    if (doc.gold_label) {
      rec["label"] = *doc.gold_label;
      auto it = defs.find(*doc.gold_label);
      if (it != defs.end() && it->second->name) rec["label_name"] = *it->second->name;
    }
    out += rec.dump();
    out.push_back('\n');
  };
  for (std::size_t r = 0; r < plan.rounds.size(); ++r) {
    for (const auto& d : plan.rounds[r].train) emit(d, r + 1, false);
    for (const auto& d : plan.rounds[r].test) emit(d, r + 1, true);
  }
  return out;
}

RoundPlan sample_k_shot(const RoundPlan& plan, std::size_t k, std::uint64_t seed) {
  if (k == 0) throw InvariantError("k must be positive");
  Rng rng(seed);
  RoundPlan out = plan;
  for (auto& round : out.rounds) {
    std::unordered_set<const TextDoc*> keep;
    for (const auto& label : round.new_labels) {
      std::vector<const TextDoc*> pool;
      for (const auto& doc : round.train) {
        if (doc.gold_label == label.id) pool.push_back(&doc);
      }
      if (pool.size() < k) {
        throw InvariantError("label '" + label.id + "' has " + std::to_string(pool.size()) +
                             " training texts, fewer than k=" + std::to_string(k));
      }
      // Partial Fisher-Yates: the first k slots end up a uniform sample.
      for (std::size_t i = 0; i < k; ++i) {
        std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
      }
      keep.insert(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k));
    }
    std::vector<TextDoc> train;
    for (const auto& doc : round.train) {
      if (keep.contains(&doc)) train.push_back(doc);
    }
    round.train = std::move(train);
  }
  return out;
}

std::string split_rounds(std::string_view flat_jsonl, std::size_t num_rounds, std::uint64_t seed,
                         std::span<const std::size_t> labels_per_round) {
  if (num_rounds == 0) throw InvariantError("num_rounds must be positive");
  std::vector<json> records;
  std::vector<LabelId> labels;
  std::unordered_set<LabelId> seen;
  for_each_record(flat_jsonl, [&](const json& rec, std::size_t line) {
    if (!rec.contains("label") || rec["label"].is_null()) throw ParseError("record without 'label'", line);
    auto label = scalar_string(rec["label"], "label", line);
    if (seen.insert(label).second) labels.push_back(label);
    records.push_back(rec);
  });
  if (labels.empty()) throw ParseError("no rounds");

  std::vector<std::size_t> counts(labels_per_round.begin(), labels_per_round.end());
  if (counts.empty()) {
    counts.assign(num_rounds, labels.size() / num_rounds);
    for (std::size_t i = 0; i < labels.size() % num_rounds; ++i) ++counts[i];
  }
  if (counts.size() != num_rounds) throw InvariantError("labels_per_round must list one count per round");
  std::size_t total = 0;
  for (auto c : counts) {
    if (c == 0) throw InvariantError("every round needs at least one label");
    total += c;
  }
  if (total != labels.size()) {
    throw InvariantError("labels_per_round sums to " + std::to_string(total) + " but the file has " +
                         std::to_string(labels.size()) + " labels");
  }

  Rng rng(seed);
  rng.shuffle(labels);
  std::unordered_map<LabelId, std::size_t> round_of;
  std::size_t next = 0;
  for (std::size_t r = 0; r < counts.size(); ++r) {
    for (std::size_t i = 0; i < counts[r]; ++i) round_of[labels[next++]] = r + 1;
  }

  std::string out;
  for (auto& rec : records) {
    rec["round"] = round_of.at(scalar_string(rec["label"], "label", 0));
    out += rec.dump();
    out.push_back('\n');
  }
  return out;
}

}  // namespace gorag
