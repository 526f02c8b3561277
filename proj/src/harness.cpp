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

#include "gorag/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "gorag/error.hpp"
#include "gorag/log.hpp"

namespace gorag {
namespace {

using json = nlohmann::json;

template <typename T>
T field(const json& obj, const char* key, const char* what) {
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("config field '") + key + "' must be " + what);
  }
}

void check_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!obj.is_object()) throw ParseError("config " + where + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      throw ParseError("unknown config field '" + key + "'" + (where.empty() ? "" : " in " + where));
    }
  }
}

std::string resolve(const std::string& path, const std::string& base) {
  if (path.empty() || base.empty() || std::filesystem::path(path).is_absolute()) return path;
  return (std::filesystem::path(base) / path).string();
}

json metrics_json(const Metrics& m) {
  return {{"count", m.count},
          {"accuracy", m.accuracy},
          {"macro_recall", m.macro_recall},
          {"hallucination_rate", m.hallucination_rate},
          {"error_rate", m.error_rate},
          {"failure_rate", m.failure_rate}};
}

json counts_json(const GraphCounts& c) {
  return {{"nodes", c.nodes},
          {"edges", c.edges},
          {"keyword_nodes", c.keyword_nodes},
          {"label_nodes", c.label_nodes},
          {"keyword_label_edges", c.keyword_label_edges},
          {"label_label_edges", c.label_label_edges}};
}

Prediction to_prediction(const ClassifyRecord& r) {
  return Prediction{r.outcome.predicted, r.gold, r.outcome.hallucination, r.outcome.failed()};
}

double seconds_since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

}  // namespace

std::string_view to_string(EvalGraph e) { return e == EvalGraph::current ? "current" : "round-end"; }

EvalGraph eval_graph_from_string(std::string_view name) {
  if (name == "round-end") return EvalGraph::round_end;
  if (name == "current") return EvalGraph::current;
  throw InvariantError("unknown eval graph '" + std::string(name) + "' (expected round-end or current)");
}

RunConfig RunConfig::from_json(std::string_view text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("config is not valid JSON: ") + e.what());
  }
  check_keys(j, {"dataset", "k_shot", "rounds", "seed", "backend", "http", "mock", "ablation", "paths", "eval_graph",
                 "workers", "output_dir", "audit_log"},
             "");
  RunConfig c;
  if (!j.contains("dataset")) throw ParseError("config field 'dataset' is required");
  c.dataset = resolve(field<std::string>(j, "dataset", "a string"), base_dir);
  if (j.contains("k_shot")) c.k_shot = field<std::size_t>(j, "k_shot", "a non-negative integer");
  if (j.contains("rounds")) c.rounds = field<std::size_t>(j, "rounds", "a non-negative integer");
  if (j.contains("seed")) c.seed = field<std::uint64_t>(j, "seed", "a non-negative integer");
  try {
    if (j.contains("backend")) c.backend = backend_from_string(field<std::string>(j, "backend", "a string"));
    if (j.contains("ablation")) c.ablation = ablation_from_string(field<std::string>(j, "ablation", "a string"));
    if (j.contains("paths")) c.paths = path_domain_from_string(field<std::string>(j, "paths", "a string"));
    if (j.contains("eval_graph")) {
      c.eval_graph = eval_graph_from_string(field<std::string>(j, "eval_graph", "a string"));
    }
  } catch (const InvariantError& e) {
    throw ParseError(e.what());
  }
  if (j.contains("workers")) c.workers = field<std::size_t>(j, "workers", "a positive integer");
  if (c.workers == 0) throw ParseError("config field 'workers' must be a positive integer");
  if (j.contains("output_dir")) c.output_dir = resolve(field<std::string>(j, "output_dir", "a string"), base_dir);
  if (j.contains("audit_log")) c.audit_log = field<bool>(j, "audit_log", "a boolean");

  if (j.contains("http")) {
    const auto& h = j["http"];
    check_keys(h, {"endpoint", "model", "temperature", "max_tokens", "timeout_ms", "retries", "retry_backoff_ms",
                   "max_in_flight", "max_prompt_chars", "api_key_env"},
               "http");
    auto& b = c.http;
    if (h.contains("endpoint")) b.endpoint = field<std::string>(h, "endpoint", "a string");
    if (h.contains("model")) b.model = field<std::string>(h, "model", "a string");
    if (h.contains("temperature")) b.temperature = field<double>(h, "temperature", "a number");
    if (h.contains("max_tokens")) b.max_tokens = field<int>(h, "max_tokens", "an integer");
    if (h.contains("timeout_ms")) b.timeout_ms = field<int>(h, "timeout_ms", "an integer");
    if (h.contains("retries")) b.retries = field<int>(h, "retries", "an integer");
    if (h.contains("retry_backoff_ms")) b.retry_backoff_ms = field<int>(h, "retry_backoff_ms", "an integer");
    if (h.contains("max_in_flight")) b.max_in_flight = field<std::size_t>(h, "max_in_flight", "an integer");
    if (h.contains("max_prompt_chars")) b.max_prompt_chars = field<std::size_t>(h, "max_prompt_chars", "an integer");
    if (h.contains("api_key_env")) b.api_key_env = field<std::string>(h, "api_key_env", "a string");
  }
  if (j.contains("mock")) {
    const auto& m = j["mock"];
    check_keys(m, {"df_fraction", "markers", "markers_file", "hallucination_rate"}, "mock");
    if (m.contains("df_fraction")) c.mock.df_fraction = field<double>(m, "df_fraction", "a number");
    if (m.contains("markers")) c.mock.markers = field<std::vector<std::string>>(m, "markers", "a list of strings");
    if (m.contains("markers_file")) {
      c.mock.markers_file = resolve(field<std::string>(m, "markers_file", "a string"), base_dir);
    }
    if (m.contains("hallucination_rate")) {
      c.mock.hallucination_rate = field<double>(m, "hallucination_rate", "a number");
    }
    if (c.mock.hallucination_rate < 0.0 || c.mock.hallucination_rate > 1.0) {
      throw ParseError("config field 'hallucination_rate' must lie in [0, 1]");
    }
  }
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string RunConfig::to_json() const {
  json j = {{"dataset", dataset},
            {"k_shot", k_shot},
            {"rounds", rounds},
            {"seed", seed},
            {"backend", to_string(backend)},
            {"ablation", to_string(ablation)},
            {"paths", to_string(paths)},
            {"eval_graph", to_string(eval_graph)},
            {"workers", workers},
            {"output_dir", output_dir},
            {"audit_log", audit_log}};
  if (backend == BackendKind::http) {
    j["http"] = {{"endpoint", http.endpoint},
                 {"model", http.model},
                 {"temperature", http.temperature},
                 {"max_tokens", http.max_tokens},
                 {"timeout_ms", http.timeout_ms},
                 {"retries", http.retries},
                 {"retry_backoff_ms", http.retry_backoff_ms},
                 {"max_in_flight", http.max_in_flight},
                 {"max_prompt_chars", http.max_prompt_chars},
                 {"api_key_env", http.api_key_env}};
  } else {
    j["mock"] = {{"df_fraction", mock.df_fraction},
                 {"markers", mock.markers},
                 {"markers_file", mock.markers_file},
                 {"hallucination_rate", mock.hallucination_rate}};
  }
  return j.dump(2);
}

std::string record_to_json(const RunRecord& r) {
  const auto& c = r.record;
  json j = {{"eval_round", r.eval_round},
            {"text_round", r.text_round},
            {"retest", r.retest},
            {"text_id", c.text_id},
            {"gold", c.gold ? json(*c.gold) : json(nullptr)},
            {"predicted", c.outcome.predicted ? json(*c.outcome.predicted) : json(nullptr)},
            {"raw_reply", c.outcome.raw_reply},
            {"matched", c.outcome.matched == MatchKind::exact ? "exact" : "none"},
            {"hallucination", c.outcome.hallucination},
            {"keywords", c.keywords},
            {"exist", c.terminals.exist},
            {"not_exist", c.terminals.not_exist},
            {"candidates", c.candidates},
            {"tree_cost", c.tree_cost},
            {"fallback", to_string(c.fallback)},
            {"indexed", c.indexed},
            {"prompt_chars", c.prompt_chars}};
  return j.dump();
}

std::vector<GrowthRow> RunReport::growth_rows() const {
  std::vector<GrowthRow> rows;
  for (const auto& r : rounds) rows.push_back({"Round " + std::to_string(r.round), r.offline, r.online});
  if (!rounds.empty()) rows.push_back({"After R" + std::to_string(rounds.back().round), final_offline, final_online});
  return rows;
}

std::string RunReport::to_json() const {
  json j;
  j["version"] = {{"gorag", GORAG_VERSION}, {"prompt", kPromptVersion}, {"graph_schema", kGraphSchemaVersion}};
  j["config"] = json::parse(config.to_json());
  j["complete"] = complete;
  if (!complete) j["error"] = error;
  json rs = json::array();
  for (const auto& r : rounds) {
    rs.push_back({{"round", r.round},
                  {"labels", r.labels},
                  {"new_labels", r.new_labels},
                  {"train_texts", r.train_texts},
                  {"metrics", metrics_json(r.metrics)},
                  {"mean_candidates", r.mean_candidates},
                  {"fallbacks", r.fallbacks},
                  {"offline", counts_json(r.offline)},
                  {"online", counts_json(r.online)}});
  }
  j["rounds"] = std::move(rs);
  j["overall"] = metrics_json(overall);
  json growth = json::array();
  for (const auto& row : growth_rows()) {
    growth.push_back({{"name", row.name}, {"offline", counts_json(row.offline)}, {"online", counts_json(row.online)}});
  }
  j["graph_growth"] = std::move(growth);
  return j.dump(2) + "\n";
}

std::string RunReport::to_text() const {
  std::string out = "gorag " GORAG_VERSION " run report";
  out += complete ? "\n" : " (INCOMPLETE: " + error + ")\n";
  out += "backend " + std::string(to_string(config.backend)) + ", k_shot " + std::to_string(config.k_shot) +
         ", ablation " + std::string(to_string(config.ablation)) + ", paths " + std::string(to_string(config.paths)) +
         ", eval graph " + std::string(to_string(config.eval_graph)) + "\n\n";
  char buf[200];
  std::snprintf(buf, sizeof buf, "%-8s %6s %6s %9s %9s %9s %9s %9s\n", "round", "|Y|", "tests", "accuracy", "macro_rec",
                "halluc", "errors", "mean|C|");
  out += buf;
  for (const auto& r : rounds) {
    std::snprintf(buf, sizeof buf, "%-8d %6zu %6zu %9.4f %9.4f %9.4f %9.4f %9.2f\n", r.round, r.labels,
                  r.metrics.count, r.metrics.accuracy, r.metrics.macro_recall, r.metrics.hallucination_rate,
                  r.metrics.error_rate, r.mean_candidates);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "%-8s %6s %6zu %9.4f %9.4f %9.4f %9.4f\n", "overall", "", overall.count,
                overall.accuracy, overall.macro_recall, overall.hallucination_rate, overall.error_rate);
  out += buf;
  out += "\ngraph size\n";
  const auto rows = growth_rows();
  out += growth_table(rows);
  return out;
}

std::string RunReport::timing_json() const {
  json rs = json::array();
  for (const auto& r : rounds) {
    rs.push_back({{"round", r.round},
                  {"index_seconds", r.index_seconds},
                  {"mean_retrieval_ms", r.mean_retrieval_ms},
                  {"mean_llm_ms", r.mean_llm_ms}});
  }
  return json{{"rounds", rs}}.dump(2) + "\n";
}

std::unique_ptr<LlmGateway> make_gateway(const RunConfig& config, const RoundPlan& plan) {
  if (config.backend == BackendKind::http) return std::make_unique<HttpGateway>(config.http);
  MockConfig mc;
  mc.df_fraction = config.mock.df_fraction;
  mc.markers = config.mock.markers;
  if (!config.mock.markers_file.empty()) {
    for (auto& m : load_markers(config.mock.markers_file)) mc.markers.push_back(std::move(m));
  }
  mc.hallucination_rate = config.mock.hallucination_rate;
  return make_mock_gateway(plan, std::move(mc));
}

namespace {

struct RoundLoop {
  const RunConfig& config;
  LlmGateway& gateway;
  std::ofstream* results;
  RunReport& report;
  ClassifyOptions options;
  WeightedGraph online{};
  WeightedGraph offline{};
  CorpusStats stats{};
  LabelKeywords glosses{};
  std::unordered_map<TextId, std::vector<std::string>> keyword_cache{};

  // Classifies `texts` in batches of `workers`; each batch reads the same
  // graph state and commits in submission order.
  void evaluate(const std::vector<TextDoc>& texts, int eval_round, int text_round, bool retest, bool commit,
                std::vector<std::size_t>& evaluated) {
    ClassifyOptions opts = options;
    opts.commit = commit;
    const std::size_t workers = std::max<std::size_t>(1, config.workers);
    for (std::size_t start = 0; start < texts.size(); start += workers) {
      const std::size_t n = std::min(workers, texts.size() - start);
      std::vector<ClassifyRecord> out(n);
      auto one = [&](std::size_t j) {
        const auto& doc = texts[start + j];
        auto it = keyword_cache.find(doc.id);
        out[j] = classify_query(online, gateway, doc, glosses, opts, it == keyword_cache.end() ? nullptr : &it->second);
      };
      if (n == 1) {
        one(0);
      } else {
        std::vector<std::exception_ptr> errors(n);
        std::vector<std::thread> threads;
        for (std::size_t j = 0; j < n; ++j) {
          threads.emplace_back([&, j] {
            try {
              one(j);
            } catch (...) {
              errors[j] = std::current_exception();
            }
          });
        }
        for (auto& t : threads) t.join();
        for (auto& e : errors) {
          if (e) std::rethrow_exception(e);
        }
      }
      for (std::size_t j = 0; j < n; ++j) {
        const auto& doc = texts[start + j];
        commit_query(online, stats, doc, out[j], opts);
        keyword_cache.try_emplace(doc.id, out[j].keywords);
        report.records.push_back(RunRecord{eval_round, text_round, retest, std::move(out[j])});
        if (results) *results << record_to_json(report.records.back()) << '\n' << std::flush;
      }
    }
    for (std::size_t i = report.records.size() - texts.size(); i < report.records.size(); ++i) {
      evaluated.push_back(i);
    }
  }
};

}  // namespace

RunReport run(const RunConfig& config, const RoundPlan& plan, LlmGateway& gateway, const std::string& results_path) {
  RunReport report;
  report.config = config;
  std::ofstream results;
  if (!results_path.empty()) {
    results.open(results_path, std::ios::binary | std::ios::trunc);
    if (!results) {
      report.error = "cannot write results to '" + results_path + "'";
      return report;
    }
  }
  RoundLoop loop{config, gateway, results_path.empty() ? nullptr : &results, report,
                 ClassifyOptions::for_ablation(config.ablation, config.paths)};

  try {
    RoundPlan sampled = plan;
    if (config.rounds > 0) {
      if (config.rounds > sampled.rounds.size()) {
        throw InvariantError("config asks for " + std::to_string(config.rounds) + " rounds but the dataset has " +
                             std::to_string(sampled.rounds.size()));
      }
      sampled.rounds.resize(config.rounds);
    }
    if (config.k_shot == 0) {
      for (auto& round : sampled.rounds) {
        for (const auto& label : round.new_labels) {
          if (!label.name) throw InvariantError("zero-shot runs need label names; '" + label.id + "' has none");
        }
        round.train.clear();
      }
    } else {
      sampled = sample_k_shot(sampled, config.k_shot, config.seed);
    }

    std::size_t label_total = 0;
    for (std::size_t ri = 0; ri < sampled.rounds.size(); ++ri) {
      const int r = static_cast<int>(ri + 1);
      const auto& round = sampled.rounds[ri];
      RoundReport rr;
      rr.round = r;
      rr.new_labels = round.new_labels.size();
      label_total += rr.new_labels;
      rr.labels = label_total;
      rr.train_texts = round.train.size();

      const auto t0 = std::chrono::steady_clock::now();
      auto indexed = index_training_round(r, round.new_labels, round.train, loop.stats, gateway, loop.online);
      merge_round(loop.online, indexed.subgraph);
      merge_round(loop.offline, indexed.subgraph);
      for (auto& [label, kws] : indexed.label_keywords) loop.glosses[label] = std::move(kws);
      rr.index_seconds = seconds_since(t0);
      rr.offline = graph_counts(loop.offline);
      rr.online = graph_counts(loop.online);
      info("round " + std::to_string(r) + ": indexed " + std::to_string(rr.train_texts) + " texts, graph has " +
           std::to_string(rr.online.nodes) + " nodes");

      std::vector<std::size_t> evaluated;
      loop.evaluate(round.test, r, r, false, true, evaluated);
      const bool retest_commit = config.eval_graph == EvalGraph::current;
      for (std::size_t q = 0; q < ri; ++q) {
        loop.evaluate(sampled.rounds[q].test, r, static_cast<int>(q + 1), true, retest_commit, evaluated);
      }

      std::vector<Prediction> preds;
      double candidates = 0.0;
      double retrieval_ms = 0.0;
      double llm_ms = 0.0;
      for (const auto i : evaluated) {
        const auto* rec = &report.records[i].record;
        preds.push_back(to_prediction(*rec));
        candidates += static_cast<double>(rec->candidates.size());
        rr.fallbacks += rec->fallback != Fallback::none;
        retrieval_ms += rec->retrieval_ms;
        llm_ms += rec->llm_ms;
      }
      rr.metrics = compute_metrics(preds);
      if (!evaluated.empty()) {
        const auto n = static_cast<double>(evaluated.size());
        rr.mean_candidates = candidates / n;
        rr.mean_retrieval_ms = retrieval_ms / n;
        rr.mean_llm_ms = llm_ms / n;
      }
      report.rounds.push_back(rr);
    }
    report.complete = true;
  } catch (const std::exception& e) {
    report.error = e.what();
    warn("run aborted: " + report.error);
  }

  std::vector<Prediction> all;
  for (const auto& r : report.records) all.push_back(to_prediction(r.record));
  try {
    report.overall = compute_metrics(all);
  } catch (const std::exception& e) {
    report.complete = false;
    report.error = e.what();
  }
  report.final_offline = graph_counts(loop.offline);
  report.final_online = graph_counts(loop.online);
  report.graph = std::move(loop.online);
  return report;
}

RunReport run(const RunConfig& config) {
  RunReport report;
  report.config = config;
  try {
    const RoundPlan plan = load_dataset(config.dataset);
    auto gateway = make_gateway(config, plan);
    std::string results_path;
    if (!config.output_dir.empty()) {
      std::filesystem::create_directories(config.output_dir);
      results_path = (std::filesystem::path(config.output_dir) / "results.jsonl").string();
      if (config.audit_log) {
        const auto audit = (std::filesystem::path(config.output_dir) / "audit.jsonl").string();
        std::filesystem::remove(audit);
        gateway->set_audit_log(std::make_shared<AuditLog>(audit));
      }
    }
    report = run(config, plan, *gateway, results_path);
  } catch (const std::exception& e) {
    report.complete = false;
    report.error = e.what();
  }
  if (!config.output_dir.empty()) write_report(report, config.output_dir);
  return report;
}

void write_report(const RunReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto base = std::filesystem::path(dir);
  auto write = [&](const char* name, const std::string& body) {
    std::ofstream out(base / name, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + (base / name).string() + "'");
    out << body;
  };
  write("report.json", report.to_json());
  write("report.txt", report.to_text());
  write("timing.json", report.timing_json());
  write("graph.json", graph_to_json(report.graph));
}

}  // namespace gorag
