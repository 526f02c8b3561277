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

#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

#include "gorag/error.hpp"
#include "gorag/llm_gateway.hpp"
#include "gorag/prompts.hpp"

using namespace gorag;
using Strings = std::vector<std::string>;

TEST_CASE("fill is strict about slots") {
  const auto p = fill(PromptTemplate::extract(), {{"text", "Some passage."}});
  CHECK(p.text ==
        "Please extract some keywords from the following passage. Reply with the keywords only, separated by "
        "commas.\n\nSome passage.");
  CHECK(p.slot("text") == "Some passage.");
  CHECK(p.slot("nope").empty());
  CHECK_THROWS_AS(fill(PromptTemplate::extract(), {}), InvariantError);
  CHECK_THROWS_AS(fill(PromptTemplate::extract(), {{"text", "a"}, {"extra", "b"}}), InvariantError);
  CHECK(fill(PromptTemplate::gen_label_desc(), {{"label", "Sports"}}).text.find("\"Sports\"") != std::string::npos);
  for (auto id : {TemplateId::extract, TemplateId::gen_label_desc, TemplateId::classify}) {
    CHECK(template_from_string(to_string(id)) == id);
    CHECK(PromptTemplate::builtin(id).id == id);
  }
  CHECK_THROWS_AS(template_from_string("other"), InvariantError);
}

TEST_CASE("parse_keyword_reply handles common reply shapes") {
  CHECK(parse_keyword_reply("Graph, Neural Network ; graph\nRoads") == Strings{"graph", "neural network", "roads"});
  CHECK(parse_keyword_reply("Keywords: alpha, beta") == Strings{"alpha", "beta"});
  CHECK(parse_keyword_reply("1. alpha\n2) beta\n3.gamma") == Strings{"alpha", "beta", "gamma"});
  CHECK(parse_keyword_reply("").empty());
  CHECK(parse_keyword_reply(" , ;\n").empty());
}

namespace {

std::shared_ptr<CorpusStats> background(const Strings& bodies) {
  auto s = std::make_shared<CorpusStats>();
  for (std::size_t i = 0; i < bodies.size(); ++i) s->ingest(TextDoc::make("b" + std::to_string(i), bodies[i]), {});
  return s;
}

}  // namespace

TEST_CASE("mock extraction: markers first, then rare tokens") {
  // "the" is in every background text; "rare" in one of ten.
  Strings bodies(10, "the common");
  bodies[0] = "the rare";
  MockConfig cfg;
  cfg.markers = {"deep learning", "deep learning model"};
  MockGateway mock(cfg, background(bodies));
  CHECK(mock.mock_keywords("The deep learning model is rare") == Strings{"deep learning model", "is"});
  CHECK(mock.mock_keywords("deep learning, the deep learning") == Strings{"deep learning"});
  // df/N = 0.1 is not below the 0.1 cut-off.
  CHECK(mock.mock_keywords("rare common") == Strings{});
  MockGateway loose(MockConfig{0.2, {}, 0.0, "x"}, background(bodies));
  CHECK(loose.mock_keywords("rare common") == Strings{"rare"});
  MockGateway empty(MockConfig{}, nullptr);
  CHECK(empty.mock_keywords("a b a") == Strings{"a", "b"});
  // Through the prompt round trip.
  CHECK(mock.extract_keywords("The deep learning model is rare") == Strings{"deep learning model", "is"});
  CHECK(mock.extract_keywords("   ").empty());
}

TEST_CASE("mock description is the label name") {
  MockGateway mock(MockConfig{}, nullptr);
  const auto d = mock.describe_label(LabelDef{"c1", "Algorithm Design", 1});
  CHECK(d.text == "Algorithm Design");
  CHECK(d.keywords == Strings{"algorithm", "design"});
  CHECK(mock.describe_label(LabelDef{"c2", std::nullopt, 1}).keywords.empty());
}

namespace {

FilledPrompt classify_prompt(const std::string& keywords, const std::string& candidates, const std::string& glosses) {
  return fill(PromptTemplate::classify(),
              {{"passage", ""}, {"keywords", keywords}, {"candidates", candidates}, {"label_keywords", glosses}});
}

}  // namespace

TEST_CASE("mock classification scores token overlap") {
  MockGateway mock(MockConfig{}, nullptr);
  CHECK(mock.classify(classify_prompt("algorithm, sorting", "1. computer programming\n2. algorithm design\n", "")) ==
        "algorithm design");
  // Glosses count too.
  CHECK(mock.classify(classify_prompt("sorting", "1. computer programming\n2. algorithm design\n",
                                      "Label keywords:\nalgorithm design: sorting, graphs\n\n")) ==
        "algorithm design");
  // Ties go to the smallest candidate.
  CHECK(mock.classify(classify_prompt("nothing", "1. zeta\n2. alpha\n3. mid\n", "")) == "alpha");
}

TEST_CASE("mock hallucination injection is exact by count") {
  for (double p : {0.1, 0.25, 0.5, 1.0}) {
    MockConfig cfg;
    cfg.hallucination_rate = p;
    MockGateway mock(cfg, nullptr);
    const auto prompt = classify_prompt("a", "1. a\n", "");
    int hallucinated = 0;
    const int n = 200;
    for (int i = 0; i < n; ++i) hallucinated += mock.classify(prompt) == cfg.hallucination_reply;
    CHECK(hallucinated == static_cast<int>(n * p));
  }
}

TEST_CASE("classify requires a classify prompt") {
  MockGateway mock(MockConfig{}, nullptr);
  CHECK_THROWS_AS(mock.classify(fill(PromptTemplate::extract(), {{"text", "x"}})), InvariantError);
}

TEST_CASE("audit log records each exchange") {
  const auto path = std::filesystem::temp_directory_path() / "gorag_test_audit.jsonl";
  std::filesystem::remove(path);
  MockGateway mock(MockConfig{}, nullptr);
  mock.set_audit_log(std::make_shared<AuditLog>(path.string()));
  mock.extract_keywords("alpha beta");
  mock.classify(classify_prompt("alpha", "1. alpha\n", ""));
  std::ifstream in(path);
  std::string line;
  std::vector<nlohmann::json> recs;
  while (std::getline(in, line)) recs.push_back(nlohmann::json::parse(line));
  REQUIRE(recs.size() == 2);
  CHECK(recs[0]["template_id"] == "extract");
  CHECK(recs[0]["raw_reply"] == "alpha, beta");
  CHECK(recs[1]["template_id"] == "classify");
  CHECK(recs[1]["backend"] == "mock");
  std::filesystem::remove(path);
}

TEST_CASE("backend names") {
  CHECK(backend_from_string("http") == BackendKind::http);
  CHECK(backend_from_string(to_string(BackendKind::mock)) == BackendKind::mock);
  CHECK_THROWS_AS(backend_from_string("grpc"), InvariantError);
}

TEST_CASE("chat-completion request body is byte-stable") {
  BackendConfig cfg;
  cfg.system_preamble = "Be brief.";
  const auto prompt = fill(PromptTemplate::extract(), {{"text", "x"}});
  const std::string golden =
      R"({"max_tokens":256,"messages":[{"content":"Be brief.","role":"system"},{"content":"Please extract some )"
      R"(keywords from the following passage. Reply with the keywords only, separated by commas.\n\nx","role":"user"}],)"
      R"("model":"llama3","stream":false,"temperature":0.0})";
  CHECK(HttpGateway::request_body(cfg, prompt) == golden);
  cfg.system_preamble.clear();
  const auto body = nlohmann::json::parse(HttpGateway::request_body(cfg, prompt));
  CHECK(body["messages"].size() == 1);
}

TEST_CASE("chat-completion reply parsing") {
  CHECK(HttpGateway::reply_content(R"({"choices":[{"message":{"role":"assistant","content":"sports"}}]})") ==
        "sports");
  CHECK_THROWS_AS(HttpGateway::reply_content("not json"), TransportError);
  CHECK_THROWS_AS(HttpGateway::reply_content(R"({"choices":[]})"), TransportError);
  CHECK_THROWS_AS(HttpGateway::reply_content(R"({"error":"x"})"), TransportError);
}

namespace {

// Local chat-completion server. `script` lists the status codes to return
// in order; after it runs out every call succeeds.
struct FakeServer {
  httplib::Server server;
  std::thread thread;
  int port = 0;
  std::atomic<int> calls{0};
  std::vector<int> script;
  std::string last_body;
  std::string last_auth;
  std::mutex mu;

  explicit FakeServer(std::vector<int> statuses) : script(std::move(statuses)) {
    server.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      const int n = calls++;
      {
        std::lock_guard lock(mu);
        last_body = req.body;
        last_auth = req.get_header_value("Authorization");
      }
      const int status = n < static_cast<int>(script.size()) ? script[n] : 200;
      res.status = status;
      if (status == 200) {
        res.set_content(R"({"choices":[{"message":{"role":"assistant","content":"alpha, beta"}}]})",
                        "application/json");
      } else {
        res.set_content("{}", "application/json");
      }
    });
    port = server.bind_to_any_port("127.0.0.1");
    thread = std::thread([this] { server.listen_after_bind(); });
    server.wait_until_ready();
  }
  ~FakeServer() {
    server.stop();
    thread.join();
  }

  BackendConfig config() const {
    BackendConfig cfg;
    cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
    cfg.retries = 2;
    cfg.retry_backoff_ms = 1;
    cfg.timeout_ms = 5000;
    cfg.api_key_env = "GORAG_TEST_KEY";
    return cfg;
  }
};

}  // namespace

TEST_CASE("http backend round trip with bearer key") {
  FakeServer fake({});
  ::setenv("GORAG_TEST_KEY", "sekret", 1);
  HttpGateway gw(fake.config());
  CHECK(gw.extract_keywords("some passage") == Strings{"alpha", "beta"});
  CHECK(fake.calls == 1);
  CHECK(fake.last_auth == "Bearer sekret");
  const auto body = nlohmann::json::parse(fake.last_body);
  CHECK(body["model"] == "llama3");
  CHECK(body["stream"] == false);
  ::unsetenv("GORAG_TEST_KEY");
  gw.extract_keywords("again");
  CHECK(fake.last_auth.empty());
}

TEST_CASE("http backend retries 5xx and 429 but not 4xx") {
  {
    FakeServer fake({500, 429});
    HttpGateway gw(fake.config());
    CHECK(gw.extract_keywords("x") == Strings{"alpha", "beta"});
    CHECK(fake.calls == 3);
  }
  {
    FakeServer fake({503, 503, 503});
    HttpGateway gw(fake.config());
    CHECK_THROWS_WITH_AS(gw.extract_keywords("x"), doctest::Contains("503"), TransportError);
    CHECK(fake.calls == 3);
  }
  {
    FakeServer fake({400});
    HttpGateway gw(fake.config());
    CHECK_THROWS_AS(gw.extract_keywords("x"), TransportError);
    CHECK(fake.calls == 1);
  }
}

TEST_CASE("http backend reports unreachable endpoints and oversize prompts") {
  BackendConfig cfg;
  cfg.endpoint = "http://127.0.0.1:1/v1/chat/completions";
  cfg.retries = 1;
  cfg.retry_backoff_ms = 1;
  cfg.timeout_ms = 500;
  HttpGateway gw(cfg);
  CHECK_THROWS_AS(gw.extract_keywords("x"), TransportError);

  FakeServer fake({});
  auto small = fake.config();
  small.max_prompt_chars = 50;
  HttpGateway tight(small);
  CHECK_THROWS_WITH_AS(tight.extract_keywords(std::string(100, 'a')), doctest::Contains("budget"), TransportError);
  CHECK(fake.calls == 0);

  BackendConfig bad;
  bad.endpoint = "no-scheme";
  CHECK_THROWS_AS(HttpGateway{bad}, InvariantError);
}

TEST_CASE("load_markers skips blank lines") {
  const auto path = std::filesystem::temp_directory_path() / "gorag_test_markers.txt";
  {
    std::ofstream out(path);
    out << "alpha beta\n\n  \ngamma\n";
  }
  CHECK(load_markers(path.string()) == Strings{"alpha beta", "gamma"});
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_markers("/nonexistent/markers.txt"), Error);
}
