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

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "gorag/error.hpp"
#include "gorag/graph_index.hpp"

namespace gorag {

using json = nlohmann::json;

std::string graph_to_json(const WeightedGraph& graph) {
  json nodes = json::array();
  for (const auto& n : graph.nodes()) {
    json rec{{"kind", to_string(n.ref.kind)}, {"key", n.ref.key}};
    if (n.ref.kind == NodeKind::label) {
      rec["round"] = n.round_introduced;
      if (n.label_name) rec["name"] = *n.label_name;
    }
    nodes.push_back(std::move(rec));
  }
  json edges = json::array();
  for (const auto& e : graph.edges()) {
    json rec{{"a", index(e.a)}, {"b", index(e.b)}, {"kind", to_string(e.kind)}, {"weight", e.weight}};
    if (e.kind == EdgeKind::keyword_label) {
      json occ = json::array();
      for (const auto& o : e.occurrences) occ.push_back(json::array({o.text, o.cs}));
      rec["occurrences"] = std::move(occ);
    }
    edges.push_back(std::move(rec));
  }
  json doc{{"schema_version", kGraphSchemaVersion},
           {"round", graph.round()},
           {"nodes", std::move(nodes)},
           {"edges", std::move(edges)}};
  return doc.dump();
}

WeightedGraph graph_from_json(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("corrupt graph file: ") + e.what());
  }
  try {
    const int version = doc.at("schema_version").get<int>();
    if (version != kGraphSchemaVersion) {
      throw ParseError("graph schema version " + std::to_string(version) + " is not supported (expected " +
                       std::to_string(kGraphSchemaVersion) + ")");
    }
    std::vector<NodeRecord> nodes;
    for (const auto& n : doc.at("nodes")) {
      const auto kind = n.at("kind").get<std::string>();
      NodeRecord rec;
      rec.ref.key = n.at("key").get<std::string>();
      if (kind == "label") {
        rec.ref.kind = NodeKind::label;
        rec.round_introduced = n.at("round").get<int>();
        if (n.contains("name")) rec.label_name = n["name"].get<std::string>();
      } else if (kind == "keyword") {
        rec.ref.kind = NodeKind::keyword;
      } else {
        throw ParseError("unknown node kind '" + kind + "'");
      }
      nodes.push_back(std::move(rec));
    }
    std::vector<EdgeRecord> edges;
    for (const auto& e : doc.at("edges")) {
      EdgeRecord rec;
      rec.a = NodeId{e.at("a").get<std::uint32_t>()};
      rec.b = NodeId{e.at("b").get<std::uint32_t>()};
      rec.weight = e.at("weight").get<double>();
      const auto kind = e.at("kind").get<std::string>();
      if (kind == "keyword_label") {
        rec.kind = EdgeKind::keyword_label;
        for (const auto& o : e.at("occurrences")) {
          rec.occurrences.push_back(Occurrence{o.at(0).get<std::string>(), o.at(1).get<double>()});
        }
      } else if (kind == "label_label") {
        rec.kind = EdgeKind::label_label;
      } else {
        throw ParseError("unknown edge kind '" + kind + "'");
      }
      edges.push_back(std::move(rec));
    }
    return WeightedGraph::from_parts(doc.at("round").get<int>(), std::move(nodes), std::move(edges));
  } catch (const json::exception& e) {
    throw ParseError(std::string("corrupt graph file: ") + e.what());
  }
}

void save_graph(const WeightedGraph& graph, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write graph file '" + path + "'");
  out << graph_to_json(graph) << '\n';
  if (!out) throw Error("failed writing graph file '" + path + "'");
}

WeightedGraph load_graph(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read graph file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return graph_from_json(buf.str());
}

}  // namespace gorag
