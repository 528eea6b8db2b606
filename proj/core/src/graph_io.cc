// Copyright 2026 The DevPlace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "devplace/graph.h"
#include "devplace/status_macros.h"
#include "json_util.h"
#include "nlohmann/json.hpp"

namespace devplace {

using nlohmann::json;

absl::StatusOr<ComputationGraph> ParseGraph(std::string_view json_text) {
  ASSIGN_OR_RETURN(json doc, internal::ParseJson(json_text));
  if (!doc.is_object()) {
    return absl::InvalidArgumentError("graph document must be an object");
  }
  ASSIGN_OR_RETURN(const json* ops_json, internal::Field(doc, "ops"));
  ASSIGN_OR_RETURN(const json* edges_json, internal::Field(doc, "edges"));
  if (!ops_json->is_array() || !edges_json->is_array()) {
    return absl::InvalidArgumentError("'ops' and 'edges' must be arrays");
  }

  std::vector<Operation> ops;
  ops.reserve(ops_json->size());
  for (const json& o : *ops_json) {
    if (!o.is_object()) {
      return absl::InvalidArgumentError("each op must be an object");
    }
    Operation op;
    ASSIGN_OR_RETURN(op.id, internal::IntField(o, "id"));
    ASSIGN_OR_RETURN(op.name, internal::StringField(o, "name"));
    ASSIGN_OR_RETURN(op.type, internal::StringField(o, "type"));
    ASSIGN_OR_RETURN(op.compute_cost, internal::NumberField(o, "cost"));
    ASSIGN_OR_RETURN(op.param_bytes, internal::Int64Field(o, "param_bytes"));
    ASSIGN_OR_RETURN(const json* shape, internal::Field(o, "output_shape"));
    if (!shape->is_array()) {
      return absl::InvalidArgumentError(
          absl::StrCat("op ", op.id, ": output_shape must be an array"));
    }
    for (const json& d : *shape) {
      if (!d.is_number_integer()) {
        return absl::InvalidArgumentError(
            absl::StrCat("op ", op.id, ": output_shape entries must be integers"));
      }
      op.output_shape.push_back(d.get<int64_t>());
    }
    ops.push_back(std::move(op));
  }

  std::vector<Edge> edges;
  edges.reserve(edges_json->size());
  for (const json& e : *edges_json) {
    if (!e.is_object()) {
      return absl::InvalidArgumentError("each edge must be an object");
    }
    Edge edge;
    ASSIGN_OR_RETURN(edge.src, internal::IntField(e, "src"));
    ASSIGN_OR_RETURN(edge.dst, internal::IntField(e, "dst"));
    ASSIGN_OR_RETURN(edge.tensor_bytes, internal::Int64Field(e, "bytes"));
    edges.push_back(edge);
  }

  std::vector<std::vector<int>> manual_groups;
  if (auto it = doc.find("manual_groups"); it != doc.end()) {
    if (!it->is_array()) {
      return absl::InvalidArgumentError("'manual_groups' must be an array");
    }
    for (const json& g : *it) {
      if (!g.is_array()) {
        return absl::InvalidArgumentError("each manual group must be an array");
      }
      std::vector<int> ids;
      for (const json& id : g) {
        if (!id.is_number_integer()) {
          return absl::InvalidArgumentError(
              "manual group entries must be integer op ids");
        }
        ids.push_back(id.get<int>());
      }
      manual_groups.push_back(std::move(ids));
    }
  }
  return ComputationGraph::Create(std::move(ops), std::move(edges),
                                  std::move(manual_groups));
}

absl::StatusOr<ComputationGraph> LoadGraph(const std::string& path) {
  ASSIGN_OR_RETURN(std::string text, internal::ReadFile(path));
  return ParseGraph(text);
}

std::string SerializeGraph(const ComputationGraph& graph) {
  json ops = json::array();
  for (const Operation& op : graph.ops()) {
    ops.push_back({{"id", op.id},
                   {"name", op.name},
                   {"type", op.type},
                   {"cost", op.compute_cost},
                   {"output_shape", op.output_shape},
                   {"param_bytes", op.param_bytes}});
  }
  json edges = json::array();
  for (const Edge& e : graph.edges()) {
    edges.push_back({{"src", e.src}, {"dst", e.dst}, {"bytes", e.tensor_bytes}});
  }
  json doc = {{"ops", std::move(ops)}, {"edges", std::move(edges)}};
  if (!graph.manual_groups().empty()) doc["manual_groups"] = graph.manual_groups();
  return doc.dump(1) + "\n";
}

}  // namespace devplace
