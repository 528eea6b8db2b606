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

#include <string>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "devplace/policy.h"
#include "devplace/status_macros.h"
#include "json_util.h"
#include "nlohmann/json.hpp"

namespace devplace {

using nlohmann::json;

namespace {
constexpr char kFormat[] = "devplace.policy";
}  // namespace

std::string SerializeCheckpoint(const PolicyParams& params,
                                const EmbeddingSpec& spec) {
  const PolicyShape& s = params.shape();
  std::vector<std::string> vocab(spec.vocab_size());
  vocab[0] = "";
  for (const auto& [type, index] : spec.type_vocab) vocab[index] = type;
  json doc = {
      {"format", kFormat},
      {"layout_version", PolicyParams::kLayoutVersion},
      {"shape",
       {{"vocab_size", s.vocab_size},
        {"type_dim", s.type_dim},
        {"shape_slots", s.shape_slots},
        {"adjacency_slots", s.adjacency_slots},
        {"device_dim", s.device_dim},
        {"hidden", s.hidden},
        {"num_devices", s.num_devices}}},
      {"vocab", vocab},
      {"params", std::vector<double>(params.flat().begin(), params.flat().end())},
  };
  return doc.dump() + "\n";
}

absl::StatusOr<Checkpoint> ParseCheckpoint(std::string_view text) {
  ASSIGN_OR_RETURN(json doc, internal::ParseJson(text));
  if (!doc.is_object() || doc.value("format", "") != kFormat) {
    return absl::InvalidArgumentError("not a policy checkpoint");
  }
  ASSIGN_OR_RETURN(int version, internal::IntField(doc, "layout_version"));
  if (version != PolicyParams::kLayoutVersion) {
    return absl::FailedPreconditionError(
        absl::StrCat("unsupported parameter layout version ", version));
  }
  ASSIGN_OR_RETURN(const json* sj, internal::Field(doc, "shape"));
  PolicyShape shape;
  ASSIGN_OR_RETURN(shape.vocab_size, internal::IntField(*sj, "vocab_size"));
  ASSIGN_OR_RETURN(shape.type_dim, internal::IntField(*sj, "type_dim"));
  ASSIGN_OR_RETURN(shape.shape_slots, internal::IntField(*sj, "shape_slots"));
  ASSIGN_OR_RETURN(shape.adjacency_slots,
                   internal::IntField(*sj, "adjacency_slots"));
  ASSIGN_OR_RETURN(shape.device_dim, internal::IntField(*sj, "device_dim"));
  ASSIGN_OR_RETURN(shape.hidden, internal::IntField(*sj, "hidden"));
  ASSIGN_OR_RETURN(shape.num_devices, internal::IntField(*sj, "num_devices"));
  if (shape.type_dim < 1 || shape.shape_slots < 1 || shape.adjacency_slots < 1 ||
      shape.hidden < 1 || shape.device_dim < 1 || shape.num_devices < 1) {
    return absl::InvalidArgumentError("checkpoint shape has a zero dimension");
  }

  ASSIGN_OR_RETURN(const json* vj, internal::Field(doc, "vocab"));
  if (!vj->is_array() || static_cast<int>(vj->size()) != shape.vocab_size) {
    return absl::InvalidArgumentError("vocab does not match vocab_size");
  }
  EmbeddingSpec spec;
  spec.type_dim = shape.type_dim;
  spec.shape_slots = shape.shape_slots;
  spec.adjacency_slots = shape.adjacency_slots;
  for (int i = 1; i < shape.vocab_size; ++i) {
    spec.type_vocab[(*vj)[i].get<std::string>()] = i;
  }

  ASSIGN_OR_RETURN(const json* pj, internal::Field(doc, "params"));
  if (!pj->is_array()) return absl::InvalidArgumentError("'params' must be an array");
  std::vector<double> flat;
  flat.reserve(pj->size());
  for (const json& x : *pj) {
    if (!x.is_number()) return absl::InvalidArgumentError("non-numeric parameter");
    flat.push_back(x.get<double>());
  }
  PolicyParams params(shape);
  RETURN_IF_ERROR(params.SetFlat(flat));
  return Checkpoint{std::move(params), std::move(spec)};
}

absl::Status SaveCheckpoint(const std::string& path, const PolicyParams& params,
                            const EmbeddingSpec& spec) {
  return internal::WriteFile(path, SerializeCheckpoint(params, spec));
}

absl::StatusOr<Checkpoint> LoadCheckpoint(const std::string& path) {
  ASSIGN_OR_RETURN(std::string text, internal::ReadFile(path));
  return ParseCheckpoint(text);
}

}  // namespace devplace
