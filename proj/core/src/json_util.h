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

#ifndef DEVPLACE_SRC_JSON_UTIL_H_
#define DEVPLACE_SRC_JSON_UTIL_H_

#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "nlohmann/json.hpp"

// Schema helpers shared by the document readers. Every accessor reports the
// key it failed on.
namespace devplace::internal {

inline absl::StatusOr<std::string> ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return absl::NotFoundError(absl::StrCat("cannot open ", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline absl::Status WriteFile(const std::string& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) return absl::PermissionDeniedError(absl::StrCat("cannot write ", path));
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) return absl::DataLossError(absl::StrCat("short write to ", path));
  return absl::OkStatus();
}

inline absl::StatusOr<nlohmann::json> ParseJson(std::string_view text) {
  nlohmann::json doc = nlohmann::json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (doc.is_discarded()) return absl::InvalidArgumentError("malformed JSON");
  return doc;
}

inline absl::StatusOr<const nlohmann::json*> Field(const nlohmann::json& obj,
                                                   const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    return absl::InvalidArgumentError(absl::StrCat("missing key '", key, "'"));
  }
  return &*it;
}

inline absl::StatusOr<double> NumberField(const nlohmann::json& obj,
                                          const char* key) {
  auto f = Field(obj, key);
  if (!f.ok()) return f.status();
  if (!(*f)->is_number()) {
    return absl::InvalidArgumentError(absl::StrCat("'", key, "' must be a number"));
  }
  const double v = (*f)->get<double>();
  if (!(v >= 0.0)) {
    return absl::InvalidArgumentError(absl::StrCat("'", key, "' must be non-negative"));
  }
  return v;
}

inline absl::StatusOr<int64_t> Int64Field(const nlohmann::json& obj,
                                          const char* key) {
  auto f = Field(obj, key);
  if (!f.ok()) return f.status();
  if (!(*f)->is_number_integer()) {
    return absl::InvalidArgumentError(absl::StrCat("'", key, "' must be an integer"));
  }
  const int64_t v = (*f)->get<int64_t>();
  if (v < 0) {
    return absl::InvalidArgumentError(absl::StrCat("'", key, "' must be non-negative"));
  }
  return v;
}

inline absl::StatusOr<int> IntField(const nlohmann::json& obj, const char* key) {
  auto v = Int64Field(obj, key);
  if (!v.ok()) return v.status();
  if (*v > std::numeric_limits<int>::max()) {
    return absl::InvalidArgumentError(absl::StrCat("'", key, "' out of range"));
  }
  return static_cast<int>(*v);
}

inline absl::StatusOr<std::string> StringField(const nlohmann::json& obj,
                                               const char* key) {
  auto f = Field(obj, key);
  if (!f.ok()) return f.status();
  if (!(*f)->is_string()) {
    return absl::InvalidArgumentError(absl::StrCat("'", key, "' must be a string"));
  }
  return (*f)->get<std::string>();
}

}  // namespace devplace::internal

#endif  // DEVPLACE_SRC_JSON_UTIL_H_
