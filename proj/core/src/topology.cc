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

#include "devplace/topology.h"

#include <algorithm>
#include <utility>

#include "absl/strings/str_cat.h"
#include "devplace/status_macros.h"
#include "json_util.h"
#include "nlohmann/json.hpp"

namespace devplace {

using nlohmann::json;

std::string_view DeviceKindName(DeviceKind kind) {
  return kind == DeviceKind::kCpu ? "cpu" : "gpu";
}

absl::StatusOr<DeviceTopology> DeviceTopology::Create(
    std::vector<Device> devices, std::vector<std::vector<double>> bandwidth) {
  const int d = static_cast<int>(devices.size());
  if (d == 0) return absl::InvalidArgumentError("topology has no devices");
  std::sort(devices.begin(), devices.end(),
            [](const Device& a, const Device& b) { return a.id < b.id; });
  for (int i = 0; i < d; ++i) {
    if (devices[i].id != i) {
      return absl::InvalidArgumentError(
          absl::StrCat("device ids must be dense 0..", d - 1));
    }
    if (!(devices[i].compute_rate > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("device ", i, " needs a positive rate"));
    }
    if (devices[i].memory_bytes <= 0) {
      return absl::InvalidArgumentError(
          absl::StrCat("device ", i, " needs positive memory"));
    }
  }
  if (static_cast<int>(bandwidth.size()) != d) {
    return absl::InvalidArgumentError("bandwidth matrix must be D x D");
  }
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(bandwidth[i].size()) != d) {
      return absl::InvalidArgumentError("bandwidth matrix must be D x D");
    }
    for (int j = 0; j < d; ++j) {
      if (i != j && !(bandwidth[i][j] > 0.0)) {
        return absl::InvalidArgumentError(
            absl::StrCat("bandwidth ", i, " -> ", j, " must be positive"));
      }
    }
  }
  DeviceTopology topo;
  topo.devices_ = std::move(devices);
  topo.bandwidth_ = std::move(bandwidth);
  return topo;
}

std::vector<int> DeviceTopology::DevicesOfKind(DeviceKind kind) const {
  std::vector<int> ids;
  for (const Device& dev : devices_) {
    if (dev.kind == kind) ids.push_back(dev.id);
  }
  return ids;
}

double DeviceTopology::SlowestRate() const {
  double slowest = devices_.front().compute_rate;
  for (const Device& dev : devices_) slowest = std::min(slowest, dev.compute_rate);
  return slowest;
}

absl::StatusOr<DeviceTopology> ParseTopology(std::string_view json_text) {
  ASSIGN_OR_RETURN(json doc, internal::ParseJson(json_text));
  if (!doc.is_object()) {
    return absl::InvalidArgumentError("topology document must be an object");
  }
  ASSIGN_OR_RETURN(const json* devices_json, internal::Field(doc, "devices"));
  if (!devices_json->is_array()) {
    return absl::InvalidArgumentError("'devices' must be an array");
  }
  std::vector<Device> devices;
  for (const json& dj : *devices_json) {
    if (!dj.is_object()) return absl::InvalidArgumentError("bad device entry");
    Device dev;
    ASSIGN_OR_RETURN(dev.id, internal::IntField(dj, "id"));
    ASSIGN_OR_RETURN(std::string kind, internal::StringField(dj, "kind"));
    if (kind == "cpu") {
      dev.kind = DeviceKind::kCpu;
    } else if (kind == "gpu") {
      dev.kind = DeviceKind::kGpu;
    } else {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown device kind '", kind, "'"));
    }
    ASSIGN_OR_RETURN(dev.compute_rate, internal::NumberField(dj, "rate"));
    ASSIGN_OR_RETURN(dev.memory_bytes, internal::Int64Field(dj, "memory_bytes"));
    devices.push_back(dev);
  }
  const int d = static_cast<int>(devices.size());
  double fallback = 0.0;
  if (doc.contains("default_bandwidth")) {
    ASSIGN_OR_RETURN(fallback, internal::NumberField(doc, "default_bandwidth"));
  }
  std::vector<std::vector<double>> bandwidth(d, std::vector<double>(d, fallback));
  for (int i = 0; i < d; ++i) bandwidth[i][i] = 0.0;
  if (auto it = doc.find("bandwidth"); it != doc.end()) {
    if (!it->is_array()) {
      return absl::InvalidArgumentError("'bandwidth' must be an array");
    }
    for (const json& bj : *it) {
      if (!bj.is_object()) return absl::InvalidArgumentError("bad bandwidth entry");
      ASSIGN_OR_RETURN(int src, internal::IntField(bj, "src"));
      ASSIGN_OR_RETURN(int dst, internal::IntField(bj, "dst"));
      ASSIGN_OR_RETURN(double bps, internal::NumberField(bj, "bytes_per_sec"));
      if (src >= d || dst >= d) {
        return absl::InvalidArgumentError(
            absl::StrCat("bandwidth entry references device ", std::max(src, dst)));
      }
      bandwidth[src][dst] = bps;
    }
  }
  return DeviceTopology::Create(std::move(devices), std::move(bandwidth));
}

absl::StatusOr<DeviceTopology> LoadTopology(const std::string& path) {
  ASSIGN_OR_RETURN(std::string text, internal::ReadFile(path));
  return ParseTopology(text);
}

std::string SerializeTopology(const DeviceTopology& topo) {
  json devices = json::array();
  for (const Device& dev : topo.devices()) {
    devices.push_back({{"id", dev.id},
                       {"kind", std::string(DeviceKindName(dev.kind))},
                       {"rate", dev.compute_rate},
                       {"memory_bytes", dev.memory_bytes}});
  }
  json bandwidth = json::array();
  for (int i = 0; i < topo.num_devices(); ++i) {
    for (int j = 0; j < topo.num_devices(); ++j) {
      if (i == j) continue;
      bandwidth.push_back(
          {{"src", i}, {"dst", j}, {"bytes_per_sec", topo.bandwidth(i, j)}});
    }
  }
  json doc = {{"devices", std::move(devices)}, {"bandwidth", std::move(bandwidth)}};
  return doc.dump(1) + "\n";
}

DeviceTopology WorkstationTopology(int num_gpus,
                                   const WorkstationOptions& options) {
  const int d = num_gpus + 1;
  std::vector<Device> devices;
  devices.push_back({0, DeviceKind::kCpu, options.cpu_rate, options.cpu_memory_bytes});
  for (int i = 1; i < d; ++i) {
    devices.push_back({i, DeviceKind::kGpu, options.gpu_rate, options.gpu_memory_bytes});
  }
  std::vector<std::vector<double>> bandwidth(d, std::vector<double>(d, 0.0));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      if (i == j) continue;
      bandwidth[i][j] = (i == 0 || j == 0) ? options.cpu_gpu_bandwidth
                                           : options.gpu_gpu_bandwidth;
    }
  }
  return *DeviceTopology::Create(std::move(devices), std::move(bandwidth));
}

}  // namespace devplace
