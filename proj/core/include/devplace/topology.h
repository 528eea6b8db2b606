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

#ifndef DEVPLACE_TOPOLOGY_H_
#define DEVPLACE_TOPOLOGY_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"

namespace devplace {

enum class DeviceKind { kCpu, kGpu };

std::string_view DeviceKindName(DeviceKind kind);

struct Device {
  int id = 0;
  DeviceKind kind = DeviceKind::kGpu;
  // Work units per second; an op of cost c runs for c / compute_rate seconds.
  double compute_rate = 1.0;
  int64_t memory_bytes = 0;
};

// Devices plus a directed bandwidth matrix in bytes/second. Same-device
// transfers are free, so the diagonal is never read.
class DeviceTopology {
 public:
  static absl::StatusOr<DeviceTopology> Create(
      std::vector<Device> devices, std::vector<std::vector<double>> bandwidth);

  DeviceTopology() = default;

  int num_devices() const { return static_cast<int>(devices_.size()); }
  const std::vector<Device>& devices() const { return devices_; }
  const Device& device(int id) const { return devices_[id]; }
  double bandwidth(int src, int dst) const { return bandwidth_[src][dst]; }
  const std::vector<std::vector<double>>& bandwidth_matrix() const {
    return bandwidth_;
  }

  // Ids of devices of `kind`, ascending.
  std::vector<int> DevicesOfKind(DeviceKind kind) const;
  double SlowestRate() const;

 private:
  std::vector<Device> devices_;
  std::vector<std::vector<double>> bandwidth_;
};

// Topology document format:
//   {"devices": [{"id", "kind": "cpu"|"gpu", "rate", "memory_bytes"}],
//    "default_bandwidth": bytes_per_sec,
//    "bandwidth": [{"src", "dst", "bytes_per_sec"}]}
// Pairs absent from "bandwidth" take "default_bandwidth".
absl::StatusOr<DeviceTopology> ParseTopology(std::string_view json_text);
absl::StatusOr<DeviceTopology> LoadTopology(const std::string& path);
std::string SerializeTopology(const DeviceTopology& topo);

// Synthetic workstation: device 0 is a cpu, devices 1..num_gpus are gpus.
// Ratios: gpu rate = 10x cpu rate, gpu<->gpu bandwidth = 4x cpu<->gpu.
struct WorkstationOptions {
  double cpu_rate = 1.0;
  double gpu_rate = 10.0;
  double cpu_gpu_bandwidth = 1.0e7;
  double gpu_gpu_bandwidth = 4.0e7;
  int64_t cpu_memory_bytes = 64'000'000'000;
  int64_t gpu_memory_bytes = 12'000'000'000;
};
DeviceTopology WorkstationTopology(int num_gpus,
                                   const WorkstationOptions& options = {});

}  // namespace devplace

#endif  // DEVPLACE_TOPOLOGY_H_
