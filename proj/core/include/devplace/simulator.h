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

#ifndef DEVPLACE_SIMULATOR_H_
#define DEVPLACE_SIMULATOR_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "devplace/grouping.h"
#include "devplace/topology.h"

namespace devplace {

// Group id -> device id.
struct Placement {
  std::vector<int> devices;

  int size() const { return static_cast<int>(devices.size()); }
  int operator[](int group) const { return devices[group]; }
  friend bool operator==(const Placement&, const Placement&) = default;
  friend auto operator<=>(const Placement&, const Placement&) = default;

  // Device ids joined by '-', e.g. "0-1-1".
  std::string ToString() const;
  static absl::StatusOr<Placement> Parse(std::string_view text);
};

absl::Status ValidatePlacement(const GroupedGraph& gg,
                               const DeviceTopology& topo, const Placement& p);

struct MemoryReport {
  std::vector<int64_t> peak_bytes;
  bool feasible = true;
};

struct SimReport {
  double makespan_seconds = 0.0;
  std::vector<double> busy_seconds;      // per device
  std::vector<double> transfer_seconds;  // per device, outgoing links
  std::vector<int64_t> peak_bytes;       // per device
  bool feasible = true;
};

// Static resident-set bound: every group charges its parameters and all the
// tensors it produces to its device.
absl::StatusOr<MemoryReport> CheckMemory(const GroupedGraph& gg,
                                         const DeviceTopology& topo,
                                         const Placement& p);

// Event-driven execution of one step.
//
// Devices run one group at a time, non-preemptively. An idle device picks the
// ready group with the earliest ready time, then lowest topo rank. A
// cross-device edge with nonzero bytes occupies the directed link
// (src device, dst device) for bytes / bandwidth seconds; each link serves its
// requests one at a time ordered by (request time, producer topo rank,
// consumer topo rank). Zero-byte edges and same-device edges deliver on
// completion of the producer. Communication overlaps computation.
//
// Memory infeasibility does not fail the call; it is reported via `feasible`.
absl::StatusOr<SimReport> Simulate(const GroupedGraph& gg,
                                   const DeviceTopology& topo,
                                   const Placement& p);

struct NoiseSpec {
  double sigma = 0.0;  // lognormal shape; 0 disables noise
  uint64_t seed = 0;
};

// Outcome of a measurement: either a runtime or the infeasible marker.
class Measurement {
 public:
  static Measurement Infeasible() { return Measurement(false, 0.0); }
  static Measurement Seconds(double s) { return Measurement(true, s); }

  bool feasible() const { return feasible_; }
  double seconds() const { return seconds_; }

 private:
  Measurement(bool feasible, double seconds)
      : feasible_(feasible), seconds_(seconds) {}
  bool feasible_;
  double seconds_;
};

// Runs the placement for `steps` steps and averages all but the first. With
// noise, step i's runtime is makespan * exp(sigma * z_i) with z_i drawn from a
// generator seeded by `noise->seed`.
absl::StatusOr<Measurement> Measure(const GroupedGraph& gg,
                                    const DeviceTopology& topo,
                                    const Placement& p,
                                    const std::optional<NoiseSpec>& noise = {},
                                    int steps = 10);

}  // namespace devplace

#endif  // DEVPLACE_SIMULATOR_H_
