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

#ifndef DEVPLACE_GENERATORS_H_
#define DEVPLACE_GENERATORS_H_

#include <cstdint>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "devplace/graph.h"

namespace devplace {

enum class GeneratorFamily { kRnnlmGrid, kNmtAttention, kInceptionBlocks };

std::string_view GeneratorFamilyName(GeneratorFamily family);
absl::StatusOr<GeneratorFamily> ParseGeneratorFamily(std::string_view name);

// Synthetic training-step graphs (forward, backward and parameter updates).
//
// Manual groups: every forward LSTM cell, backward LSTM cell, embedding
// lookup, attention step (and its backward) and softmax step is one group;
// for inception every forward branch and every backward branch is one group.
// After CoalesceSoleConsumers the group counts are:
//
//   rnnlm_grid(L, S):            2*L*S + 2*S + 2*L + 4
//   nmt_attention(L, Ss, St):    2*L*(Ss + St) + Ss + 4*St + 4*L + 8
//   inception_blocks(K, B>=2):   2*K*B + 3*K + 1
//
// Compute cost is flops * cost_scale; tensor bytes are 4 * elements *
// byte_scale. `seed` jitters every op cost by a factor in [0.9, 1.1].
struct GeneratorSpec {
  GeneratorFamily family = GeneratorFamily::kRnnlmGrid;
  int layers = 2;
  int steps = 3;         // rnnlm steps, nmt source steps
  int target_steps = 3;  // nmt decoder steps
  int hidden = 64;
  int batch = 64;
  int vocab = 1000;
  int blocks = 2;
  int branches = 4;
  int spatial = 8;  // inception feature-map side length
  uint64_t seed = 0;
  double cost_scale = 1e-9;
  double byte_scale = 1.0;
};

absl::Status ValidateGeneratorSpec(const GeneratorSpec& spec);

absl::StatusOr<ComputationGraph> Generate(const GeneratorSpec& spec);

}  // namespace devplace

#endif  // DEVPLACE_GENERATORS_H_
