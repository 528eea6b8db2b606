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

#ifndef DEVPLACE_POLICY_H_
#define DEVPLACE_POLICY_H_

#include <cstdint>
#include <map>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/statusor.h"
#include "devplace/grouping.h"
#include "devplace/simulator.h"

namespace devplace {

// How group descriptors are turned into encoder inputs. Index 0 of the type
// vocabulary is reserved for types not seen when the vocabulary was built.
struct EmbeddingSpec {
  std::map<std::string, int> type_vocab;
  int type_dim = 16;
  int shape_slots = 8;
  int adjacency_slots = 64;

  int vocab_size() const { return static_cast<int>(type_vocab.size()) + 1; }
  int TypeIndex(const std::string& type) const;

  // Vocabulary over every op type that appears in `graphs`, sorted by name.
  static EmbeddingSpec Build(std::span<const ComputationGraph* const> graphs,
                             int type_dim = 16, int shape_slots = 8,
                             int adjacency_slots = 64);
};

// One encoder step. The type block is a weighted mean of trainable type
// embeddings, so only the mixing weights are fixed here; `features` holds the
// fixed shape and adjacency blocks.
struct GroupInput {
  std::vector<std::pair<int, double>> type_mix;  // (vocab index, weight)
  std::vector<double> features;  // shape_slots + adjacency_slots entries
};

struct PolicyInputs {
  std::vector<GroupInput> steps;     // one per group, in topo order
  std::vector<int> group_at_step;    // group id decoded at each step

  int length() const { return static_cast<int>(steps.size()); }
};

// Builds the encoder input sequence:
//   shape block: log1p of the group's outgoing tensor element counts, sorted
//     descending, truncated or zero-padded to shape_slots;
//   adjacency block: 1.0 at (group id mod adjacency_slots) for every direct
//     predecessor and successor. Distinct neighbours may share a slot.
PolicyInputs EmbedGroups(const GroupedGraph& gg, const EmbeddingSpec& spec);

struct PolicyShape {
  int vocab_size = 1;
  int type_dim = 16;
  int shape_slots = 8;
  int adjacency_slots = 64;
  int device_dim = 16;
  int hidden = 64;
  int num_devices = 2;

  int input_dim() const { return type_dim + shape_slots + adjacency_slots; }
  friend bool operator==(const PolicyShape&, const PolicyShape&) = default;
};

PolicyShape ShapeFor(const EmbeddingSpec& spec, int num_devices,
                     int hidden = 64, int device_dim = 16);

// A named, row-major slice of the flat parameter vector.
struct ParamBlock {
  std::string name;
  int rows = 0;
  int cols = 0;
  size_t offset = 0;

  size_t size() const { return static_cast<size_t>(rows) * cols; }
};

// All trainable tensors of the placement policy, stored contiguously in a
// fixed canonical order:
//   type_embedding      [vocab x type_dim]
//   device_embedding    [(D + 1) x device_dim]   (row D starts decoding)
//   encoder_weights     [4H x (input_dim + H)]   gate rows i, f, g, o
//   encoder_bias        [4H x 1]
//   decoder_weights     [4H x (device_dim + H)]
//   decoder_bias        [4H x 1]
//   attention_weights   [H x H]
//   output_weights      [D x 2H]
//   output_bias         [D x 1]
class PolicyParams {
 public:
  static constexpr int kLayoutVersion = 1;

  enum BlockId {
    kTypeEmbedding = 0,
    kDeviceEmbedding,
    kEncoderWeights,
    kEncoderBias,
    kDecoderWeights,
    kDecoderBias,
    kAttentionWeights,
    kOutputWeights,
    kOutputBias,
    kNumBlocks,
  };

  // All-zero parameters.
  explicit PolicyParams(const PolicyShape& shape);
  // Entries drawn uniformly from [-scale, scale].
  static PolicyParams RandomUniform(const PolicyShape& shape, uint64_t seed,
                                    double scale = 0.1);

  const PolicyShape& shape() const { return shape_; }
  const std::vector<ParamBlock>& blocks() const { return blocks_; }
  const ParamBlock& block(BlockId id) const { return blocks_[id]; }

  size_t size() const { return flat_.size(); }
  std::span<const double> flat() const { return flat_; }
  std::span<double> mutable_flat() { return flat_; }
  std::span<double> mutable_block(BlockId id);
  std::span<const double> block_values(BlockId id) const;

  // Replaces every value; `values` must have size() entries.
  absl::Status SetFlat(std::span<const double> values);

 private:
  PolicyShape shape_;
  std::vector<ParamBlock> blocks_;
  std::vector<double> flat_;
};

struct PolicyTrace;

struct SampledPlacement {
  Placement placement;
  double log_prob = 0.0;
  // Forward activations reused by GradFromTrace.
  std::shared_ptr<const PolicyTrace> trace;
};

// Encodes the sequence, then decodes one device per step: content-based
// attention over encoder states, a softmax over devices, a sample, and the
// sampled device's embedding becomes the next decoder input.
SampledPlacement ForwardSample(const PolicyParams& params,
                               const PolicyInputs& inputs,
                               std::mt19937_64& rng);

// Teacher-forced log-probability of `placement`; takes the same computation
// path as ForwardSample, so the sampler's log_prob is reproduced bit-exactly.
absl::StatusOr<double> LogProbOf(const PolicyParams& params,
                                 const PolicyInputs& inputs,
                                 const Placement& placement);

// Gradient of LogProbOf with respect to the flat parameter vector.
absl::StatusOr<std::vector<double>> GradLogProb(const PolicyParams& params,
                                                const PolicyInputs& inputs,
                                                const Placement& placement);

// Same, re-using the activations cached by ForwardSample.
std::vector<double> GradFromTrace(const PolicyParams& params,
                                  const PolicyTrace& trace);

// Per-step device distributions under teacher forcing with `placement`.
absl::StatusOr<std::vector<std::vector<double>>> StepDistributions(
    const PolicyParams& params, const PolicyInputs& inputs,
    const Placement& placement);

// Checkpoint: a JSON document carrying the shape, the type vocabulary, the
// layout version and the flat parameter vector. Doubles round-trip exactly.
std::string SerializeCheckpoint(const PolicyParams& params,
                                const EmbeddingSpec& spec);
struct Checkpoint {
  PolicyParams params;
  EmbeddingSpec spec;
};
absl::StatusOr<Checkpoint> ParseCheckpoint(std::string_view text);
absl::Status SaveCheckpoint(const std::string& path, const PolicyParams& params,
                            const EmbeddingSpec& spec);
absl::StatusOr<Checkpoint> LoadCheckpoint(const std::string& path);

}  // namespace devplace

#endif  // DEVPLACE_POLICY_H_
