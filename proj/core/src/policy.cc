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

#include "devplace/policy.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>
#include <utility>

#include "absl/strings/str_cat.h"
#include "devplace/status_macros.h"

namespace devplace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixView = Eigen::Map<RowMajorMatrix>;
using ConstMatrixView = Eigen::Map<const RowMajorMatrix>;

int EmbeddingSpec::TypeIndex(const std::string& type) const {
  auto it = type_vocab.find(type);
  return it == type_vocab.end() ? 0 : it->second;
}

EmbeddingSpec EmbeddingSpec::Build(
    std::span<const ComputationGraph* const> graphs, int type_dim,
    int shape_slots, int adjacency_slots) {
  std::set<std::string> types;
  for (const ComputationGraph* g : graphs) {
    for (const Operation& op : g->ops()) types.insert(op.type);
  }
  EmbeddingSpec spec;
  spec.type_dim = type_dim;
  spec.shape_slots = shape_slots;
  spec.adjacency_slots = adjacency_slots;
  int next = 1;
  for (const std::string& t : types) spec.type_vocab[t] = next++;
  return spec;
}

PolicyInputs EmbedGroups(const GroupedGraph& gg, const EmbeddingSpec& spec) {
  PolicyInputs inputs;
  inputs.group_at_step = gg.topo_order();
  for (int g : gg.topo_order()) {
    const Group& group = gg.group(g);
    GroupInput in;

    std::map<int, int> counts;
    int total = 0;
    for (const auto& [type, count] : group.type_counts) {
      counts[spec.TypeIndex(type)] += count;
      total += count;
    }
    for (const auto& [index, count] : counts) {
      in.type_mix.emplace_back(index, static_cast<double>(count) / total);
    }

    in.features.assign(spec.shape_slots + spec.adjacency_slots, 0.0);
    std::vector<double> sizes;
    for (int64_t elements : group.output_elements) {
      sizes.push_back(std::log1p(static_cast<double>(elements)));
    }
    std::sort(sizes.begin(), sizes.end(), std::greater<>());
    for (int i = 0; i < spec.shape_slots && i < static_cast<int>(sizes.size()); ++i) {
      in.features[i] = sizes[i];
    }
    for (int ei : gg.in_edges(g)) {
      in.features[spec.shape_slots + gg.group_edges()[ei].src % spec.adjacency_slots] = 1.0;
    }
    for (int ei : gg.out_edges(g)) {
      in.features[spec.shape_slots + gg.group_edges()[ei].dst % spec.adjacency_slots] = 1.0;
    }
    inputs.steps.push_back(std::move(in));
  }
  return inputs;
}

PolicyShape ShapeFor(const EmbeddingSpec& spec, int num_devices, int hidden,
                     int device_dim) {
  PolicyShape shape;
  shape.vocab_size = spec.vocab_size();
  shape.type_dim = spec.type_dim;
  shape.shape_slots = spec.shape_slots;
  shape.adjacency_slots = spec.adjacency_slots;
  shape.device_dim = device_dim;
  shape.hidden = hidden;
  shape.num_devices = num_devices;
  return shape;
}

PolicyParams::PolicyParams(const PolicyShape& shape) : shape_(shape) {
  const int h = shape.hidden;
  const int d = shape.num_devices;
  const std::pair<const char*, std::pair<int, int>> layout[kNumBlocks] = {
      {"type_embedding", {shape.vocab_size, shape.type_dim}},
      {"device_embedding", {d + 1, shape.device_dim}},
      {"encoder_weights", {4 * h, shape.input_dim() + h}},
      {"encoder_bias", {4 * h, 1}},
      {"decoder_weights", {4 * h, shape.device_dim + h}},
      {"decoder_bias", {4 * h, 1}},
      {"attention_weights", {h, h}},
      {"output_weights", {d, 2 * h}},
      {"output_bias", {d, 1}},
  };
  size_t offset = 0;
  for (const auto& [name, dims] : layout) {
    ParamBlock b{name, dims.first, dims.second, offset};
    offset += b.size();
    blocks_.push_back(std::move(b));
  }
  flat_.assign(offset, 0.0);
}

PolicyParams PolicyParams::RandomUniform(const PolicyShape& shape,
                                         uint64_t seed, double scale) {
  PolicyParams params(shape);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-scale, scale);
  for (double& v : params.flat_) v = dist(rng);
  return params;
}

std::span<double> PolicyParams::mutable_block(BlockId id) {
  return std::span<double>(flat_).subspan(blocks_[id].offset, blocks_[id].size());
}

std::span<const double> PolicyParams::block_values(BlockId id) const {
  return std::span<const double>(flat_).subspan(blocks_[id].offset,
                                                blocks_[id].size());
}

absl::Status PolicyParams::SetFlat(std::span<const double> values) {
  if (values.size() != flat_.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "expected ", flat_.size(), " parameters, got ", values.size()));
  }
  std::copy(values.begin(), values.end(), flat_.begin());
  return absl::OkStatus();
}

// ---------------------------------------------------------------------------
// Forward / backward.

namespace {

struct LstmCache {
  VectorXd input;   // [x; h_prev]
  VectorXd c_prev;
  VectorXd i, f, g, o;
  VectorXd c, tanh_c, h;
};

VectorXd Sigmoid(const VectorXd& z) {
  return (1.0 + (-z.array()).exp()).inverse().matrix();
}

LstmCache LstmForward(const ConstMatrixView& w,
                      const Eigen::Map<const VectorXd>& b, const VectorXd& x,
                      const VectorXd& h_prev, const VectorXd& c_prev) {
  const int h = static_cast<int>(h_prev.size());
  LstmCache cache;
  cache.input.resize(x.size() + h);
  cache.input << x, h_prev;
  cache.c_prev = c_prev;
  const VectorXd z = w * cache.input + b;
  cache.i = Sigmoid(z.segment(0, h));
  cache.f = Sigmoid(z.segment(h, h));
  cache.g = z.segment(2 * h, h).array().tanh().matrix();
  cache.o = Sigmoid(z.segment(3 * h, h));
  cache.c = cache.f.cwiseProduct(c_prev) + cache.i.cwiseProduct(cache.g);
  cache.tanh_c = cache.c.array().tanh().matrix();
  cache.h = cache.o.cwiseProduct(cache.tanh_c);
  return cache;
}

// Accumulates parameter gradients and returns d(input) = d[x; h_prev];
// `dc` carries dL/dc in and dL/dc_prev out.
VectorXd LstmBackward(const LstmCache& cache, const ConstMatrixView& w,
                      MatrixView dw, Eigen::Map<VectorXd> db,
                      const VectorXd& dh, VectorXd& dc) {
  const int h = static_cast<int>(dh.size());
  const VectorXd d_o = dh.cwiseProduct(cache.tanh_c);
  const VectorXd dc_total =
      dc + dh.cwiseProduct(cache.o).cwiseProduct(
               (1.0 - cache.tanh_c.array().square()).matrix());
  const VectorXd d_i = dc_total.cwiseProduct(cache.g);
  const VectorXd d_g = dc_total.cwiseProduct(cache.i);
  const VectorXd d_f = dc_total.cwiseProduct(cache.c_prev);
  dc = dc_total.cwiseProduct(cache.f);

  VectorXd dz(4 * h);
  dz.segment(0, h) = d_i.array() * cache.i.array() * (1.0 - cache.i.array());
  dz.segment(h, h) = d_f.array() * cache.f.array() * (1.0 - cache.f.array());
  dz.segment(2 * h, h) = d_g.array() * (1.0 - cache.g.array().square());
  dz.segment(3 * h, h) = d_o.array() * cache.o.array() * (1.0 - cache.o.array());
  dw.noalias() += dz * cache.input.transpose();
  db += dz;
  return w.transpose() * dz;
}

// Read-only views of every block.
struct Views {
  ConstMatrixView type_emb, device_emb, enc_w;
  Eigen::Map<const VectorXd> enc_b;
  ConstMatrixView dec_w;
  Eigen::Map<const VectorXd> dec_b;
  ConstMatrixView attn_w, out_w;
  Eigen::Map<const VectorXd> out_b;

  static ConstMatrixView M(const PolicyParams& p, PolicyParams::BlockId id) {
    const ParamBlock& b = p.block(id);
    return ConstMatrixView(p.flat().data() + b.offset, b.rows, b.cols);
  }
  static Eigen::Map<const VectorXd> V(const PolicyParams& p,
                                      PolicyParams::BlockId id) {
    const ParamBlock& b = p.block(id);
    return Eigen::Map<const VectorXd>(p.flat().data() + b.offset, b.rows);
  }

  explicit Views(const PolicyParams& p)
      : type_emb(M(p, PolicyParams::kTypeEmbedding)),
        device_emb(M(p, PolicyParams::kDeviceEmbedding)),
        enc_w(M(p, PolicyParams::kEncoderWeights)),
        enc_b(V(p, PolicyParams::kEncoderBias)),
        dec_w(M(p, PolicyParams::kDecoderWeights)),
        dec_b(V(p, PolicyParams::kDecoderBias)),
        attn_w(M(p, PolicyParams::kAttentionWeights)),
        out_w(M(p, PolicyParams::kOutputWeights)),
        out_b(V(p, PolicyParams::kOutputBias)) {}
};

}  // namespace

struct PolicyTrace {
  std::vector<std::vector<std::pair<int, double>>> type_mix;  // per step
  std::vector<LstmCache> encoder;
  MatrixXd states;  // H x T encoder outputs
  MatrixXd keys;    // H x T, attention_weights * states
  std::vector<LstmCache> decoder;
  std::vector<VectorXd> attention;  // T weights per step
  std::vector<VectorXd> concat;     // [s_t; context_t]
  std::vector<VectorXd> probs;
  std::vector<int> actions;  // device per step
  double log_prob = 0.0;
};

namespace {

VectorXd EncoderInput(const Views& v, const PolicyShape& shape,
                      const GroupInput& in) {
  VectorXd x = VectorXd::Zero(shape.input_dim());
  for (const auto& [index, weight] : in.type_mix) {
    x.head(shape.type_dim) += weight * v.type_emb.row(index).transpose();
  }
  for (size_t j = 0; j < in.features.size(); ++j) {
    x(shape.type_dim + static_cast<int>(j)) = in.features[j];
  }
  return x;
}

// Runs encoder and decoder. With `forced` the given per-step devices are fed
// back; otherwise devices are sampled from `rng`.
std::shared_ptr<PolicyTrace> Run(const PolicyParams& params,
                                 const PolicyInputs& inputs,
                                 const std::vector<int>* forced,
                                 std::mt19937_64* rng) {
  const PolicyShape& shape = params.shape();
  const int h = shape.hidden;
  const int t_len = inputs.length();
  const int d = shape.num_devices;
  const Views v(params);

  auto trace = std::make_shared<PolicyTrace>();
  for (const GroupInput& in : inputs.steps) trace->type_mix.push_back(in.type_mix);
  trace->states.resize(h, t_len);

  VectorXd hs = VectorXd::Zero(h);
  VectorXd cs = VectorXd::Zero(h);
  for (int t = 0; t < t_len; ++t) {
    LstmCache cache = LstmForward(v.enc_w, v.enc_b,
                                  EncoderInput(v, shape, inputs.steps[t]), hs, cs);
    hs = cache.h;
    cs = cache.c;
    trace->states.col(t) = cache.h;
    trace->encoder.push_back(std::move(cache));
  }
  trace->keys = v.attn_w * trace->states;

  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  int prev = d;  // start-of-decode row
  for (int t = 0; t < t_len; ++t) {
    LstmCache cache = LstmForward(v.dec_w, v.dec_b,
                                  v.device_emb.row(prev).transpose(), hs, cs);
    hs = cache.h;
    cs = cache.c;

    VectorXd scores = trace->keys.transpose() * cache.h;
    VectorXd alpha = (scores.array() - scores.maxCoeff()).exp().matrix();
    alpha /= alpha.sum();
    VectorXd u(2 * h);
    u << cache.h, trace->states * alpha;

    const VectorXd logits = v.out_w * u + v.out_b;
    const double max_logit = logits.maxCoeff();
    VectorXd p = (logits.array() - max_logit).exp().matrix();
    const double normalizer = p.sum();
    p /= normalizer;

    int action = 0;
    if (forced != nullptr) {
      action = (*forced)[t];
    } else {
      const double draw = uniform(*rng);
      double cumulative = 0.0;
      action = d - 1;
      for (int k = 0; k < d; ++k) {
        cumulative += p(k);
        if (draw < cumulative) {
          action = k;
          break;
        }
      }
    }
    trace->log_prob += logits(action) - max_logit - std::log(normalizer);

    trace->decoder.push_back(std::move(cache));
    trace->attention.push_back(std::move(alpha));
    trace->concat.push_back(std::move(u));
    trace->probs.push_back(std::move(p));
    trace->actions.push_back(action);
    prev = action;
  }
  return trace;
}

absl::StatusOr<std::vector<int>> StepActions(const PolicyParams& params,
                                             const PolicyInputs& inputs,
                                             const Placement& placement) {
  if (placement.size() != inputs.length()) {
    return absl::InvalidArgumentError(
        absl::StrCat("placement has ", placement.size(), " entries for ",
                     inputs.length(), " groups"));
  }
  std::vector<int> actions(inputs.length());
  for (int t = 0; t < inputs.length(); ++t) {
    const int device = placement[inputs.group_at_step[t]];
    if (device < 0 || device >= params.shape().num_devices) {
      return absl::InvalidArgumentError(absl::StrCat(
          "device ", device, " out of range for ", params.shape().num_devices,
          " devices"));
    }
    actions[t] = device;
  }
  return actions;
}

}  // namespace

SampledPlacement ForwardSample(const PolicyParams& params,
                               const PolicyInputs& inputs,
                               std::mt19937_64& rng) {
  std::shared_ptr<PolicyTrace> trace = Run(params, inputs, nullptr, &rng);
  SampledPlacement sample;
  sample.placement.devices.assign(inputs.length(), 0);
  for (int t = 0; t < inputs.length(); ++t) {
    sample.placement.devices[inputs.group_at_step[t]] = trace->actions[t];
  }
  sample.log_prob = trace->log_prob;
  sample.trace = std::move(trace);
  return sample;
}

absl::StatusOr<double> LogProbOf(const PolicyParams& params,
                                 const PolicyInputs& inputs,
                                 const Placement& placement) {
  ASSIGN_OR_RETURN(std::vector<int> actions,
                   StepActions(params, inputs, placement));
  return Run(params, inputs, &actions, nullptr)->log_prob;
}

absl::StatusOr<std::vector<std::vector<double>>> StepDistributions(
    const PolicyParams& params, const PolicyInputs& inputs,
    const Placement& placement) {
  ASSIGN_OR_RETURN(std::vector<int> actions,
                   StepActions(params, inputs, placement));
  std::shared_ptr<PolicyTrace> trace = Run(params, inputs, &actions, nullptr);
  std::vector<std::vector<double>> out;
  for (const VectorXd& p : trace->probs) out.emplace_back(p.begin(), p.end());
  return out;
}

absl::StatusOr<std::vector<double>> GradLogProb(const PolicyParams& params,
                                                const PolicyInputs& inputs,
                                                const Placement& placement) {
  ASSIGN_OR_RETURN(std::vector<int> actions,
                   StepActions(params, inputs, placement));
  std::shared_ptr<PolicyTrace> trace = Run(params, inputs, &actions, nullptr);
  return GradFromTrace(params, *trace);
}

std::vector<double> GradFromTrace(const PolicyParams& params,
                                  const PolicyTrace& trace) {
  const PolicyShape& shape = params.shape();
  const int h = shape.hidden;
  const int d = shape.num_devices;
  const int t_len = static_cast<int>(trace.actions.size());
  const Views v(params);

  std::vector<double> grad(params.size(), 0.0);
  auto gm = [&](PolicyParams::BlockId id) {
    const ParamBlock& b = params.block(id);
    return MatrixView(grad.data() + b.offset, b.rows, b.cols);
  };
  auto gv = [&](PolicyParams::BlockId id) {
    const ParamBlock& b = params.block(id);
    return Eigen::Map<VectorXd>(grad.data() + b.offset, b.rows);
  };
  MatrixView d_type = gm(PolicyParams::kTypeEmbedding);
  MatrixView d_device = gm(PolicyParams::kDeviceEmbedding);
  MatrixView d_enc_w = gm(PolicyParams::kEncoderWeights);
  Eigen::Map<VectorXd> d_enc_b = gv(PolicyParams::kEncoderBias);
  MatrixView d_dec_w = gm(PolicyParams::kDecoderWeights);
  Eigen::Map<VectorXd> d_dec_b = gv(PolicyParams::kDecoderBias);
  MatrixView d_attn = gm(PolicyParams::kAttentionWeights);
  MatrixView d_out_w = gm(PolicyParams::kOutputWeights);
  Eigen::Map<VectorXd> d_out_b = gv(PolicyParams::kOutputBias);

  // Output projection and attention, per decoder step.
  MatrixXd d_states = MatrixXd::Zero(h, t_len);
  MatrixXd d_keys = MatrixXd::Zero(h, t_len);
  std::vector<VectorXd> d_dec_h(t_len);
  for (int t = 0; t < t_len; ++t) {
    VectorXd dz = -trace.probs[t];
    dz(trace.actions[t]) += 1.0;
    d_out_w.noalias() += dz * trace.concat[t].transpose();
    d_out_b += dz;
    const VectorXd du = v.out_w.transpose() * dz;
    const VectorXd d_context = du.tail(h);
    const VectorXd& alpha = trace.attention[t];
    const VectorXd d_alpha = trace.states.transpose() * d_context;
    d_states.noalias() += d_context * alpha.transpose();
    const VectorXd d_scores =
        alpha.cwiseProduct((d_alpha.array() - alpha.dot(d_alpha)).matrix());
    const VectorXd& s = trace.decoder[t].h;
    d_dec_h[t] = du.head(h) + trace.keys * d_scores;
    d_keys.noalias() += s * d_scores.transpose();
  }
  d_attn.noalias() += d_keys * trace.states.transpose();
  d_states.noalias() += v.attn_w.transpose() * d_keys;

  // Decoder, backwards through time.
  VectorXd dh_next = VectorXd::Zero(h);
  VectorXd dc = VectorXd::Zero(h);
  for (int t = t_len - 1; t >= 0; --t) {
    const VectorXd dh = d_dec_h[t] + dh_next;
    const VectorXd d_in =
        LstmBackward(trace.decoder[t], v.dec_w, d_dec_w, d_dec_b, dh, dc);
    const int prev = t == 0 ? d : trace.actions[t - 1];
    d_device.row(prev) += d_in.head(shape.device_dim).transpose();
    dh_next = d_in.tail(h);
  }

  // Encoder; its final state seeded the decoder.
  for (int t = t_len - 1; t >= 0; --t) {
    const VectorXd dh = d_states.col(t) + dh_next;
    const VectorXd d_in =
        LstmBackward(trace.encoder[t], v.enc_w, d_enc_w, d_enc_b, dh, dc);
    const VectorXd d_type_block = d_in.head(shape.type_dim);
    for (const auto& [index, weight] : trace.type_mix[t]) {
      d_type.row(index) += weight * d_type_block.transpose();
    }
    dh_next = d_in.tail(h);
  }
  return grad;
}

}  // namespace devplace
