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

#include "devplace/generators.h"

#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "devplace/status_macros.h"

namespace devplace {
namespace {

using Shape = std::vector<int64_t>;

int64_t Elements(const Shape& s) {
  int64_t n = 1;
  for (int64_t d : s) n *= d;
  return s.empty() ? 0 : n;
}

class Builder {
 public:
  explicit Builder(const GeneratorSpec& spec) : spec_(spec), rng_(spec.seed) {}

  int Op(std::string name, std::string type, double flops, Shape shape,
         int64_t param_elements = 0) {
    Operation op;
    op.id = static_cast<int>(ops_.size());
    op.name = std::move(name);
    op.type = std::move(type);
    op.compute_cost = flops * spec_.cost_scale * jitter_(rng_);
    op.output_shape = std::move(shape);
    op.param_bytes = Bytes(param_elements);
    ops_.push_back(std::move(op));
    if (open_group_ != nullptr) open_group_->push_back(ops_.back().id);
    return ops_.back().id;
  }

  // Carries the full output of `src` unless `elements` is given.
  void Link(int src, int dst, int64_t elements = -1) {
    if (src < 0 || dst < 0) return;
    if (elements < 0) elements = ops_[src].OutputElements();
    edges_.push_back(Edge{src, dst, Bytes(elements)});
  }

  void SetFlops(int op, double flops) {
    ops_[op].compute_cost = flops * spec_.cost_scale * jitter_(rng_);
  }

  void BeginGroup() {
    groups_.emplace_back();
    open_group_ = &groups_.back();
  }
  void EndGroup() { open_group_ = nullptr; }

  absl::StatusOr<ComputationGraph> Finish() {
    return ComputationGraph::Create(std::move(ops_), std::move(edges_),
                                    std::move(groups_));
  }

 private:
  int64_t Bytes(int64_t elements) const {
    return std::llround(4.0 * static_cast<double>(elements) * spec_.byte_scale);
  }

  const GeneratorSpec& spec_;
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> jitter_{0.9, 1.1};
  std::vector<Operation> ops_;
  std::vector<Edge> edges_;
  std::vector<std::vector<int>> groups_;
  std::vector<int>* open_group_ = nullptr;
};

struct CellForward {
  int concat = -1;
  int preact = -1;
  int c = -1;
  int h = -1;
};

struct CellBackward {
  int dx = -1;
  int dh_prev = -1;
  int dc_prev = -1;
  int dw = -1;
};

struct LstmDims {
  int64_t b, h;
};

CellForward ForwardCell(Builder& g, const std::string& p, LstmDims d, int x,
                        int h_prev, int c_prev, int weights) {
  const int64_t b = d.b, h = d.h;
  const double mm = 2.0 * b * (2 * h) * (4 * h);
  const double ew = static_cast<double>(b * h);
  g.BeginGroup();
  CellForward f;
  f.concat = g.Op(p + "/concat", "ConcatV2", 2 * ew, {b, 2 * h});
  int matmul = g.Op(p + "/matmul", "MatMul", mm, {b, 4 * h});
  f.preact = g.Op(p + "/bias_add", "BiasAdd", 4 * ew, {b, 4 * h});
  int gi = g.Op(p + "/input_gate", "Sigmoid", 4 * ew, {b, h});
  int gf = g.Op(p + "/forget_gate", "Sigmoid", 4 * ew, {b, h});
  int gg = g.Op(p + "/candidate", "Tanh", 4 * ew, {b, h});
  int go = g.Op(p + "/output_gate", "Sigmoid", 4 * ew, {b, h});
  int fc = g.Op(p + "/forget_mul", "Mul", ew, {b, h});
  int ig = g.Op(p + "/input_mul", "Mul", ew, {b, h});
  f.c = g.Op(p + "/cell_state", "Add", ew, {b, h});
  int tc = g.Op(p + "/cell_tanh", "Tanh", 4 * ew, {b, h});
  int hm = g.Op(p + "/hidden_mul", "Mul", ew, {b, h});
  f.h = g.Op(p + "/hidden", "Identity", ew, {b, h});
  g.EndGroup();

  g.Link(x, f.concat);
  g.Link(h_prev, f.concat);
  g.Link(weights, matmul);
  g.Link(f.concat, matmul);
  g.Link(matmul, f.preact);
  for (int gate : {gi, gf, gg, go}) g.Link(f.preact, gate, b * h);
  g.Link(c_prev, fc);
  g.Link(gf, fc);
  g.Link(gi, ig);
  g.Link(gg, ig);
  g.Link(fc, f.c);
  g.Link(ig, f.c);
  g.Link(f.c, tc);
  g.Link(tc, hm);
  g.Link(go, hm);
  g.Link(hm, f.h);
  return f;
}

CellBackward BackwardCell(Builder& g, const std::string& p, LstmDims d,
                          const CellForward& f,
                          const std::vector<int>& dh_sources, int dc_source,
                          int weights) {
  const int64_t b = d.b, h = d.h;
  const double mm = 2.0 * b * (2 * h) * (4 * h);
  const double ew = static_cast<double>(b * h);
  g.BeginGroup();
  int dh = g.Op(p + "/dh_sum", "AddN", ew, {b, h});
  int dc_in = g.Op(p + "/dc_in", "Identity", ew, {b, h});
  int tanh_c = g.Op(p + "/tanh_c", "Tanh", 4 * ew, {b, h});
  int d_o = g.Op(p + "/d_output_gate", "Mul", ew, {b, h});
  int d_tanh = g.Op(p + "/d_cell_tanh", "Mul", ew, {b, h});
  int tanh_grad = g.Op(p + "/tanh_grad", "TanhGrad", 2 * ew, {b, h});
  int dc = g.Op(p + "/dc", "Add", ew, {b, h});
  int d_i = g.Op(p + "/d_input_gate", "Mul", ew, {b, h});
  int d_g = g.Op(p + "/d_candidate", "Mul", ew, {b, h});
  int d_f = g.Op(p + "/d_forget_gate", "Mul", ew, {b, h});
  int dc_prev = g.Op(p + "/dc_prev", "Mul", ew, {b, h});
  int sg_i = g.Op(p + "/input_gate_grad", "SigmoidGrad", 2 * ew, {b, h});
  int sg_f = g.Op(p + "/forget_gate_grad", "SigmoidGrad", 2 * ew, {b, h});
  int sg_o = g.Op(p + "/output_gate_grad", "SigmoidGrad", 2 * ew, {b, h});
  int tg_g = g.Op(p + "/candidate_grad", "TanhGrad", 2 * ew, {b, h});
  int dgates = g.Op(p + "/dgates", "ConcatV2", 4 * ew, {b, 4 * h});
  int dbias = g.Op(p + "/dbias", "Sum", 4 * ew, {4 * h});
  int concat_t = g.Op(p + "/concat_transpose", "Transpose", 2 * ew, {2 * h, b});
  int dw_mm = g.Op(p + "/dw_matmul", "MatMul", mm, {2 * h, 4 * h});
  int dw = g.Op(p + "/dw", "Add", 8.0 * h * h, {2 * h, 4 * h});
  int dx_mm = g.Op(p + "/dx_matmul", "MatMul", mm, {b, 2 * h});
  CellBackward out;
  out.dx = g.Op(p + "/dx", "Split", ew, {b, h});
  int dh_split = g.Op(p + "/dh_split", "Split", ew, {b, h});
  out.dc_prev = g.Op(p + "/dc_out", "Identity", ew, {b, h});
  out.dh_prev = g.Op(p + "/dh_out", "Identity", ew, {b, h});
  out.dw = g.Op(p + "/dw_out", "Identity", 8.0 * h * h, {2 * h, 4 * h});
  g.EndGroup();

  for (int src : dh_sources) g.Link(src, dh);
  g.Link(dc_source, dc_in);
  g.Link(f.c, tanh_c);
  g.Link(dh, d_o);
  g.Link(tanh_c, d_o);
  g.Link(dh, d_tanh);
  g.Link(d_tanh, tanh_grad);
  g.Link(tanh_c, tanh_grad);
  g.Link(dc_in, dc);
  g.Link(tanh_grad, dc);
  for (int x : {d_i, d_g, d_f, dc_prev}) g.Link(dc, x);
  for (int x : {sg_i, sg_f, sg_o, tg_g}) g.Link(f.preact, x, b * h);
  g.Link(d_i, sg_i);
  g.Link(d_f, sg_f);
  g.Link(d_o, sg_o);
  g.Link(d_g, tg_g);
  for (int x : {sg_i, sg_f, sg_o, tg_g}) g.Link(x, dgates);
  g.Link(dgates, dbias);
  g.Link(f.concat, concat_t);
  g.Link(concat_t, dw_mm);
  g.Link(dgates, dw_mm);
  g.Link(dw_mm, dw);
  g.Link(dbias, dw);
  g.Link(dgates, dx_mm);
  g.Link(weights, dx_mm);
  g.Link(dx_mm, out.dx, b * h);
  g.Link(dx_mm, dh_split, b * h);
  g.Link(dc_prev, out.dc_prev);
  g.Link(dh_split, out.dh_prev);
  g.Link(dw, out.dw);
  return out;
}

struct SoftmaxStep {
  int dh = -1;
  int dv = -1;
};

SoftmaxStep Softmax(Builder& g, const std::string& p, int64_t b, int64_t h,
                    int64_t v, int input, int weights) {
  const double mm = 2.0 * b * h * v;
  g.BeginGroup();
  int logits = g.Op(p + "/logits", "MatMul", mm, {b, v});
  int probs = g.Op(p + "/softmax", "Softmax", 3.0 * b * v, {b, v});
  int loss = g.Op(p + "/xent", "SoftmaxCrossEntropy", 2.0 * b * v, {b});
  int dlogits = g.Op(p + "/dlogits", "Sub", 1.0 * b * v, {b, v});
  SoftmaxStep out;
  out.dh = g.Op(p + "/dh", "MatMul", mm, {b, h});
  int input_t = g.Op(p + "/input_transpose", "Transpose", 1.0 * b * h, {h, b});
  out.dv = g.Op(p + "/dv", "MatMul", mm, {h, v});
  g.EndGroup();

  g.Link(input, logits);
  g.Link(input, input_t);
  g.Link(weights, logits);
  g.Link(weights, out.dh);
  g.Link(logits, probs);
  g.Link(probs, loss);
  g.Link(probs, dlogits);
  g.Link(loss, dlogits);
  g.Link(dlogits, out.dh);
  g.Link(input_t, out.dv);
  g.Link(dlogits, out.dv);
  return out;
}

int Variable(Builder& g, const std::string& name, Shape shape) {
  const int64_t n = Elements(shape);
  return g.Op(name, "VariableV2", 0.0, std::move(shape), n);
}

int Update(Builder& g, const std::string& name, int variable, Shape shape) {
  const int64_t n = Elements(shape);
  int u = g.Op(name, "ApplyAdam", 10.0 * static_cast<double>(n), std::move(shape));
  g.Link(variable, u);
  return u;
}

// Embedding lookup group and its gradient op; returns {lookup, grad}.
std::pair<int, int> Embedding(Builder& g, const std::string& p, int64_t b,
                              int64_t h, int table) {
  g.BeginGroup();
  int lookup = g.Op(p + "/lookup", "Gather", 1.0 * b * h, {b, h});
  g.EndGroup();
  int grad = g.Op(p + "/grad", "UnsortedSegmentSum", 1.0 * b * h, {b, h});
  g.Link(table, lookup, b * h);
  g.Link(lookup, grad, b);
  return {lookup, grad};
}

struct Grid {
  std::vector<std::vector<CellForward>> fwd;   // [layer][step]
  std::vector<std::vector<CellBackward>> bwd;  // [layer][step]
};

absl::StatusOr<ComputationGraph> Rnnlm(const GeneratorSpec& spec) {
  Builder g(spec);
  const int L = spec.layers, S = spec.steps;
  const int64_t b = spec.batch, h = spec.hidden, v = spec.vocab;
  const LstmDims d{b, h};

  int vemb = Variable(g, "embedding/table", {v, h});
  std::vector<int> w(L);
  for (int l = 0; l < L; ++l) {
    w[l] = Variable(g, absl::StrCat("lstm_", l, "/weights"), {2 * h, 4 * h});
  }
  int vsm = Variable(g, "softmax/weights", {h, v});

  std::vector<std::pair<int, int>> emb(S);
  for (int s = 0; s < S; ++s) {
    emb[s] = Embedding(g, absl::StrCat("embedding_", s), b, h, vemb);
  }
  Grid grid{std::vector<std::vector<CellForward>>(L, std::vector<CellForward>(S)),
            std::vector<std::vector<CellBackward>>(L, std::vector<CellBackward>(S))};
  for (int s = 0; s < S; ++s) {
    for (int l = 0; l < L; ++l) {
      int x = l == 0 ? emb[s].first : grid.fwd[l - 1][s].h;
      int hp = s == 0 ? -1 : grid.fwd[l][s - 1].h;
      int cp = s == 0 ? -1 : grid.fwd[l][s - 1].c;
      grid.fwd[l][s] =
          ForwardCell(g, absl::StrCat("cell_", l, "_", s), d, x, hp, cp, w[l]);
    }
  }
  std::vector<SoftmaxStep> sm(S);
  for (int s = 0; s < S; ++s) {
    sm[s] = Softmax(g, absl::StrCat("softmax_", s), b, h, v,
                    grid.fwd[L - 1][s].h, vsm);
  }
  for (int s = S - 1; s >= 0; --s) {
    for (int l = L - 1; l >= 0; --l) {
      std::vector<int> dh = {l == L - 1 ? sm[s].dh : grid.bwd[l + 1][s].dx};
      int dc = -1;
      if (s + 1 < S) {
        dh.push_back(grid.bwd[l][s + 1].dh_prev);
        dc = grid.bwd[l][s + 1].dc_prev;
      }
      grid.bwd[l][s] = BackwardCell(g, absl::StrCat("cell_", l, "_", s, "_grad"),
                                    d, grid.fwd[l][s], dh, dc, w[l]);
    }
  }
  for (int s = 0; s < S; ++s) g.Link(grid.bwd[0][s].dx, emb[s].second);

  int u_emb = Update(g, "embedding/update", vemb, {v, h});
  for (int s = 0; s < S; ++s) g.Link(emb[s].second, u_emb);
  for (int l = 0; l < L; ++l) {
    int u = Update(g, absl::StrCat("lstm_", l, "/update"), w[l], {2 * h, 4 * h});
    for (int s = 0; s < S; ++s) g.Link(grid.bwd[l][s].dw, u);
  }
  int u_sm = Update(g, "softmax/update", vsm, {h, v});
  for (int s = 0; s < S; ++s) g.Link(sm[s].dv, u_sm);
  return g.Finish();
}

absl::StatusOr<ComputationGraph> Nmt(const GeneratorSpec& spec) {
  Builder g(spec);
  const int L = spec.layers, Ss = spec.steps, St = spec.target_steps;
  const int64_t b = spec.batch, h = spec.hidden, v = spec.vocab;
  const LstmDims d{b, h};

  int vsrc = Variable(g, "encoder/embedding", {v, h});
  int vtgt = Variable(g, "decoder/embedding", {v, h});
  std::vector<int> we(L), wd(L);
  for (int l = 0; l < L; ++l) {
    we[l] = Variable(g, absl::StrCat("encoder/lstm_", l, "/weights"), {2 * h, 4 * h});
    wd[l] = Variable(g, absl::StrCat("decoder/lstm_", l, "/weights"), {2 * h, 4 * h});
  }
  int watt = Variable(g, "attention/weights", {2 * h, h});
  int vsm = Variable(g, "softmax/weights", {h, v});

  std::vector<std::pair<int, int>> esrc(Ss), etgt(St);
  for (int s = 0; s < Ss; ++s) {
    esrc[s] = Embedding(g, absl::StrCat("encoder/embedding_", s), b, h, vsrc);
  }
  for (int t = 0; t < St; ++t) {
    etgt[t] = Embedding(g, absl::StrCat("decoder/embedding_", t), b, h, vtgt);
  }

  using FwdGrid = std::vector<std::vector<CellForward>>;
  using BwdGrid = std::vector<std::vector<CellBackward>>;
  FwdGrid ef(L, std::vector<CellForward>(Ss)), df(L, std::vector<CellForward>(St));
  BwdGrid eb(L, std::vector<CellBackward>(Ss)), db(L, std::vector<CellBackward>(St));
  for (int s = 0; s < Ss; ++s) {
    for (int l = 0; l < L; ++l) {
      int x = l == 0 ? esrc[s].first : ef[l - 1][s].h;
      int hp = s == 0 ? -1 : ef[l][s - 1].h;
      int cp = s == 0 ? -1 : ef[l][s - 1].c;
      ef[l][s] = ForwardCell(g, absl::StrCat("encoder/cell_", l, "_", s), d, x,
                             hp, cp, we[l]);
    }
  }
  for (int t = 0; t < St; ++t) {
    for (int l = 0; l < L; ++l) {
      int x = l == 0 ? etgt[t].first : df[l - 1][t].h;
      int hp = t == 0 ? ef[l][Ss - 1].h : df[l][t - 1].h;
      int cp = t == 0 ? ef[l][Ss - 1].c : df[l][t - 1].c;
      df[l][t] = ForwardCell(g, absl::StrCat("decoder/cell_", l, "_", t), d, x,
                             hp, cp, wd[l]);
    }
  }

  struct Attention {
    int states, probs, combined, out;
  };
  std::vector<Attention> att(St);
  for (int t = 0; t < St; ++t) {
    const std::string p = absl::StrCat("attention_", t);
    const int64_t n = Ss;
    g.BeginGroup();
    Attention& a = att[t];
    a.states = g.Op(p + "/stack_states", "Pack", 1.0 * b * n * h, {b, n, h});
    int scores = g.Op(p + "/scores", "BatchMatMul", 2.0 * b * n * h + 2.0 * b * h * h, {b, n});
    a.probs = g.Op(p + "/softmax", "Softmax", 3.0 * b * n, {b, n});
    int ctx = g.Op(p + "/context", "BatchMatMul", 2.0 * b * n * h, {b, h});
    a.combined = g.Op(p + "/concat", "ConcatV2", 2.0 * b * h, {b, 2 * h});
    a.out = g.Op(p + "/projection", "MatMul", 2.0 * b * (2 * h) * h, {b, h});
    g.EndGroup();
    for (int s = 0; s < Ss; ++s) g.Link(ef[L - 1][s].h, a.states);
    g.Link(df[L - 1][t].h, scores);
    g.Link(watt, scores);
    g.Link(a.states, scores);
    g.Link(scores, a.probs);
    g.Link(a.probs, ctx);
    g.Link(a.states, ctx);
    g.Link(ctx, a.combined);
    g.Link(df[L - 1][t].h, a.combined);
    g.Link(a.combined, a.out);
    g.Link(watt, a.out);
  }

  std::vector<SoftmaxStep> sm(St);
  for (int t = 0; t < St; ++t) {
    sm[t] = Softmax(g, absl::StrCat("softmax_", t), b, h, v, att[t].out, vsm);
  }

  struct AttentionGrad {
    int d_states, d_dec, d_w;
  };
  std::vector<AttentionGrad> datt(St);
  for (int t = 0; t < St; ++t) {
    const std::string p = absl::StrCat("attention_", t, "_grad");
    const int64_t n = Ss;
    g.BeginGroup();
    int d_proj = g.Op(p + "/d_projection", "MatMul", 2.0 * b * (2 * h) * h, {b, 2 * h});
    int d_w = g.Op(p + "/d_weights", "MatMul", 2.0 * b * (2 * h) * h, {2 * h, h});
    int d_ctx = g.Op(p + "/d_context", "Split", 1.0 * b * h, {b, h});
    AttentionGrad& a = datt[t];
    a.d_dec = g.Op(p + "/d_decoder_state", "Split", 1.0 * b * h, {b, h});
    int d_scores = g.Op(p + "/d_scores", "SoftmaxGrad", 4.0 * b * n * h, {b, n});
    a.d_states = g.Op(p + "/d_states", "BatchMatMul", 4.0 * b * n * h, {b, n, h});
    a.d_w = g.Op(p + "/d_weights_out", "Identity", 2.0 * h * h, {2 * h, h});
    g.EndGroup();
    g.Link(sm[t].dh, d_proj);
    g.Link(watt, d_proj);
    g.Link(att[t].combined, d_w);
    g.Link(d_proj, d_w);
    g.Link(d_proj, d_ctx, b * h);
    g.Link(d_proj, a.d_dec, b * h);
    g.Link(d_ctx, d_scores);
    g.Link(att[t].probs, d_scores);
    g.Link(d_scores, a.d_states);
    g.Link(d_ctx, a.d_states);
    g.Link(d_w, a.d_w);
  }

  for (int t = St - 1; t >= 0; --t) {
    for (int l = L - 1; l >= 0; --l) {
      std::vector<int> dh = {l == L - 1 ? datt[t].d_dec : db[l + 1][t].dx};
      int dc = -1;
      if (t + 1 < St) {
        dh.push_back(db[l][t + 1].dh_prev);
        dc = db[l][t + 1].dc_prev;
      }
      db[l][t] = BackwardCell(g, absl::StrCat("decoder/cell_", l, "_", t, "_grad"),
                              d, df[l][t], dh, dc, wd[l]);
    }
  }
  for (int s = Ss - 1; s >= 0; --s) {
    for (int l = L - 1; l >= 0; --l) {
      std::vector<int> dh;
      if (l == L - 1) {
        for (int t = 0; t < St; ++t) dh.push_back(datt[t].d_states);
      } else {
        dh.push_back(eb[l + 1][s].dx);
      }
      int dc;
      if (s + 1 < Ss) {
        dh.push_back(eb[l][s + 1].dh_prev);
        dc = eb[l][s + 1].dc_prev;
      } else {
        dh.push_back(db[l][0].dh_prev);
        dc = db[l][0].dc_prev;
      }
      eb[l][s] = BackwardCell(g, absl::StrCat("encoder/cell_", l, "_", s, "_grad"),
                              d, ef[l][s], dh, dc, we[l]);
    }
  }
  for (int s = 0; s < Ss; ++s) g.Link(eb[0][s].dx, esrc[s].second);
  for (int t = 0; t < St; ++t) g.Link(db[0][t].dx, etgt[t].second);

  int u_src = Update(g, "encoder/embedding_update", vsrc, {v, h});
  for (int s = 0; s < Ss; ++s) g.Link(esrc[s].second, u_src);
  int u_tgt = Update(g, "decoder/embedding_update", vtgt, {v, h});
  for (int t = 0; t < St; ++t) g.Link(etgt[t].second, u_tgt);
  for (int l = 0; l < L; ++l) {
    int ue = Update(g, absl::StrCat("encoder/lstm_", l, "/update"), we[l], {2 * h, 4 * h});
    for (int s = 0; s < Ss; ++s) g.Link(eb[l][s].dw, ue);
    int ud = Update(g, absl::StrCat("decoder/lstm_", l, "/update"), wd[l], {2 * h, 4 * h});
    for (int t = 0; t < St; ++t) g.Link(db[l][t].dw, ud);
  }
  int u_att = Update(g, "attention/update", watt, {2 * h, h});
  for (int t = 0; t < St; ++t) g.Link(datt[t].d_w, u_att);
  int u_sm = Update(g, "softmax/update", vsm, {h, v});
  for (int t = 0; t < St; ++t) g.Link(sm[t].dv, u_sm);
  return g.Finish();
}

absl::StatusOr<ComputationGraph> Inception(const GeneratorSpec& spec) {
  Builder g(spec);
  const int K = spec.blocks, Br = spec.branches;
  const int64_t b = spec.batch, c = spec.hidden, s = spec.spatial;
  const Shape act = {b, s, s, c};
  const double pix = static_cast<double>(b * s * s);
  auto conv_flops = [&](int k) { return 2.0 * pix * c * c * k * k; };
  auto kernel = [](int depth) { return depth % 2 == 0 ? 1 : 3; };

  g.BeginGroup();
  int input = g.Op("stem/input", "Placeholder", 0.0, act);
  int stem_w = Variable(g, "stem/weights", {3, 3, c, c});
  int stem_conv = g.Op("stem/conv", "Conv2D", conv_flops(3), act);
  int stem_out = g.Op("stem/relu", "Relu", pix * c, act);
  g.EndGroup();
  g.Link(input, stem_conv);
  g.Link(stem_w, stem_conv);
  g.Link(stem_conv, stem_out);

  struct Branch {
    std::vector<int> weights, inputs, convs;
    int out = -1;
  };
  std::vector<std::vector<Branch>> br(K, std::vector<Branch>(Br));
  std::vector<int> concat(K);
  int x = stem_out;
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < Br; ++j) {
      const std::string p = absl::StrCat("block_", k, "/branch_", j);
      Branch& r = br[k][j];
      const int depth = 1 + j % 3;
      g.BeginGroup();
      int prev = x;
      for (int i = 0; i < depth; ++i) {
        const int kk = kernel(i);
        int wv = Variable(g, absl::StrCat(p, "/weights_", i), {kk, kk, c, c});
        int conv = g.Op(absl::StrCat(p, "/conv_", i), "Conv2D", conv_flops(kk), act);
        int relu = g.Op(absl::StrCat(p, "/relu_", i), "Relu", pix * c, act);
        g.Link(prev, conv);
        g.Link(wv, conv);
        g.Link(conv, relu);
        r.weights.push_back(wv);
        r.inputs.push_back(prev);
        r.convs.push_back(relu);
        prev = relu;
      }
      r.out = prev;
      g.EndGroup();
    }
    concat[k] = g.Op(absl::StrCat("block_", k, "/concat"), "ConcatV2",
                     pix * c * Br, {b, s, s, c * Br});
    for (int j = 0; j < Br; ++j) g.Link(br[k][j].out, concat[k]);
    // 1x1 mixing back to c channels happens inside the next consumers.
    x = concat[k];
  }

  g.BeginGroup();
  int pool = g.Op("head/pool", "AvgPool", pix * c * Br, {b, c * Br});
  int fc_w = Variable(g, "head/fc_weights", {c * Br, spec.vocab});
  int logits = g.Op("head/logits", "MatMul", 2.0 * b * c * Br * spec.vocab, {b, spec.vocab});
  int loss = g.Op("head/xent", "SoftmaxCrossEntropy", 5.0 * b * spec.vocab, {b, spec.vocab});
  int dpool = g.Op("head/d_pool", "MatMul", 2.0 * b * c * Br * spec.vocab, {b, c * Br});
  int fc_apply = g.Op("head/fc_update", "ApplyAdam", 10.0 * c * Br * spec.vocab,
                      {c * Br, spec.vocab});
  int dconcat_in = g.Op("head/d_features", "Tile", pix * c * Br, {b, s, s, c * Br});
  g.EndGroup();
  g.Link(x, pool);
  g.Link(pool, logits);
  g.Link(fc_w, logits);
  g.Link(logits, loss);
  g.Link(loss, dpool);
  g.Link(fc_w, dpool);
  g.Link(loss, fc_apply);
  g.Link(fc_w, fc_apply);
  g.Link(dpool, dconcat_in);

  int grad = dconcat_in;
  for (int k = K - 1; k >= 0; --k) {
    const std::string pk = absl::StrCat("block_", k);
    int split = g.Op(pk + "/d_concat", "Split", pix * c * Br, {b, s, s, c * Br});
    g.Link(grad, split);
    int update = g.Op(pk + "/update", "ApplyAdam", 0.0, {Br, 9 * c * c});
    int sum = g.Op(pk + "/d_input", "AddN", pix * c * Br, act);
    double update_flops = 0.0;
    for (int j = 0; j < Br; ++j) {
      const Branch& r = br[k][j];
      const std::string p = absl::StrCat(pk, "/branch_", j, "_grad");
      g.BeginGroup();
      int dprev = split;
      int64_t in_elems = b * s * s * c;
      for (int i = static_cast<int>(r.convs.size()) - 1; i >= 0; --i) {
        const int kk = kernel(i);
        int drelu = g.Op(absl::StrCat(p, "/relu_grad_", i), "ReluGrad", pix * c, act);
        int dfilter = g.Op(absl::StrCat(p, "/filter_grad_", i), "Conv2DBackpropFilter",
                           conv_flops(kk), {kk, kk, c, c});
        int dinput = g.Op(absl::StrCat(p, "/input_grad_", i), "Conv2DBackpropInput",
                          conv_flops(kk), act);
        g.Link(dprev, drelu, in_elems);
        g.Link(r.convs[i], drelu);
        g.Link(drelu, dfilter);
        g.Link(r.inputs[i], dfilter);
        g.Link(drelu, dinput);
        g.Link(r.weights[i], dinput);
        g.Link(dfilter, update);
        g.Link(r.weights[i], update);
        update_flops += 10.0 * kk * kk * c * c;
        dprev = dinput;
      }
      g.EndGroup();
      g.Link(dprev, sum);
    }
    g.SetFlops(update, update_flops);
    grad = sum;
  }
  int dstem = g.Op("stem/filter_grad", "Conv2DBackpropFilter", conv_flops(3), {3, 3, c, c});
  g.Link(grad, dstem);
  g.Link(input, dstem);
  int stem_update = Update(g, "stem/update", stem_w, {3, 3, c, c});
  g.Link(dstem, stem_update);
  return g.Finish();
}

}  // namespace

std::string_view GeneratorFamilyName(GeneratorFamily family) {
  switch (family) {
    case GeneratorFamily::kRnnlmGrid:
      return "rnnlm_grid";
    case GeneratorFamily::kNmtAttention:
      return "nmt_attention";
    case GeneratorFamily::kInceptionBlocks:
      return "inception_blocks";
  }
  return "unknown";
}

absl::StatusOr<GeneratorFamily> ParseGeneratorFamily(std::string_view name) {
  for (GeneratorFamily f : {GeneratorFamily::kRnnlmGrid, GeneratorFamily::kNmtAttention,
                            GeneratorFamily::kInceptionBlocks}) {
    if (name == GeneratorFamilyName(f)) return f;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown family '", std::string(name), "' (rnnlm_grid, nmt_attention, inception_blocks)"));
}

absl::Status ValidateGeneratorSpec(const GeneratorSpec& spec) {
  const std::pair<const char*, int> knobs[] = {
      {"layers", spec.layers}, {"steps", spec.steps},
      {"target_steps", spec.target_steps}, {"hidden", spec.hidden},
      {"batch", spec.batch}, {"vocab", spec.vocab},
      {"blocks", spec.blocks}, {"branches", spec.branches},
      {"spatial", spec.spatial}};
  for (const auto& [name, value] : knobs) {
    if (value < 1) {
      return absl::InvalidArgumentError(
          absl::StrCat(name, " must be >= 1, got ", value));
    }
  }
  if (spec.family == GeneratorFamily::kInceptionBlocks && spec.branches < 2) {
    return absl::InvalidArgumentError("inception blocks need >= 2 branches");
  }
  if (!(spec.cost_scale > 0.0) || !std::isfinite(spec.cost_scale) ||
      !(spec.byte_scale >= 0.0) || !std::isfinite(spec.byte_scale)) {
    return absl::InvalidArgumentError(
        "cost_scale must be positive and byte_scale non-negative");
  }
  return absl::OkStatus();
}

absl::StatusOr<ComputationGraph> Generate(const GeneratorSpec& spec) {
  RETURN_IF_ERROR(ValidateGeneratorSpec(spec));
  switch (spec.family) {
    case GeneratorFamily::kRnnlmGrid:
      return Rnnlm(spec);
    case GeneratorFamily::kNmtAttention:
      return Nmt(spec);
    case GeneratorFamily::kInceptionBlocks:
      return Inception(spec);
  }
  return absl::InvalidArgumentError("unknown family");
}

}  // namespace devplace
