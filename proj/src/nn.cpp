// nn.cpp

// Copyright 2026  LMLC Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include "lmlc/nn.h"

#include <cmath>

namespace lmlc {
namespace nn {

void ParamMap::Add(const std::string& name, ag::Var v) {
  Check(!has(name), ErrorKind::kState, "duplicate parameter name: ", name);
  items_.emplace_back(name, std::move(v));
}

ag::Var ParamMap::at(const std::string& name) const {
  for (const auto& [k, v] : items_)
    if (k == name) return v;
  Raise(ErrorKind::kState, "no parameter named: ", name);
}

bool ParamMap::has(const std::string& name) const {
  for (const auto& [k, v] : items_)
    if (k == name) return true;
  return false;
}

int64_t ParamMap::TotalNumel() const {
  int64_t n = 0;
  for (const auto& [k, v] : items_) n += v->value.numel();
  return n;
}

void ParamMap::ZeroGrads() const {
  for (const auto& [k, v] : items_) v->ZeroGrad();
}

void ParamMap::SetRequiresGrad(bool on) const {
  for (const auto& [k, v] : items_) {
    v->requires_grad = on;
    v->needs_grad = on;
  }
}

Tensor XavierUniform(int64_t fan_in, int64_t fan_out,
                     std::vector<int64_t> shape, Rng& rng) {
  double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t(std::move(shape));
  for (int64_t i = 0; i < t.numel(); ++i) t.at(i) = rng.Uniform(-limit, limit);
  return t;
}

Linear::Linear(int64_t in, int64_t out, Rng& rng) {
  w = ag::Leaf(XavierUniform(in, out, {in, out}, rng), true);
  b = ag::Leaf(Tensor::Zeros({out}), true);
}

ag::Var Linear::Forward(const ag::Var& x) const {
  return ag::AddRowvec(ag::Matmul(x, w), b);
}

void Linear::Params(ParamMap& pm, const std::string& prefix) const {
  pm.Add(prefix + ".w", w);
  pm.Add(prefix + ".b", b);
}

Conv1dLayer::Conv1dLayer(int64_t cin, int64_t cout, int64_t kernel_,
                         int64_t stride_, int64_t pad_, int64_t dilation_,
                         Rng& rng)
    : kernel(kernel_), stride(stride_), pad(pad_), dilation(dilation_) {
  w = ag::Leaf(XavierUniform(cin * kernel, cout, {cout, cin * kernel}, rng),
               true);
  b = ag::Leaf(Tensor::Zeros({cout}), true);
}

ag::Var Conv1dLayer::Forward(const ag::Var& x) const {
  return ag::Conv1d(x, w, b, kernel, stride, pad, dilation);
}

void Conv1dLayer::Params(ParamMap& pm, const std::string& prefix) const {
  pm.Add(prefix + ".w", w);
  pm.Add(prefix + ".b", b);
}

ConvT1dLayer::ConvT1dLayer(int64_t cin, int64_t cout, int64_t kernel_,
                           int64_t stride_, int64_t pad_, Rng& rng)
    : kernel(kernel_), stride(stride_), pad(pad_) {
  w = ag::Leaf(XavierUniform(cin * kernel, cout, {cin, cout * kernel}, rng),
               true);
  b = ag::Leaf(Tensor::Zeros({cout}), true);
}

ag::Var ConvT1dLayer::Forward(const ag::Var& x) const {
  return ag::ConvTranspose1d(x, w, b, kernel, stride, pad);
}

void ConvT1dLayer::Params(ParamMap& pm, const std::string& prefix) const {
  pm.Add(prefix + ".w", w);
  pm.Add(prefix + ".b", b);
}

LayerNormLayer::LayerNormLayer(int64_t dim) {
  gamma = ag::Leaf(Tensor::Full({dim}, 1.0), true);
  beta = ag::Leaf(Tensor::Zeros({dim}), true);
}

ag::Var LayerNormLayer::Forward(const ag::Var& x) const {
  return ag::LayerNorm(x, gamma, beta, eps);
}

void LayerNormLayer::Params(ParamMap& pm, const std::string& prefix) const {
  pm.Add(prefix + ".gamma", gamma);
  pm.Add(prefix + ".beta", beta);
}

MultiHeadAttention::MultiHeadAttention(int64_t dim_, int64_t heads_, Rng& rng)
    : wq(dim_, dim_, rng),
      wk(dim_, dim_, rng),
      wv(dim_, dim_, rng),
      wo(dim_, dim_, rng),
      heads(heads_),
      dim(dim_) {
  Check(dim_ % heads_ == 0, ErrorKind::kShape, "attention dim ", dim_,
        " not divisible by ", heads_, " heads");
}

ag::Var MultiHeadAttention::Forward(const ag::Var& q_in, const ag::Var& kv_in,
                                    bool causal) const {
  int64_t tq = q_in->value.rows();
  int64_t tk = kv_in->value.rows();
  int64_t dh = dim / heads;
  ag::Var q = wq.Forward(q_in);
  ag::Var k = wk.Forward(kv_in);
  ag::Var v = wv.Forward(kv_in);

  Tensor mask({tq, tk});
  if (causal) {
    Check(tq == tk, ErrorKind::kShape, "causal mask needs square attention");
    for (int64_t i = 0; i < tq; ++i)
      for (int64_t j = i + 1; j < tk; ++j) mask.at(i, j) = -1e9;
  }
  ag::Var mask_v = ag::Constant(mask);

  double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  std::vector<ag::Var> head_out;
  head_out.reserve(heads);
  for (int64_t h = 0; h < heads; ++h) {
    ag::Var qh = ag::SliceCols(q, h * dh, (h + 1) * dh);
    ag::Var kh = ag::SliceCols(k, h * dh, (h + 1) * dh);
    ag::Var vh = ag::SliceCols(v, h * dh, (h + 1) * dh);
    ag::Var scores =
        ag::MulScalar(ag::Matmul(qh, ag::Transpose(kh)), scale);
    if (causal) scores = ag::Add(scores, mask_v);
    ag::Var att = ag::SoftmaxRows(scores);
    head_out.push_back(ag::Matmul(att, vh));
  }
  return wo.Forward(ag::ConcatCols(head_out));
}

void MultiHeadAttention::Params(ParamMap& pm, const std::string& prefix) const {
  wq.Params(pm, prefix + ".wq");
  wk.Params(pm, prefix + ".wk");
  wv.Params(pm, prefix + ".wv");
  wo.Params(pm, prefix + ".wo");
}

TransformerEncoderLayer::TransformerEncoderLayer(int64_t dim, int64_t heads,
                                                 int64_t ff, Rng& rng)
    : ln1(dim),
      ln2(dim),
      attn(dim, heads, rng),
      ff1(dim, ff, rng),
      ff2(ff, dim, rng) {}

ag::Var TransformerEncoderLayer::Forward(const ag::Var& x) const {
  ag::Var n1 = ln1.Forward(x);
  ag::Var h = ag::Add(x, attn.Forward(n1, n1, false));
  ag::Var f = ff2.Forward(ag::Gelu(ff1.Forward(ln2.Forward(h))));
  return ag::Add(h, f);
}

void TransformerEncoderLayer::Params(ParamMap& pm,
                                     const std::string& prefix) const {
  ln1.Params(pm, prefix + ".ln1");
  ln2.Params(pm, prefix + ".ln2");
  attn.Params(pm, prefix + ".attn");
  ff1.Params(pm, prefix + ".ff1");
  ff2.Params(pm, prefix + ".ff2");
}

TransformerEncoder::TransformerEncoder(int64_t n_layers, int64_t dim,
                                       int64_t heads, int64_t ff, Rng& rng)
    : ln_out(dim) {
  for (int64_t i = 0; i < n_layers; ++i)
    layers.emplace_back(dim, heads, ff, rng);
}

ag::Var TransformerEncoder::Forward(const ag::Var& x) const {
  ag::Var h = x;
  for (const auto& layer : layers) h = layer.Forward(h);
  return ln_out.Forward(h);
}

void TransformerEncoder::Params(ParamMap& pm, const std::string& prefix) const {
  for (size_t i = 0; i < layers.size(); ++i)
    layers[i].Params(pm, prefix + ".layer" + std::to_string(i));
  ln_out.Params(pm, prefix + ".ln_out");
}

TransformerDecoderLayer::TransformerDecoderLayer(int64_t dim, int64_t heads,
                                                 int64_t ff, Rng& rng)
    : ln1(dim),
      ln2(dim),
      ln3(dim),
      self_attn(dim, heads, rng),
      cross_attn(dim, heads, rng),
      ff1(dim, ff, rng),
      ff2(ff, dim, rng) {}

ag::Var TransformerDecoderLayer::Forward(const ag::Var& x,
                                         const ag::Var& memory) const {
  ag::Var n1 = ln1.Forward(x);
  ag::Var h = ag::Add(x, self_attn.Forward(n1, n1, true));
  ag::Var h2 = ag::Add(h, cross_attn.Forward(ln2.Forward(h), memory, false));
  ag::Var f = ff2.Forward(ag::Gelu(ff1.Forward(ln3.Forward(h2))));
  return ag::Add(h2, f);
}

void TransformerDecoderLayer::Params(ParamMap& pm,
                                     const std::string& prefix) const {
  ln1.Params(pm, prefix + ".ln1");
  ln2.Params(pm, prefix + ".ln2");
  ln3.Params(pm, prefix + ".ln3");
  self_attn.Params(pm, prefix + ".self_attn");
  cross_attn.Params(pm, prefix + ".cross_attn");
  ff1.Params(pm, prefix + ".ff1");
  ff2.Params(pm, prefix + ".ff2");
}

Tensor SinusoidalPositions(int64_t t, int64_t dim) {
  Tensor p({t, dim});
  for (int64_t i = 0; i < t; ++i) {
    for (int64_t j = 0; j < dim; j += 2) {
      double freq = std::pow(10000.0, -static_cast<double>(j) / dim);
      p.at(i, j) = std::sin(i * freq);
      if (j + 1 < dim) p.at(i, j + 1) = std::cos(i * freq);
    }
  }
  return p;
}

}  // namespace nn
}  // namespace lmlc
