// nn.h

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

#ifndef LMLC_NN_H_
#define LMLC_NN_H_

#include <string>
#include <utility>
#include <vector>

#include "lmlc/autodiff.h"
#include "lmlc/rng.h"

namespace lmlc {
namespace nn {

// Ordered name -> parameter map.  Order is registration order so that
// optimizers and checkpoints see a stable parameter sequence.
class ParamMap {
 public:
  void Add(const std::string& name, ag::Var v);
  ag::Var at(const std::string& name) const;
  bool has(const std::string& name) const;
  const std::vector<std::pair<std::string, ag::Var>>& items() const {
    return items_;
  }
  size_t size() const { return items_.size(); }
  int64_t TotalNumel() const;
  void ZeroGrads() const;
  void SetRequiresGrad(bool on) const;

 private:
  std::vector<std::pair<std::string, ag::Var>> items_;
};

Tensor XavierUniform(int64_t fan_in, int64_t fan_out,
                     std::vector<int64_t> shape, Rng& rng);

struct Linear {
  ag::Var w;  // [in, out]
  ag::Var b;  // [out]
  Linear() = default;
  Linear(int64_t in, int64_t out, Rng& rng);
  ag::Var Forward(const ag::Var& x) const;  // [T, in] -> [T, out]
  void Params(ParamMap& pm, const std::string& prefix) const;
};

struct Conv1dLayer {
  ag::Var w;  // [cout, cin*k]
  ag::Var b;  // [cout]
  int64_t kernel = 1, stride = 1, pad = 0, dilation = 1;
  Conv1dLayer() = default;
  Conv1dLayer(int64_t cin, int64_t cout, int64_t kernel, int64_t stride,
              int64_t pad, int64_t dilation, Rng& rng);
  ag::Var Forward(const ag::Var& x) const;  // [T, cin] -> [To, cout]
  void Params(ParamMap& pm, const std::string& prefix) const;
};

struct ConvT1dLayer {
  ag::Var w;  // [cin, cout*k]
  ag::Var b;  // [cout]
  int64_t kernel = 1, stride = 1, pad = 0;
  ConvT1dLayer() = default;
  ConvT1dLayer(int64_t cin, int64_t cout, int64_t kernel, int64_t stride,
               int64_t pad, Rng& rng);
  ag::Var Forward(const ag::Var& x) const;
  void Params(ParamMap& pm, const std::string& prefix) const;
};

struct LayerNormLayer {
  ag::Var gamma, beta;
  double eps = 1e-5;
  LayerNormLayer() = default;
  explicit LayerNormLayer(int64_t dim);
  ag::Var Forward(const ag::Var& x) const;
  void Params(ParamMap& pm, const std::string& prefix) const;
};

// Multi-head attention over row-major [T, d] sequences.  When kv differs
// from q it acts as cross attention; `causal` masks future kv positions
// (only meaningful when q and kv share a time axis).
struct MultiHeadAttention {
  Linear wq, wk, wv, wo;
  int64_t heads = 1;
  int64_t dim = 0;
  MultiHeadAttention() = default;
  MultiHeadAttention(int64_t dim, int64_t heads, Rng& rng);
  ag::Var Forward(const ag::Var& q, const ag::Var& kv, bool causal) const;
  void Params(ParamMap& pm, const std::string& prefix) const;
};

// Pre-norm transformer encoder layer: x += attn(ln1(x)); x += ffn(ln2(x)).
struct TransformerEncoderLayer {
  LayerNormLayer ln1, ln2;
  MultiHeadAttention attn;
  Linear ff1, ff2;
  TransformerEncoderLayer() = default;
  TransformerEncoderLayer(int64_t dim, int64_t heads, int64_t ff, Rng& rng);
  ag::Var Forward(const ag::Var& x) const;
  void Params(ParamMap& pm, const std::string& prefix) const;
};

struct TransformerEncoder {
  std::vector<TransformerEncoderLayer> layers;
  LayerNormLayer ln_out;
  TransformerEncoder() = default;
  TransformerEncoder(int64_t n_layers, int64_t dim, int64_t heads, int64_t ff,
                     Rng& rng);
  ag::Var Forward(const ag::Var& x) const;
  void Params(ParamMap& pm, const std::string& prefix) const;
};

// Pre-norm decoder layer with causal self attention plus cross attention.
struct TransformerDecoderLayer {
  LayerNormLayer ln1, ln2, ln3;
  MultiHeadAttention self_attn, cross_attn;
  Linear ff1, ff2;
  TransformerDecoderLayer() = default;
  TransformerDecoderLayer(int64_t dim, int64_t heads, int64_t ff, Rng& rng);
  ag::Var Forward(const ag::Var& x, const ag::Var& memory) const;
  void Params(ParamMap& pm, const std::string& prefix) const;
};

// Fixed sine/cosine position code, [t, dim].
Tensor SinusoidalPositions(int64_t t, int64_t dim);

}  // namespace nn
}  // namespace lmlc

#endif  // LMLC_NN_H_
