// lmlc/autodiff.h

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

#ifndef LMLC_AUTODIFF_H_
#define LMLC_AUTODIFF_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "lmlc/tensor.h"

namespace lmlc {
namespace ag {

// Reverse-mode tape over Tensor. Each op returns a Node holding the value and
// a closure that routes the node's cotangent into its inputs. Graphs are
// rebuilt per step (define-by-run); leaves with requires_grad=true accumulate
// into a persistent .grad until cleared by the optimizer.
class Node {
 public:
  Tensor value;
  Tensor grad;  // allocated lazily in backward; same shape as value
  bool requires_grad = false;
  bool needs_grad = false;  // true if this node or any ancestor requires grad
  uint64_t id = 0;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward_fn;

  Tensor& EnsureGrad();
  void ZeroGrad();
};

using Var = std::shared_ptr<Node>;

Var Constant(Tensor value);
Var Leaf(Tensor value, bool requires_grad = true);
Var ConstantScalar(double v);

// Runs reverse accumulation from a scalar root (numel 1), seeding d(root)=1.
void Backward(const Var& root);

// Arithmetic (same-shape elementwise unless noted).
Var Add(const Var& a, const Var& b);
Var Sub(const Var& a, const Var& b);
Var Mul(const Var& a, const Var& b);
Var Div(const Var& a, const Var& b);
Var AddScalar(const Var& a, double s);
Var MulScalar(const Var& a, double s);
Var Neg(const Var& a);

// Linear algebra.
Var Matmul(const Var& a, const Var& b);      // [m,k]x[k,n]
Var Transpose(const Var& a);                 // [m,n] -> [n,m]
Var AddRowvec(const Var& x, const Var& b);   // [m,n] + [n] per row

// Nonlinearities.
Var LeakyRelu(const Var& a, double slope);
Var Tanh(const Var& a);
Var Gelu(const Var& a);
Var Exp(const Var& a);
Var Log(const Var& a);   // caller guarantees positive input
Var Sqrt(const Var& a);

// Reductions.
Var SumAll(const Var& a);    // -> [1]
Var MeanAll(const Var& a);   // -> [1]
Var SumRows(const Var& a);   // [m,n] -> [m]
Var SumCols(const Var& a);   // [m,n] -> [n]

// Row-wise softmax family ([m,n]).
Var SoftmaxRows(const Var& a);
Var LogSoftmaxRows(const Var& a);
// y[i] = a[i, idx[i]]
Var PickPerRow(const Var& a, std::vector<int64_t> idx);

// Shape surgery.
Var SliceRows(const Var& a, int64_t r0, int64_t r1);
Var SliceCols(const Var& a, int64_t c0, int64_t c1);
Var ConcatRows(const std::vector<Var>& parts);
Var ConcatCols(const std::vector<Var>& parts);
Var Reshape(const Var& a, std::vector<int64_t> shape);
Var RepeatRows(const Var& a, int64_t factor);
Var AvgPoolRows(const Var& a, int64_t factor);
Var DownsampleRows(const Var& a, int64_t stride, int64_t offset);
Var Detach(const Var& a);

// Sequence / embedding.
Var Embedding(const Var& table, std::vector<int64_t> ids);  // [V,d] -> [m,d]
Var LayerNorm(const Var& x, const Var& gamma, const Var& beta, double eps);

// Scalar losses.
Var Mse(const Var& a, const Var& b);
Var L1(const Var& a, const Var& b);

// Audio framing on rank-1 signals.
Var ReflectPad(const Var& x, int64_t left, int64_t right);
Var FrameRows(const Var& x, int64_t window, int64_t hop);

// Convolutions over [T, C] sequences. Weight layouts:
//   Conv1d:          w [Cout, Cin*K]   (k fastest)
//   ConvTranspose1d: w [Cin, Cout*K]
Var Conv1d(const Var& x, const Var& w, const Var& b, int64_t kernel,
           int64_t stride, int64_t pad, int64_t dilation);
Var ConvTranspose1d(const Var& x, const Var& w, const Var& b, int64_t kernel,
                    int64_t stride, int64_t pad);

// Vector quantization surrogate: value is entries[idx[t], :] per frame, and
// the backward pass copies the cotangent straight onto the latents.
Var StraightThroughLookup(const Var& latents, const Tensor& entries,
                          const std::vector<int>& indices);

}  // namespace ag
}  // namespace lmlc

#endif  // LMLC_AUTODIFF_H_
