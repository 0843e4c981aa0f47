// vq.h

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

#ifndef LMLC_VQ_H_
#define LMLC_VQ_H_

#include <cstdint>
#include <string>
#include <vector>

#include "lmlc/autodiff.h"
#include "lmlc/checkpoint.h"
#include "lmlc/rng.h"
#include "lmlc/tensor.h"

namespace lmlc {
namespace vq {

// EMA-updated codebook.  ema_cluster starts at 1 and ema_sum at the entries
// themselves, which makes a decay-1 update an exact no-op.
struct Codebook {
  Tensor entries;      // [K, D]
  Tensor ema_cluster;  // [K]
  Tensor ema_sum;      // [K, D]
  double decay = 0.99;
  double eps = 1e-5;
  std::vector<int64_t> usage;  // counts from the most recent batch

  int64_t k() const { return entries.rows(); }
  int64_t dim() const { return entries.cols(); }
};

Codebook InitCodebook(int64_t k, int64_t d, Rng& rng);

// Nearest entry per latent row by squared distance, lowest index on ties.
std::vector<int> NearestIndices(const Codebook& cb, const Tensor& latents);

Tensor Lookup(const Codebook& cb, const std::vector<int>& indices);

struct QuantizeResult {
  std::vector<int> indices;
  ag::Var quantized;   // codewords forward, identity gradient to latents
  ag::Var commitment;  // mean squared gap between latents and codewords
};

QuantizeResult Quantize(const Codebook& cb, const ag::Var& latents);

std::vector<int64_t> CountUsage(const std::vector<int>& indices, int64_t k);

void EmaUpdate(Codebook& cb, const Tensor& latents,
               const std::vector<int>& indices, double gamma);

// Entries unused in the batch are replaced by randomly drawn batch latents
// plus gaussian noise; their EMA stats reset to cluster 1, sum = new entry.
void ReinitDeadCodes(Codebook& cb, const std::vector<int64_t>& usage,
                     const Tensor& latents, Rng& rng, double noise = 1e-4);

void PutCodebook(Checkpoint& c, const std::string& prefix, const Codebook& cb);
void GetCodebook(const Checkpoint& c, const std::string& prefix, Codebook& cb);
uint64_t HashCodebook(const Codebook& cb);

}  // namespace vq
}  // namespace lmlc

#endif  // LMLC_VQ_H_
