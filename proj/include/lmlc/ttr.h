// ttr.h

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

#ifndef LMLC_TTR_H_
#define LMLC_TTR_H_

#include <cstdint>
#include <string>
#include <vector>

#include "lmlc/audio.h"
#include "lmlc/checkpoint.h"
#include "lmlc/data.h"
#include "lmlc/frontend.h"
#include "lmlc/losses.h"
#include "lmlc/nn.h"

namespace lmlc {
namespace ttr {

// Pools a variable-length segment into one vector: a learned query row is
// prepended, the encoder attends over it, and its output row is the summary.
struct SummarizerModel {
  ag::Var query;
  nn::TransformerEncoder enc;
  int64_t dim = 0;
  SummarizerModel() = default;
  SummarizerModel(int64_t dim, int64_t heads, int64_t ff, int64_t layers,
                  Rng& rng);
  ag::Var Forward(const ag::Var& segment) const;  // [m, d] -> [1, d]
  void Params(nn::ParamMap& pm, const std::string& prefix) const;
};

// Length-preserving self attention over the summary sequence.
struct AggregatorModel {
  nn::TransformerEncoder enc;
  int64_t dim = 0;
  AggregatorModel() = default;
  AggregatorModel(int64_t dim, int64_t heads, int64_t ff, int64_t layers,
                  Rng& rng);
  ag::Var Forward(const ag::Var& s) const;  // [N, d] -> [N, d]
  void Params(nn::ParamMap& pm, const std::string& prefix) const;
};

struct TtrStack {
  SummarizerModel sum;
  AggregatorModel agg;
  TtrStack() = default;
  TtrStack(int64_t dim, int64_t heads, int64_t ff, int64_t layers,
           uint64_t seed);
  nn::ParamMap Params() const;
};

// Timed-text regularizer on an audio signal: speech-LM features segmented by
// the clean signal's alignments, summarized, aggregated, and scored against
// the text-LM embeddings of the aligned subwords.  The wave may be a decoded
// signal; gradients flow only into it.
ag::Var CodecLoss(const ag::Var& wave,
                  const std::vector<data::SubwordAlignment>& alignments,
                  const TtrStack& stack, const frontend::Providers& prov);

struct TtrPretrainConfig {
  int64_t dim = 16;
  int64_t heads = 4;
  int64_t ff = 32;
  int64_t layers = 2;
  double learning_rate = 1e-4;
  double beta1 = 0.8;
  double beta2 = 0.99;
  double lr_decay = 0.999;  // applied once per epoch
  double clip_norm = 1.0;
  int64_t max_steps = 2000;
  int64_t validate_every = 1000;
  uint64_t seed = 1;
};

struct PretrainItem {
  audio::Wave clip;
  std::vector<data::SubwordAlignment> alignments;
};

struct PretrainResult {
  Checkpoint best;
  double best_val = 0.0;
  int64_t best_step = 0;
  std::vector<double> val_history;
};

// Minimizes the regularizer on clean speech, training only the stack.
// max_steps 0 returns the initialization checkpoint.
PretrainResult PretrainTtr(const std::vector<PretrainItem>& train,
                           const std::vector<PretrainItem>& val,
                           const TtrPretrainConfig& cfg,
                           const frontend::Providers& prov);

double ValidateTtr(const TtrStack& stack,
                   const std::vector<PretrainItem>& items,
                   const frontend::Providers& prov);

void SaveStack(Checkpoint& c, const TtrStack& stack);
void LoadStack(const Checkpoint& c, TtrStack& stack);

}  // namespace ttr
}  // namespace lmlc

#endif  // LMLC_TTR_H_
