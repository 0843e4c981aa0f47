// trainer.h

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

#ifndef LMLC_TRAINER_H_
#define LMLC_TRAINER_H_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lmlc/codec.h"
#include "lmlc/data.h"
#include "lmlc/frontend.h"
#include "lmlc/ttr.h"

namespace lmlc {
namespace trainer {

enum class Variant { kNone, kAsr, kTtr, kSd };

const char* VariantName(Variant v);
Variant ParseVariant(const std::string& name);

enum class ModState { kTrainable, kFrozen, kIdle };

struct StagePlan {
  int stage = 0;
  Variant variant = Variant::kNone;
  std::map<codec::Module, ModState> states;

  ModState state(codec::Module m) const;
  std::vector<codec::Module> Trainable() const;
  std::vector<codec::Module> Frozen() const;
};

// The freeze schedule.  Stage 3 requires a variant; stages 1 and 2 reject
// one.
StagePlan MakeStagePlan(int stage, Variant variant);

struct LossWeights {
  double mel_l1 = 45.0;
  double adversarial = 1.0;
  double feature_matching = 2.0;
  double commitment = 0.25;
  double lm = 1.0;  // ASR / TTR / distillation term
};

struct TrainConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.8;
  double beta2 = 0.99;
  double weight_decay = 0.01;
  double lr_decay = 0.999;  // per epoch (one pass over the segment list)
  int64_t max_steps = 300;
  int64_t validate_every = 1000;
  int64_t patience = 100000;
  int64_t crop_frames = 40;  // at the feature rate, multiple of 4
  int asr_max_tokens = 12;
  uint64_t seed = 1;
  LossWeights weights;
  std::string checkpoint_dir;     // empty: keep checkpoints in memory only
  int64_t checkpoint_every = 0;   // 0: only best + final
};

double LrAt(int64_t epoch, double base, double decay);

struct EarlyStop {
  double best_metric = 0.0;
  int64_t best_step = 0;
  int64_t patience = 100000;
  bool has_best = false;

  void Observe(int64_t step, double metric);
  bool ShouldStop(int64_t step) const;
};

// One training example: a cropped window of a segment with per-window
// features, pitch and re-timed alignments.
struct Batch {
  audio::Wave crop;
  Tensor features;     // [T, D]
  Tensor pitch_input;  // [T, 2]
  std::vector<data::SubwordAlignment> aligns;
};

Batch MakeBatch(const data::TrainingSegment& seg, int64_t crop_frames,
                int64_t offset_frames, const frontend::Providers& prov,
                const codec::CodecProfile& profile);

// Random crop offset, multiple of four feature frames.
int64_t RandomCropOffset(const data::TrainingSegment& seg,
                         int64_t crop_frames,
                         const codec::CodecProfile& profile, Rng& rng);

struct StepBreakdown {
  double total = 0.0;
  std::map<std::string, double> terms;
};

struct LogEntry {
  int64_t step = 0;
  double lr = 0.0;
  double total = 0.0;
  std::map<std::string, double> terms;
  bool has_val = false;
  double val = 0.0;
};

struct TrainResult {
  Checkpoint best;
  double best_metric = 0.0;
  int64_t best_step = 0;
  int64_t stopped_step = 0;
  std::vector<LogEntry> log;
};

void WriteLogJsonl(const std::string& path, const std::vector<LogEntry>& log);

// Runs one stage to max_steps or early stop.  `stack` must be the pretrained
// regularizer for the TTR variant and may be null otherwise.  `resume`
// restores params, optimizer moments, step counter and rng state.
TrainResult RunStage(const StagePlan& plan, codec::Codec& model,
                     const std::vector<data::TrainingSegment>& train,
                     const std::vector<data::TrainingSegment>& val,
                     const frontend::Providers& prov,
                     const ttr::TtrStack* stack, const TrainConfig& cfg,
                     const Checkpoint* resume = nullptr);

}  // namespace trainer
}  // namespace lmlc

#endif  // LMLC_TRAINER_H_
