// losses.h

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

#ifndef LMLC_LOSSES_H_
#define LMLC_LOSSES_H_

#include <cstdint>
#include <utility>
#include <vector>

#include "lmlc/autodiff.h"
#include "lmlc/codec.h"
#include "lmlc/data.h"
#include "lmlc/frontend.h"
#include "lmlc/stft.h"

namespace lmlc {
namespace losses {

// Half-open frame runs [floor(start*rate), ceil(end*rate)) per alignment,
// clipped to t_frames.  A run that rounds empty becomes its nearest single
// frame; overrunning the audio by more than one frame is an error.
std::vector<std::pair<int64_t, int64_t>> SegmentRuns(
    const std::vector<data::SubwordAlignment>& alignments, double rate,
    int64_t t_frames);

// Timed-text regularizer: rows of sbar and text are the per-subword vectors.
//   (1/N) sum_i (1 - cos(sbar_i, text_i))
// + (2/(N(N+1))) sum_{i<=j} (sbar_i.sbar_j - text_i.text_j)^2
// The pairwise sum includes the diagonal.  Zero-norm rows are an error.
ag::Var TtrLoss(const ag::Var& sbar, const ag::Var& text);

// Teacher-forced subword cross entropy, averaged over the real target
// tokens.  Targets come from transcribing the clean signal and are constant.
ag::Var AsrLoss(const frontend::AsrAdapter& asr, const ag::Var& wave,
                const frontend::TokenSequence& targets,
                int max_positions = 448);

// Semantic distillation: plain MSE between feature sequences.
ag::Var SdLoss(const ag::Var& features_in, const ag::Var& features_out);

// Least-squares GAN losses over every discriminator in the bank.
ag::Var DiscriminatorLoss(const codec::DiscOutput& real,
                          const codec::DiscOutput& fake);

struct GenLosses {
  ag::Var mel_l1;
  ag::Var adv;
  ag::Var fm;
};

// real/fake are waveforms as [T, 1] graph nodes of equal length.
GenLosses GeneratorLosses(const ag::Var& real_wave, const ag::Var& fake_wave,
                          const codec::DiscriminatorBank& disc,
                          const stft::MelConfig& mel);

// Crops both waveforms to the shorter; a gap wider than max_gap samples is
// treated as a pipeline bug rather than edge trimming.
std::pair<ag::Var, ag::Var> CropToMin(const ag::Var& a, const ag::Var& b,
                                      int64_t max_gap);

}  // namespace losses
}  // namespace lmlc

#endif  // LMLC_LOSSES_H_
