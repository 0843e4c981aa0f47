// synthetic.h

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

#ifndef LMLC_SYNTHETIC_H_
#define LMLC_SYNTHETIC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "lmlc/audio.h"
#include "lmlc/data.h"

namespace lmlc {
namespace synthetic {

// Tone-burst utterances where each word token is one fixed-frequency burst.
// Token ids 0 and 1 are reserved for the sequence markers, so word ids run
// from 2 to vocab()-1 and the spoken form of id t is "w<t>".
struct SineCorpusConfig {
  int sample_rate = 8000;
  int n_word_tokens = 14;
  double burst_s = 0.2;
  double amplitude = 0.3;
  int min_tokens = 6;
  int max_tokens = 8;
  int vocab() const { return n_word_tokens + 2; }
};

struct SynthUtterance {
  audio::Wave clip;
  std::vector<data::SubwordAlignment> alignments;
  std::string text;
  std::vector<int> tokens;
};

SynthUtterance MakeSineUtterance(const std::vector<int>& tokens,
                                 const SineCorpusConfig& cfg);

std::vector<SynthUtterance> MakeSineCorpus(uint64_t seed, int n,
                                           const SineCorpusConfig& cfg = {});

// Writes wav files, alignment tsv files and a manifest under dir, and returns
// the manifest rows. Utterance i gets id "utt<i>" and source text id
// "line<i>" (zero padded to four digits).
std::vector<data::Utterance> WriteSineCorpus(
    const std::string& dir, const std::vector<SynthUtterance>& corpus);

}  // namespace synthetic
}  // namespace lmlc

#endif  // LMLC_SYNTHETIC_H_
