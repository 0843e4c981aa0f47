// audio.h

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

#ifndef LMLC_AUDIO_H_
#define LMLC_AUDIO_H_

#include <string>
#include <vector>

#include "lmlc/common.h"

namespace lmlc {
namespace audio {

struct Wave {
  std::vector<double> samples;
  int sample_rate = 0;
  double duration_s() const {
    return static_cast<double>(samples.size()) / sample_rate;
  }
};

// 16-bit PCM WAV; multichannel input is downmixed to mono by averaging.
Wave ReadWav(const std::string& path);

// Mono 16-bit PCM.  Rejects samples outside [-1, 1].
void WriteWav(const std::string& path, const Wave& w);

// Windowed-sinc rational resampler.  Same-rate input passes through
// bit-identically.
Wave Resample(const Wave& w, int dst_rate);

// Read + downmix + resample; rejects empty audio and out-of-range samples.
Wave LoadAudio(const std::string& path, int target_rate);

// Integrated loudness per ITU-R BS.1770 (K-weighting, 400 ms blocks with 75%
// overlap, -70 LUFS absolute gate, -10 LU relative gate).  Raises on input
// with no block above the absolute gate (loudness undefined).
double IntegratedLoudness(const Wave& w);

// Scales the signal so integrated loudness lands within +-0.2 LU of target.
// Gating makes a single gain pass inexact, so a second pass runs when needed.
Wave NormalizeLoudness(const Wave& w, double target_lufs);

}  // namespace audio
}  // namespace lmlc

#endif  // LMLC_AUDIO_H_
