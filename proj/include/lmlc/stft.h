// stft.h

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

#ifndef LMLC_STFT_H_
#define LMLC_STFT_H_

#include "lmlc/autodiff.h"

namespace lmlc {
namespace stft {

struct MelConfig {
  int n_fft = 256;
  int hop = 64;
  int n_mels = 16;
  double sample_rate = 8000.0;
  double fmin = 0.0;
  double fmax = 0.0;  // 0 means sample_rate / 2
  double log_floor = 1e-5;
};

// Centered Hann-window power spectrogram built from graph ops so gradients
// reach the waveform: [frames, n_fft/2 + 1].  The DFT is a dense basis
// matmul; FFT speed is irrelevant at the frame sizes used here and a matmul
// keeps the whole pipeline differentiable.
ag::Var PowerSpectrogram(const ag::Var& wave, int n_fft, int hop);

// Triangular mel filterbank, [n_fft/2 + 1, n_mels].
Tensor MelFilterbank(const MelConfig& cfg);

// log(mel power + floor): [frames, n_mels].
ag::Var LogMel(const ag::Var& wave, const MelConfig& cfg);

// Convenience for non-graph callers.
Tensor LogMelTensor(const std::vector<double>& samples, const MelConfig& cfg);
Tensor PowerSpectrogramTensor(const std::vector<double>& samples, int n_fft,
                              int hop);

}  // namespace stft
}  // namespace lmlc

#endif  // LMLC_STFT_H_
