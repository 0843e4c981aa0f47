// spectrogram_compare.h

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

#ifndef LMLC_SPECTROGRAM_COMPARE_H_
#define LMLC_SPECTROGRAM_COMPARE_H_

#include <string>

#include "lmlc/audio.h"
#include "lmlc/tensor.h"

namespace lmlc {
namespace spect {

// Log-power magnitude in dB: [frames, n_fft/2 + 1].
Tensor LogPowerDb(const audio::Wave& w, int n_fft, int hop);

struct CompareConfig {
  int n_fft = 512;
  int hop = 128;
  int panel_height = 160;   // pixels per spectrogram panel
  int max_panel_width = 1200;
  double dyn_range_db = 80.0;  // color scale reaches this far below the peak
};

struct CompareResult {
  Tensor top;     // input clip, cropped to the shared time span
  Tensor bottom;  // decoded clip, same crop
  std::string path;
};

// Writes a two-panel image: the input on top, the decoded clip below, with
// one color scale and time (seconds) / frequency (Hz) axes shared by both.
CompareResult SpectrogramCompare(const audio::Wave& x,
                                 const audio::Wave& x_hat,
                                 const std::string& out_path,
                                 const CompareConfig& cfg = {});

}  // namespace spect
}  // namespace lmlc

#endif  // LMLC_SPECTROGRAM_COMPARE_H_
