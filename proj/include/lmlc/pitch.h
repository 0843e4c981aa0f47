// pitch.h

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

#ifndef LMLC_PITCH_H_
#define LMLC_PITCH_H_

#include <vector>

#include "lmlc/audio.h"

namespace lmlc {
namespace pitch {

struct PitchConfig {
  double frame_rate = 50.0;
  double fmin = 60.0;
  double fmax = 400.0;
  double window_s = 0.040;
  double voicing_threshold = 0.5;  // normalized autocorrelation peak
  double energy_threshold = 1e-4;  // frame rms below this is unvoiced
};

// Per-frame fundamental frequency via normalized autocorrelation peak
// picking; unvoiced frames report 0.
std::vector<double> TrackPitch(const audio::Wave& w, const PitchConfig& cfg);

}  // namespace pitch
}  // namespace lmlc

#endif  // LMLC_PITCH_H_
