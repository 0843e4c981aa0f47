// pitch.cpp

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

#include "lmlc/pitch.h"

#include <cmath>

namespace lmlc {
namespace pitch {

std::vector<double> TrackPitch(const audio::Wave& w, const PitchConfig& cfg) {
  Check(!w.samples.empty() && w.sample_rate > 0, ErrorKind::kDomain,
        "empty audio");
  Check(cfg.fmin > 0.0 && cfg.fmax > cfg.fmin, ErrorKind::kDomain,
        "bad pitch band");
  double fs = static_cast<double>(w.sample_rate);
  int64_t n = static_cast<int64_t>(w.samples.size());
  int64_t win = static_cast<int64_t>(std::lround(cfg.window_s * fs));
  int64_t lag_min = static_cast<int64_t>(std::floor(fs / cfg.fmax));
  int64_t lag_max = static_cast<int64_t>(std::ceil(fs / cfg.fmin));
  if (lag_min < 1) lag_min = 1;
  if (win < 2 * lag_max) win = 2 * lag_max;

  int64_t frames = static_cast<int64_t>(
      std::floor(static_cast<double>(n) / fs * cfg.frame_rate));
  if (frames < 1) frames = 1;
  std::vector<double> f0(frames, 0.0);

  const double* x = w.samples.data();
  for (int64_t fidx = 0; fidx < frames; ++fidx) {
    int64_t center = static_cast<int64_t>(
        std::lround((fidx + 0.5) / cfg.frame_rate * fs));
    int64_t start = center - win / 2;
    if (start < 0) start = 0;
    if (start + win > n) start = n - win;
    if (start < 0) {
      // Clip shorter than one analysis window: leave unvoiced.
      continue;
    }

    double energy = 0.0;
    for (int64_t i = 0; i < win; ++i) energy += x[start + i] * x[start + i];
    double rms = std::sqrt(energy / win);
    if (rms < cfg.energy_threshold) continue;

    int64_t span = win - lag_max;
    if (span < lag_max) continue;
    double e0 = 0.0;
    for (int64_t i = 0; i < span; ++i) e0 += x[start + i] * x[start + i];
    std::vector<double> r(lag_max - lag_min + 1, -1.0);
    double best_r = 0.0;
    for (int64_t lag = lag_min; lag <= lag_max; ++lag) {
      double num = 0.0, e1 = 0.0;
      for (int64_t i = 0; i < span; ++i) {
        num += x[start + i] * x[start + i + lag];
        e1 += x[start + i + lag] * x[start + i + lag];
      }
      double denom = std::sqrt(e0 * e1);
      if (denom <= 0.0) continue;
      r[lag - lag_min] = num / denom;
      if (r[lag - lag_min] > best_r) best_r = r[lag - lag_min];
    }
    if (best_r <= cfg.voicing_threshold) continue;
    // Multiples of the true period score the same correlation, so take the
    // shortest lag that ties the maximum instead of the argmax itself.
    for (int64_t lag = lag_min; lag <= lag_max; ++lag) {
      if (r[lag - lag_min] >= 0.99 * best_r) {
        f0[fidx] = fs / static_cast<double>(lag);
        break;
      }
    }
  }
  return f0;
}

}  // namespace pitch
}  // namespace lmlc
