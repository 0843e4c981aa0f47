// resample.cpp

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

#include <cmath>
#include <numeric>

#include "lmlc/audio.h"

namespace lmlc {
namespace audio {

namespace {

double Sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  double px = M_PI * x;
  return std::sin(px) / px;
}

}  // namespace

Wave Resample(const Wave& w, int dst_rate) {
  Check(w.sample_rate > 0 && dst_rate > 0, ErrorKind::kDomain,
        "bad sample rate");
  Check(!w.samples.empty(), ErrorKind::kDomain, "empty audio");
  if (w.sample_rate == dst_rate) return w;

  int64_t g = std::gcd(w.sample_rate, dst_rate);
  int64_t l = dst_rate / g;   // upsample factor
  int64_t m = w.sample_rate / g;  // downsample factor
  int64_t n_in = static_cast<int64_t>(w.samples.size());
  int64_t n_out = (n_in * l + m - 1) / m;

  // Anti-alias cutoff in input-sample units; widen the kernel when
  // downsampling so the transition band stays proportional.
  double ratio = static_cast<double>(dst_rate) / w.sample_rate;
  double fc = 0.5 * std::min(1.0, ratio);
  double half_width = 32.0 / std::min(1.0, ratio);

  Wave out;
  out.sample_rate = dst_rate;
  out.samples.resize(n_out, 0.0);
  for (int64_t n = 0; n < n_out; ++n) {
    double center = static_cast<double>(n * m) / l;
    int64_t k0 = static_cast<int64_t>(std::ceil(center - half_width));
    int64_t k1 = static_cast<int64_t>(std::floor(center + half_width));
    if (k0 < 0) k0 = 0;
    if (k1 > n_in - 1) k1 = n_in - 1;
    double acc = 0.0;
    for (int64_t k = k0; k <= k1; ++k) {
      double t = center - k;
      double win = 0.5 * (1.0 + std::cos(M_PI * t / half_width));  // Hann
      acc += w.samples[k] * (2.0 * fc) * Sinc(2.0 * fc * t) * win;
    }
    out.samples[n] = acc;
  }
  return out;
}

}  // namespace audio
}  // namespace lmlc
