// loudness.cpp

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

#include "lmlc/audio.h"

namespace lmlc {
namespace audio {

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;
  void Apply(std::vector<double>& x) const {
    double z1 = 0.0, z2 = 0.0;
    for (double& s : x) {
      double in = s;
      double out = b0 * in + z1;
      z1 = b1 * in - a1 * out + z2;
      z2 = b2 * in - a2 * out;
      s = out;
    }
  }
};

// Analog-domain constants that reproduce the BS.1770 filter tables at 48 kHz
// and generalize the K-weighting curve to other sample rates.
constexpr double kShelfF0 = 1681.9744509555319;
constexpr double kShelfGainDb = 3.999843853973347;
constexpr double kShelfQ = 0.7071752369554193;
constexpr double kHighpassF0 = 38.13547087613982;
constexpr double kHighpassQ = 0.5003270373253953;

// Shelf prototype used by the K-weighting derivation; at 48 kHz this
// reproduces the published coefficient table to the last printed digit.
Biquad HighShelf(double fs) {
  double w0 = 2.0 * M_PI * kShelfF0 / fs;
  double k = std::tan(w0 / 2.0);
  double vh = std::pow(10.0, kShelfGainDb / 20.0);
  double vb = std::pow(vh, 0.4996667741545416);
  double q = kShelfQ;
  double a0 = 1.0 + k / q + k * k;
  return {(vh + vb * k / q + k * k) / a0, 2.0 * (k * k - vh) / a0,
          (vh - vb * k / q + k * k) / a0, 2.0 * (k * k - 1.0) / a0,
          (1.0 - k / q + k * k) / a0};
}

// The published table keeps the numerator at {1, -2, 1} unnormalized.
Biquad Highpass(double fs) {
  double w0 = 2.0 * M_PI * kHighpassF0 / fs;
  double k = std::tan(w0 / 2.0);
  double q = kHighpassQ;
  double den = 1.0 + k / q + k * k;
  return {1.0, -2.0, 1.0, 2.0 * (k * k - 1.0) / den,
          (1.0 - k / q + k * k) / den};
}

}  // namespace

double IntegratedLoudness(const Wave& w) {
  Check(w.sample_rate > 0, ErrorKind::kDomain, "bad sample rate");
  double fs = static_cast<double>(w.sample_rate);
  std::vector<double> z = w.samples;
  HighShelf(fs).Apply(z);
  Highpass(fs).Apply(z);

  int64_t block = static_cast<int64_t>(std::lround(0.400 * fs));
  int64_t step = static_cast<int64_t>(std::lround(0.100 * fs));
  int64_t n = static_cast<int64_t>(z.size());
  Check(n >= block, ErrorKind::kDomain,
        "audio shorter than one 400 ms gating block; loudness undefined");

  std::vector<double> block_ms;
  for (int64_t start = 0; start + block <= n; start += step) {
    double acc = 0.0;
    for (int64_t i = start; i < start + block; ++i) acc += z[i] * z[i];
    block_ms.push_back(acc / block);
  }

  auto block_lufs = [](double ms) { return -0.691 + 10.0 * std::log10(ms); };

  double abs_sum = 0.0;
  int64_t abs_count = 0;
  for (double ms : block_ms) {
    if (ms > 0.0 && block_lufs(ms) > -70.0) {
      abs_sum += ms;
      ++abs_count;
    }
  }
  Check(abs_count > 0, ErrorKind::kDomain,
        "no block above the absolute gate; loudness undefined");

  double rel_threshold = block_lufs(abs_sum / abs_count) - 10.0;
  double rel_sum = 0.0;
  int64_t rel_count = 0;
  for (double ms : block_ms) {
    if (ms > 0.0 && block_lufs(ms) > -70.0 && block_lufs(ms) > rel_threshold) {
      rel_sum += ms;
      ++rel_count;
    }
  }
  if (rel_count == 0) {
    rel_sum = abs_sum;
    rel_count = abs_count;
  }
  return block_lufs(rel_sum / rel_count);
}

Wave NormalizeLoudness(const Wave& w, double target_lufs) {
  Wave out = w;
  for (int pass = 0; pass < 2; ++pass) {
    double measured = IntegratedLoudness(out);
    double diff = target_lufs - measured;
    if (std::abs(diff) < 0.05) break;
    double gain = std::pow(10.0, diff / 20.0);
    for (double& s : out.samples) s *= gain;
  }
  return out;
}

}  // namespace audio
}  // namespace lmlc
