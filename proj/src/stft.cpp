// stft.cpp

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

#include "lmlc/stft.h"

#include <cmath>

namespace lmlc {
namespace stft {

namespace {

Tensor HannWindow(int n) {
  Tensor w({n});
  for (int i = 0; i < n; ++i)
    w.at(i) = 0.5 * (1.0 - std::cos(2.0 * M_PI * i / n));
  return w;
}

// [n_fft, 2*bins]: cos basis in the left half, -sin in the right.
Tensor DftBasis(int n_fft) {
  int bins = n_fft / 2 + 1;
  Tensor basis({n_fft, 2 * bins});
  for (int t = 0; t < n_fft; ++t) {
    for (int k = 0; k < bins; ++k) {
      double ang = 2.0 * M_PI * t * k / n_fft;
      basis.at(t, k) = std::cos(ang);
      basis.at(t, bins + k) = -std::sin(ang);
    }
  }
  return basis;
}

double HzToMel(double f) { return 2595.0 * std::log10(1.0 + f / 700.0); }
double MelToHz(double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); }

}  // namespace

ag::Var PowerSpectrogram(const ag::Var& wave, int n_fft, int hop) {
  Check(n_fft >= 4 && hop >= 1, ErrorKind::kDomain, "bad stft config");
  int64_t n = wave->value.numel();
  Check(n > n_fft / 2, ErrorKind::kShape, "signal of ", n,
        " samples too short for n_fft ", n_fft);
  int bins = n_fft / 2 + 1;

  ag::Var padded = ag::ReflectPad(wave, n_fft / 2, n_fft / 2);
  ag::Var frames = ag::FrameRows(padded, n_fft, hop);
  int64_t t = frames->value.rows();

  Tensor hann = HannWindow(n_fft);
  Tensor tiled({t, static_cast<int64_t>(n_fft)});
  for (int64_t i = 0; i < t; ++i)
    std::copy(hann.data(), hann.data() + n_fft, tiled.row(i));
  ag::Var windowed = ag::Mul(frames, ag::Constant(std::move(tiled)));

  ag::Var spec = ag::Matmul(windowed, ag::Constant(DftBasis(n_fft)));
  ag::Var re = ag::SliceCols(spec, 0, bins);
  ag::Var im = ag::SliceCols(spec, bins, 2 * bins);
  return ag::Add(ag::Mul(re, re), ag::Mul(im, im));
}

Tensor MelFilterbank(const MelConfig& cfg) {
  int bins = cfg.n_fft / 2 + 1;
  double fmax = cfg.fmax > 0.0 ? cfg.fmax : cfg.sample_rate / 2.0;
  Check(fmax > cfg.fmin && cfg.n_mels >= 1, ErrorKind::kDomain,
        "bad mel config");
  double mel_lo = HzToMel(cfg.fmin), mel_hi = HzToMel(fmax);
  std::vector<double> centers(cfg.n_mels + 2);
  for (int i = 0; i < cfg.n_mels + 2; ++i)
    centers[i] = MelToHz(mel_lo + (mel_hi - mel_lo) * i / (cfg.n_mels + 1));

  Tensor fb({bins, static_cast<int64_t>(cfg.n_mels)});
  for (int k = 0; k < bins; ++k) {
    double f = static_cast<double>(k) * cfg.sample_rate / cfg.n_fft;
    for (int m = 0; m < cfg.n_mels; ++m) {
      double lo = centers[m], mid = centers[m + 1], hi = centers[m + 2];
      double v = 0.0;
      if (f > lo && f < hi)
        v = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
      fb.at(k, m) = v;
    }
  }
  return fb;
}

ag::Var LogMel(const ag::Var& wave, const MelConfig& cfg) {
  ag::Var power = PowerSpectrogram(wave, cfg.n_fft, cfg.hop);
  ag::Var mel = ag::Matmul(power, ag::Constant(MelFilterbank(cfg)));
  return ag::Log(ag::AddScalar(mel, cfg.log_floor));
}

Tensor LogMelTensor(const std::vector<double>& samples, const MelConfig& cfg) {
  ag::Var wave = ag::Constant(
      Tensor({static_cast<int64_t>(samples.size())}, samples));
  return LogMel(wave, cfg)->value;
}

Tensor PowerSpectrogramTensor(const std::vector<double>& samples, int n_fft,
                              int hop) {
  ag::Var wave = ag::Constant(
      Tensor({static_cast<int64_t>(samples.size())}, samples));
  return PowerSpectrogram(wave, n_fft, hop)->value;
}

}  // namespace stft
}  // namespace lmlc
