// spectrogram_compare.cpp

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

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lmlc/png_io.h"
#include "lmlc/spectrogram_compare.h"
#include "lmlc/stft.h"

namespace lmlc {
namespace spect {

Tensor LogPowerDb(const audio::Wave& w, int n_fft, int hop) {
  Check(!w.samples.empty(), ErrorKind::kDomain, "zero-length clip");
  Check(static_cast<int64_t>(w.samples.size()) > n_fft / 2,
        ErrorKind::kDomain, "clip shorter than one analysis frame");
  Tensor p = stft::PowerSpectrogramTensor(w.samples, n_fft, hop);
  Tensor out(p.shape());
  for (int64_t i = 0; i < p.numel(); ++i)
    out.at(i) = 10.0 * std::log10(p.at(i) + 1e-10);
  return out;
}

namespace {

// 5x7 glyphs for axis labels; each row is 5 bits, msb left.
struct Glyph {
  char ch;
  uint8_t rows[7];
};

const Glyph kFont[] = {
    {'0', {0x0e, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0e}},
    {'1', {0x04, 0x0c, 0x04, 0x04, 0x04, 0x04, 0x0e}},
    {'2', {0x0e, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1f}},
    {'3', {0x1f, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0e}},
    {'4', {0x02, 0x06, 0x0a, 0x12, 0x1f, 0x02, 0x02}},
    {'5', {0x1f, 0x10, 0x1e, 0x01, 0x01, 0x11, 0x0e}},
    {'6', {0x06, 0x08, 0x10, 0x1e, 0x11, 0x11, 0x0e}},
    {'7', {0x1f, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0e, 0x11, 0x11, 0x0e, 0x11, 0x11, 0x0e}},
    {'9', {0x0e, 0x11, 0x11, 0x0f, 0x01, 0x02, 0x0c}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0c, 0x0c}},
    {'-', {0x00, 0x00, 0x00, 0x1f, 0x00, 0x00, 0x00}},
    {'s', {0x00, 0x00, 0x0f, 0x10, 0x0e, 0x01, 0x1e}},
    {'k', {0x10, 0x10, 0x12, 0x14, 0x18, 0x14, 0x12}},
    {'h', {0x10, 0x10, 0x16, 0x19, 0x11, 0x11, 0x11}},
    {'z', {0x00, 0x00, 0x1f, 0x02, 0x04, 0x08, 0x1f}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
};

const Glyph* FindGlyph(char c) {
  for (const Glyph& g : kFont)
    if (g.ch == c) return &g;
  return nullptr;
}

void DrawText(png::Image& img, int x, int y, const std::string& text,
              uint8_t r, uint8_t g, uint8_t b) {
  int cx = x;
  for (char c : text) {
    if (const Glyph* gl = FindGlyph(c)) {
      for (int ry = 0; ry < 7; ++ry)
        for (int rx = 0; rx < 5; ++rx)
          if (gl->rows[ry] & (1 << (4 - rx))) img.Set(cx + rx, y + ry, r, g, b);
    }
    cx += 6;
  }
}

int TextWidth(const std::string& text) {
  return static_cast<int>(text.size()) * 6 - 1;
}

// Dark-to-bright heat map with a handful of anchor colors.
void HeatColor(double v, uint8_t* rgb) {
  v = std::clamp(v, 0.0, 1.0);
  static const double anchors[][3] = {
      {0.0, 0.0, 0.05}, {0.2, 0.05, 0.35}, {0.6, 0.15, 0.4},
      {0.9, 0.45, 0.2}, {1.0, 0.8, 0.2},   {1.0, 1.0, 0.85},
  };
  const int n = 6;
  double t = v * (n - 1);
  int lo = std::min(static_cast<int>(t), n - 2);
  double f = t - lo;
  for (int c = 0; c < 3; ++c) {
    double x = anchors[lo][c] * (1.0 - f) + anchors[lo + 1][c] * f;
    rgb[c] = static_cast<uint8_t>(std::lround(255.0 * x));
  }
}

std::string FormatSeconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1fs", s);
  return buf;
}

std::string FormatHz(double hz) {
  char buf[32];
  if (hz >= 1000.0) {
    double k = hz / 1000.0;
    if (std::abs(k - std::round(k)) < 1e-9) {
      std::snprintf(buf, sizeof buf, "%.0fkhz", k);
    } else {
      std::snprintf(buf, sizeof buf, "%.1fkhz", k);
    }
  } else {
    std::snprintf(buf, sizeof buf, "%.0fhz", hz);
  }
  return buf;
}

void DrawPanel(png::Image& img, const Tensor& mat, int x0, int y0, int w,
               int h, double vmin, double vmax) {
  int64_t frames = mat.rows(), bins = mat.cols();
  double scale = vmax > vmin ? 1.0 / (vmax - vmin) : 0.0;
  for (int y = 0; y < h; ++y) {
    // row 0 of the matrix is the lowest frequency; draw it at the bottom
    int64_t bin = (bins - 1) * static_cast<int64_t>(h - 1 - y) /
                  std::max(h - 1, 1);
    for (int x = 0; x < w; ++x) {
      int64_t fr = frames > 1
                       ? (frames - 1) * static_cast<int64_t>(x) /
                             std::max(w - 1, 1)
                       : 0;
      double v = (mat.row(fr)[bin] - vmin) * scale;
      uint8_t rgb[3];
      HeatColor(v, rgb);
      img.Set(x0 + x, y0 + y, rgb[0], rgb[1], rgb[2]);
    }
  }
}

}  // namespace

CompareResult SpectrogramCompare(const audio::Wave& x,
                                 const audio::Wave& x_hat,
                                 const std::string& out_path,
                                 const CompareConfig& cfg) {
  Check(!x.samples.empty() && !x_hat.samples.empty(), ErrorKind::kDomain,
        "zero-length clip");
  Check(x.sample_rate == x_hat.sample_rate, ErrorKind::kDomain,
        "sample rates differ: ", x.sample_rate, " vs ", x_hat.sample_rate);

  CompareResult res;
  res.top = LogPowerDb(x, cfg.n_fft, cfg.hop);
  res.bottom = LogPowerDb(x_hat, cfg.n_fft, cfg.hop);
  int64_t frames = std::min(res.top.rows(), res.bottom.rows());
  auto crop = [&](const Tensor& t) {
    Tensor out({frames, t.cols()});
    for (int64_t i = 0; i < frames; ++i)
      std::copy(t.row(i), t.row(i) + t.cols(), out.row(i));
    return out;
  };
  res.top = crop(res.top);
  res.bottom = crop(res.bottom);

  double vmax = res.top.at(0);
  for (int64_t i = 0; i < res.top.numel(); ++i)
    vmax = std::max(vmax, res.top.at(i));
  for (int64_t i = 0; i < res.bottom.numel(); ++i)
    vmax = std::max(vmax, res.bottom.at(i));
  double vmin = vmax - cfg.dyn_range_db;

  int panel_w = static_cast<int>(
      std::min<int64_t>(std::max<int64_t>(frames, 8), cfg.max_panel_width));
  int panel_h = cfg.panel_height;
  int margin_l = 52, margin_b = 14, gap = 6, margin_t = 4, margin_r = 8;
  int width = margin_l + panel_w + margin_r;
  int height = margin_t + 2 * (panel_h + margin_b) + gap;
  png::Image img(width, height);
  std::fill(img.rgb.begin(), img.rgb.end(), 255);

  double dur = static_cast<double>(frames) * cfg.hop / x.sample_rate;
  double fmax = 0.5 * x.sample_rate;
  const Tensor* mats[2] = {&res.top, &res.bottom};
  for (int p = 0; p < 2; ++p) {
    int y0 = margin_t + p * (panel_h + margin_b + gap);
    DrawPanel(img, *mats[p], margin_l, y0, panel_w, panel_h, vmin, vmax);
    // frequency ticks at 0, 1/2 and full nyquist
    for (int tick = 0; tick <= 2; ++tick) {
      double frac = tick / 2.0;
      int y = y0 + panel_h - 1 -
              static_cast<int>(std::lround(frac * (panel_h - 1)));
      for (int dx = 1; dx <= 3; ++dx) img.Set(margin_l - dx, y, 40, 40, 40);
      std::string label = FormatHz(frac * fmax);
      DrawText(img, margin_l - 5 - TextWidth(label),
               std::clamp(y - 3, y0, y0 + panel_h - 8), label, 40, 40, 40);
    }
    // time ticks under the panel
    for (int tick = 0; tick <= 4; ++tick) {
      double frac = tick / 4.0;
      int xx = margin_l +
               static_cast<int>(std::lround(frac * (panel_w - 1)));
      for (int dy = 0; dy < 3; ++dy)
        img.Set(xx, y0 + panel_h + dy, 40, 40, 40);
      std::string label = FormatSeconds(frac * dur);
      int lx = std::clamp(xx - TextWidth(label) / 2, 0,
                          width - TextWidth(label) - 1);
      DrawText(img, lx, y0 + panel_h + 4, label, 40, 40, 40);
    }
  }

  png::WritePng(out_path, img);
  res.path = out_path;
  return res;
}

}  // namespace spect
}  // namespace lmlc
