// wav.cpp

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
#include <cstdint>
#include <cstring>
#include <fstream>

#include "lmlc/audio.h"

namespace lmlc {
namespace audio {

namespace {

uint32_t ReadU32Le(const unsigned char* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t ReadU16Le(const unsigned char* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}
void PutU32Le(std::string& s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void PutU16Le(std::string& s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

Wave ReadWav(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  Check(is.good(), ErrorKind::kIo, "cannot open: ", path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(is)),
                                 std::istreambuf_iterator<char>());
  Check(buf.size() >= 44, ErrorKind::kFormat, "not a WAV file (too short): ",
        path);
  Check(std::memcmp(buf.data(), "RIFF", 4) == 0 &&
            std::memcmp(buf.data() + 8, "WAVE", 4) == 0,
        ErrorKind::kFormat, "not a RIFF/WAVE file: ", path);

  size_t pos = 12;
  int channels = 0, rate = 0, bits = 0;
  size_t data_off = 0, data_len = 0;
  bool have_fmt = false;
  while (pos + 8 <= buf.size()) {
    const unsigned char* hdr = buf.data() + pos;
    uint32_t chunk_len = ReadU32Le(hdr + 4);
    size_t body = pos + 8;
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      Check(chunk_len >= 16 && body + 16 <= buf.size(), ErrorKind::kFormat,
            "bad fmt chunk: ", path);
      uint16_t format = ReadU16Le(buf.data() + body);
      Check(format == 1, ErrorKind::kFormat,
            "unsupported WAV encoding (want PCM): ", path);
      channels = ReadU16Le(buf.data() + body + 2);
      rate = static_cast<int>(ReadU32Le(buf.data() + body + 4));
      bits = ReadU16Le(buf.data() + body + 14);
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      data_off = body;
      data_len = chunk_len;
    }
    pos = body + chunk_len + (chunk_len & 1);
  }
  Check(have_fmt, ErrorKind::kFormat, "missing fmt chunk: ", path);
  Check(bits == 16, ErrorKind::kFormat, "unsupported bit depth ", bits,
        " (want 16): ", path);
  Check(channels >= 1 && rate > 0, ErrorKind::kFormat, "bad WAV header: ",
        path);
  Check(data_off > 0 && data_off + data_len <= buf.size(), ErrorKind::kFormat,
        "bad or missing data chunk: ", path);

  size_t n_frames = data_len / (2 * static_cast<size_t>(channels));
  Check(n_frames > 0, ErrorKind::kFormat, "empty audio: ", path);
  Wave w;
  w.sample_rate = rate;
  w.samples.resize(n_frames);
  const unsigned char* d = buf.data() + data_off;
  for (size_t i = 0; i < n_frames; ++i) {
    double acc = 0.0;
    for (int c = 0; c < channels; ++c) {
      int16_t s = static_cast<int16_t>(
          ReadU16Le(d + (i * channels + c) * 2));
      acc += static_cast<double>(s) / 32768.0;
    }
    w.samples[i] = acc / channels;
  }
  return w;
}

void WriteWav(const std::string& path, const Wave& w) {
  Check(!w.samples.empty(), ErrorKind::kDomain, "refusing to write empty audio");
  Check(w.sample_rate > 0, ErrorKind::kDomain, "bad sample rate");
  for (double s : w.samples) {
    Check(std::isfinite(s), ErrorKind::kDomain, "non-finite sample");
    Check(s >= -1.0 && s <= 1.0, ErrorKind::kDomain,
          "sample out of [-1,1]: ", s);
  }
  std::string out;
  uint32_t data_len = static_cast<uint32_t>(w.samples.size() * 2);
  out += "RIFF";
  PutU32Le(out, 36 + data_len);
  out += "WAVEfmt ";
  PutU32Le(out, 16);
  PutU16Le(out, 1);  // PCM
  PutU16Le(out, 1);  // mono
  PutU32Le(out, static_cast<uint32_t>(w.sample_rate));
  PutU32Le(out, static_cast<uint32_t>(w.sample_rate * 2));
  PutU16Le(out, 2);
  PutU16Le(out, 16);
  out += "data";
  PutU32Le(out, data_len);
  // The reader divides by 32768, so quantize with the same scale to keep the
  // round trip within half an LSB away from full scale.
  for (double s : w.samples) {
    double v = std::floor(s * 32768.0 + 0.5);
    if (v > 32767.0) v = 32767.0;
    if (v < -32768.0) v = -32768.0;
    PutU16Le(out, static_cast<uint16_t>(static_cast<int16_t>(v)));
  }
  std::ofstream os(path, std::ios::binary);
  Check(os.good(), ErrorKind::kIo, "cannot open for write: ", path);
  os.write(out.data(), static_cast<std::streamsize>(out.size()));
  os.flush();
  Check(os.good(), ErrorKind::kIo, "write failed: ", path);
}

Wave LoadAudio(const std::string& path, int target_rate) {
  Wave w = ReadWav(path);
  w = Resample(w, target_rate);
  Check(!w.samples.empty(), ErrorKind::kFormat, "empty audio after resample");
  for (double s : w.samples) {
    Check(std::isfinite(s), ErrorKind::kDomain, "non-finite sample in ", path);
    Check(s >= -1.0 && s <= 1.0, ErrorKind::kDomain,
          "resampled peak out of range in ", path,
          " (refusing to clamp): ", s);
  }
  return w;
}

}  // namespace audio
}  // namespace lmlc
