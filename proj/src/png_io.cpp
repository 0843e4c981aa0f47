// png_io.cpp

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

#include <cstring>
#include <fstream>

#include <zlib.h>

#include "lmlc/common.h"
#include "lmlc/png_io.h"

namespace lmlc {
namespace png {

void Image::Set(int x, int y, uint8_t r, uint8_t g, uint8_t b) {
  if (x < 0 || y < 0 || x >= width || y >= height) return;
  uint8_t* p = px(x, y);
  p[0] = r;
  p[1] = g;
  p[2] = b;
}

namespace {

const uint8_t kSignature[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

uint32_t GetU32(const uint8_t* p) {
  return (static_cast<uint32_t>(p[0]) << 24) |
         (static_cast<uint32_t>(p[1]) << 16) |
         (static_cast<uint32_t>(p[2]) << 8) | static_cast<uint32_t>(p[3]);
}

void WriteChunk(std::vector<uint8_t>& out, const char type[4],
                const uint8_t* data, size_t n) {
  PutU32(out, static_cast<uint32_t>(n));
  size_t start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data, data + n);
  uint32_t crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, out.data() + start, static_cast<uInt>(4 + n));
  PutU32(out, crc);
}

int Paeth(int a, int b, int c) {
  int p = a + b - c;
  int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
  if (pa <= pb && pa <= pc) return a;
  if (pb <= pc) return b;
  return c;
}

}  // namespace

void WritePng(const std::string& path, const Image& img) {
  Check(img.width > 0 && img.height > 0, ErrorKind::kDomain,
        "empty image");
  Check(img.rgb.size() == 3u * img.width * img.height, ErrorKind::kShape,
        "pixel buffer does not match image size");

  // Filter byte 0 in front of every scanline.
  size_t stride = 3u * img.width;
  std::vector<uint8_t> raw((stride + 1) * img.height);
  for (int y = 0; y < img.height; ++y) {
    raw[y * (stride + 1)] = 0;
    std::memcpy(raw.data() + y * (stride + 1) + 1,
                img.rgb.data() + y * stride, stride);
  }

  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<uint8_t> deflated(bound);
  int rc = compress2(deflated.data(), &bound, raw.data(),
                     static_cast<uLong>(raw.size()), 6);
  Check(rc == Z_OK, ErrorKind::kIo, "deflate failed: ", rc);
  deflated.resize(bound);

  std::vector<uint8_t> out(kSignature, kSignature + 8);
  uint8_t ihdr[13];
  ihdr[0] = static_cast<uint8_t>(img.width >> 24);
  ihdr[1] = static_cast<uint8_t>(img.width >> 16);
  ihdr[2] = static_cast<uint8_t>(img.width >> 8);
  ihdr[3] = static_cast<uint8_t>(img.width);
  ihdr[4] = static_cast<uint8_t>(img.height >> 24);
  ihdr[5] = static_cast<uint8_t>(img.height >> 16);
  ihdr[6] = static_cast<uint8_t>(img.height >> 8);
  ihdr[7] = static_cast<uint8_t>(img.height);
  ihdr[8] = 8;   // bit depth
  ihdr[9] = 2;   // truecolor
  ihdr[10] = 0;  // deflate
  ihdr[11] = 0;  // adaptive filters
  ihdr[12] = 0;  // no interlace
  WriteChunk(out, "IHDR", ihdr, sizeof ihdr);
  WriteChunk(out, "IDAT", deflated.data(), deflated.size());
  WriteChunk(out, "IEND", nullptr, 0);

  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  Check(f.good(), ErrorKind::kIo, "cannot open ", path, " for writing");
  f.write(reinterpret_cast<const char*>(out.data()),
          static_cast<std::streamsize>(out.size()));
  Check(f.good(), ErrorKind::kIo, "short write to ", path);
}

Image ReadPng(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  Check(f.good(), ErrorKind::kIo, "cannot open ", path);
  std::vector<uint8_t> buf((std::istreambuf_iterator<char>(f)),
                           std::istreambuf_iterator<char>());
  Check(buf.size() > 8 && std::memcmp(buf.data(), kSignature, 8) == 0,
        ErrorKind::kFormat, path, " is not a png file");

  int width = 0, height = 0, channels = 0;
  std::vector<uint8_t> idat;
  size_t pos = 8;
  while (pos + 8 <= buf.size()) {
    uint32_t len = GetU32(buf.data() + pos);
    Check(pos + 12 + len <= buf.size(), ErrorKind::kFormat,
          "truncated png chunk");
    const char* type = reinterpret_cast<const char*>(buf.data() + pos + 4);
    const uint8_t* data = buf.data() + pos + 8;
    if (std::memcmp(type, "IHDR", 4) == 0) {
      Check(len == 13, ErrorKind::kFormat, "bad IHDR length");
      width = static_cast<int>(GetU32(data));
      height = static_cast<int>(GetU32(data + 4));
      Check(data[8] == 8, ErrorKind::kFormat, "only 8-bit png supported");
      if (data[9] == 2) {
        channels = 3;
      } else if (data[9] == 6) {
        channels = 4;
      } else {
        Raise(ErrorKind::kFormat, "unsupported png color type ",
              static_cast<int>(data[9]));
      }
      Check(data[12] == 0, ErrorKind::kFormat, "interlaced png unsupported");
    } else if (std::memcmp(type, "IDAT", 4) == 0) {
      idat.insert(idat.end(), data, data + len);
    } else if (std::memcmp(type, "IEND", 4) == 0) {
      break;
    }
    pos += 12 + len;
  }
  Check(width > 0 && height > 0 && !idat.empty(), ErrorKind::kFormat,
        "png is missing IHDR or IDAT");

  size_t stride = static_cast<size_t>(channels) * width;
  std::vector<uint8_t> raw((stride + 1) * height);
  uLongf raw_len = static_cast<uLongf>(raw.size());
  int rc = uncompress(raw.data(), &raw_len, idat.data(),
                      static_cast<uLong>(idat.size()));
  Check(rc == Z_OK && raw_len == raw.size(), ErrorKind::kFormat,
        "png inflate failed: ", rc);

  Image img(width, height);
  std::vector<uint8_t> prev(stride, 0), cur(stride);
  for (int y = 0; y < height; ++y) {
    const uint8_t* line = raw.data() + y * (stride + 1);
    uint8_t filter = line[0];
    const uint8_t* src = line + 1;
    for (size_t i = 0; i < stride; ++i) {
      int a = i >= static_cast<size_t>(channels)
                  ? cur[i - channels]
                  : 0;  // left
      int b = prev[i];  // up
      int c = i >= static_cast<size_t>(channels) ? prev[i - channels] : 0;
      int x = src[i];
      switch (filter) {
        case 0: cur[i] = static_cast<uint8_t>(x); break;
        case 1: cur[i] = static_cast<uint8_t>(x + a); break;
        case 2: cur[i] = static_cast<uint8_t>(x + b); break;
        case 3: cur[i] = static_cast<uint8_t>(x + (a + b) / 2); break;
        case 4: cur[i] = static_cast<uint8_t>(x + Paeth(a, b, c)); break;
        default: Raise(ErrorKind::kFormat, "bad png filter ", filter);
      }
    }
    for (int xpx = 0; xpx < width; ++xpx) {
      const uint8_t* p = cur.data() + static_cast<size_t>(channels) * xpx;
      img.Set(xpx, y, p[0], p[1], p[2]);
    }
    prev = cur;
  }
  return img;
}

}  // namespace png
}  // namespace lmlc
