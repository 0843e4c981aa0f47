// png_io.h

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

#ifndef LMLC_PNG_IO_H_
#define LMLC_PNG_IO_H_

#include <cstdint>
#include <string>
#include <vector>

namespace lmlc {
namespace png {

struct Image {
  int width = 0;
  int height = 0;
  std::vector<uint8_t> rgb;  // row-major, 3 bytes per pixel

  Image() = default;
  Image(int w, int h) : width(w), height(h), rgb(3u * w * h, 0) {}
  uint8_t* px(int x, int y) { return rgb.data() + 3 * (y * width + x); }
  const uint8_t* px(int x, int y) const {
    return rgb.data() + 3 * (y * width + x);
  }
  void Set(int x, int y, uint8_t r, uint8_t g, uint8_t b);
};

// 8-bit RGB, zlib-deflated, single IDAT.
void WritePng(const std::string& path, const Image& img);

// Reads back 8-bit RGB or RGBA images with scanline filters 0..4.
Image ReadPng(const std::string& path);

}  // namespace png
}  // namespace lmlc

#endif  // LMLC_PNG_IO_H_
