// bitstream.h

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

#ifndef LMLC_BITSTREAM_H_
#define LMLC_BITSTREAM_H_

#include <cstdint>
#include <string>
#include <vector>

namespace lmlc {
namespace bitstream {

// One encoded clip: two index planes plus the header needed to decode them.
struct CodeStream {
  uint8_t version = 1;
  uint32_t sample_rate = 0;
  uint16_t k_sem = 0;
  uint16_t k_pitch = 0;
  float rate_sem = 0.0f;   // semantic frames per second
  float rate_pitch = 0.0f; // pitch frames per second
  std::vector<int> semantic_indices;
  std::vector<int> pitch_indices;

  bool operator==(const CodeStream& o) const = default;
};

// Fixed-width packing: each index takes ceil(log2 K) bits, planes are stored
// back to back, each starting on a byte boundary.
std::vector<uint8_t> Pack(const CodeStream& cs);
CodeStream Unpack(const std::vector<uint8_t>& bytes);

void WriteCodeStream(const std::string& path, const CodeStream& cs);
CodeStream ReadCodeStream(const std::string& path);

int IndexBits(int k);

// Exact information rate in bits per second.
double Bitrate(int k_sem, double rate_sem, int k_pitch, double rate_pitch);

}  // namespace bitstream
}  // namespace lmlc

#endif  // LMLC_BITSTREAM_H_
