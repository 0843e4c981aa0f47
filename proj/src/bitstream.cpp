// bitstream.cpp

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

#include "lmlc/bitstream.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "lmlc/common.h"

namespace lmlc {
namespace bitstream {

namespace {

constexpr char kMagic[4] = {'L', 'M', 'L', 'C'};
constexpr uint8_t kVersion = 1;

void PutU16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(v & 0xff);
  out.push_back((v >> 8) & 0xff);
}

void PutU32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back((v >> (8 * i)) & 0xff);
}

void PutF32(std::vector<uint8_t>& out, float v) {
  uint32_t bits;
  std::memcpy(&bits, &v, 4);
  PutU32(out, bits);
}

class Reader {
 public:
  explicit Reader(const std::vector<uint8_t>& b) : b_(b) {}
  uint8_t U8() {
    Need(1);
    return b_[pos_++];
  }
  uint16_t U16() {
    Need(2);
    uint16_t v = b_[pos_] | (b_[pos_ + 1] << 8);
    pos_ += 2;
    return v;
  }
  uint32_t U32() {
    Need(4);
    uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<uint32_t>(b_[pos_ + i]) << (8 * i);
    pos_ += 4;
    return v;
  }
  float F32() {
    uint32_t bits = U32();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }
  const uint8_t* Bytes(size_t n) {
    Need(n);
    const uint8_t* p = b_.data() + pos_;
    pos_ += n;
    return p;
  }
  size_t pos() const { return pos_; }

 private:
  void Need(size_t n) {
    Check(pos_ + n <= b_.size(), ErrorKind::kFormat,
          "truncated stream: need ", n, " bytes at offset ", pos_,
          ", have ", b_.size() - pos_);
  }
  const std::vector<uint8_t>& b_;
  size_t pos_ = 0;
};

void PackPlane(std::vector<uint8_t>& out, const std::vector<int>& indices,
               int k) {
  int bits = IndexBits(k);
  if (bits == 0) return;
  uint32_t acc = 0;
  int filled = 0;
  for (int idx : indices) {
    Check(idx >= 0 && idx < k, ErrorKind::kDomain, "index ", idx,
          " out of range for K=", k);
    acc |= static_cast<uint32_t>(idx) << filled;
    filled += bits;
    while (filled >= 8) {
      out.push_back(acc & 0xff);
      acc >>= 8;
      filled -= 8;
    }
  }
  if (filled > 0) out.push_back(acc & 0xff);
}

std::vector<int> UnpackPlane(Reader& r, uint32_t n, int k) {
  std::vector<int> out;
  out.reserve(n);
  int bits = IndexBits(k);
  if (bits == 0) {
    out.assign(n, 0);
    return out;
  }
  size_t n_bytes = (static_cast<size_t>(n) * bits + 7) / 8;
  const uint8_t* p = r.Bytes(n_bytes);
  uint32_t acc = 0;
  int avail = 0;
  size_t byte = 0;
  uint32_t mask = (1u << bits) - 1;
  for (uint32_t i = 0; i < n; ++i) {
    while (avail < bits) {
      acc |= static_cast<uint32_t>(p[byte++]) << avail;
      avail += 8;
    }
    int idx = static_cast<int>(acc & mask);
    Check(idx < k, ErrorKind::kFormat, "packed index ", idx,
          " out of range for K=", k);
    out.push_back(idx);
    acc >>= bits;
    avail -= bits;
  }
  return out;
}

}  // namespace

int IndexBits(int k) {
  Check(k >= 1, ErrorKind::kDomain, "bad codebook size ", k);
  if (k == 1) return 0;
  return std::bit_width(static_cast<unsigned>(k - 1));
}

std::vector<uint8_t> Pack(const CodeStream& cs) {
  Check(cs.version == kVersion, ErrorKind::kDomain, "unsupported version ",
        int(cs.version));
  Check(cs.k_sem >= 1 && cs.k_pitch >= 1, ErrorKind::kDomain,
        "codebook sizes must be positive");
  Check(cs.rate_sem > 0.0f && cs.rate_pitch > 0.0f, ErrorKind::kDomain,
        "frame rates must be positive");
  std::vector<uint8_t> out;
  out.insert(out.end(), kMagic, kMagic + 4);
  out.push_back(cs.version);
  PutU32(out, cs.sample_rate);
  PutU16(out, cs.k_sem);
  PutU16(out, cs.k_pitch);
  PutF32(out, cs.rate_sem);
  PutF32(out, cs.rate_pitch);
  PutU32(out, static_cast<uint32_t>(cs.semantic_indices.size()));
  PutU32(out, static_cast<uint32_t>(cs.pitch_indices.size()));
  PackPlane(out, cs.semantic_indices, cs.k_sem);
  PackPlane(out, cs.pitch_indices, cs.k_pitch);
  return out;
}

CodeStream Unpack(const std::vector<uint8_t>& bytes) {
  Reader r(bytes);
  const uint8_t* magic = r.Bytes(4);
  Check(std::memcmp(magic, kMagic, 4) == 0, ErrorKind::kFormat,
        "bad magic, not a code stream");
  CodeStream cs;
  cs.version = r.U8();
  Check(cs.version == kVersion, ErrorKind::kFormat, "version ",
        int(cs.version), " not supported (expected ", int(kVersion), ")");
  cs.sample_rate = r.U32();
  cs.k_sem = r.U16();
  cs.k_pitch = r.U16();
  Check(cs.k_sem >= 1 && cs.k_pitch >= 1, ErrorKind::kFormat,
        "corrupt header: zero codebook size");
  cs.rate_sem = r.F32();
  cs.rate_pitch = r.F32();
  uint32_t n_sem = r.U32();
  uint32_t n_pitch = r.U32();
  cs.semantic_indices = UnpackPlane(r, n_sem, cs.k_sem);
  cs.pitch_indices = UnpackPlane(r, n_pitch, cs.k_pitch);
  return cs;
}

void WriteCodeStream(const std::string& path, const CodeStream& cs) {
  std::vector<uint8_t> bytes = Pack(cs);
  std::ofstream os(path, std::ios::binary);
  Check(os.good(), ErrorKind::kIo, "cannot open for write: ", path);
  os.write(reinterpret_cast<const char*>(bytes.data()),
           static_cast<std::streamsize>(bytes.size()));
  os.flush();
  Check(os.good(), ErrorKind::kIo, "write failed: ", path);
}

CodeStream ReadCodeStream(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  Check(is.good(), ErrorKind::kIo, "cannot open: ", path);
  std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(is)),
                             std::istreambuf_iterator<char>());
  return Unpack(bytes);
}

double Bitrate(int k_sem, double rate_sem, int k_pitch, double rate_pitch) {
  Check(k_sem >= 1 && k_pitch >= 1, ErrorKind::kDomain,
        "codebook sizes must be positive");
  Check(rate_sem > 0.0, ErrorKind::kDomain, "semantic rate must be positive");
  Check(rate_pitch > 0.0, ErrorKind::kDomain, "pitch rate must be positive");
  return rate_sem * std::log2(static_cast<double>(k_sem)) +
         rate_pitch * std::log2(static_cast<double>(k_pitch));
}

}  // namespace bitstream
}  // namespace lmlc
