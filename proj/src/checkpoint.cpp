// checkpoint.cpp

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

#include "lmlc/checkpoint.h"

#include <cstring>
#include <fstream>

namespace lmlc {

namespace {

constexpr char kMagic[4] = {'L', 'M', 'C', 'K'};
constexpr uint8_t kVersion = 1;

void WriteU8(std::ostream& os, uint8_t v) {
  os.write(reinterpret_cast<const char*>(&v), 1);
}
void WriteU32(std::ostream& os, uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 4);
}
void WriteU64(std::ostream& os, uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  os.write(b, 8);
}
void WriteStr(std::ostream& os, const std::string& s) {
  WriteU32(os, static_cast<uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}
void WriteF64Raw(std::ostream& os, const double* d, int64_t n) {
  for (int64_t i = 0; i < n; ++i) {
    uint64_t bits;
    std::memcpy(&bits, &d[i], 8);
    WriteU64(os, bits);
  }
}

uint8_t ReadU8(std::istream& is) {
  uint8_t v = 0;
  is.read(reinterpret_cast<char*>(&v), 1);
  Check(is.good(), ErrorKind::kFormat, "checkpoint: truncated");
  return v;
}
uint32_t ReadU32(std::istream& is) {
  char b[4];
  is.read(b, 4);
  Check(is.good(), ErrorKind::kFormat, "checkpoint: truncated");
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}
uint64_t ReadU64(std::istream& is) {
  char b[8];
  is.read(b, 8);
  Check(is.good(), ErrorKind::kFormat, "checkpoint: truncated");
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
  return v;
}
std::string ReadStr(std::istream& is) {
  uint32_t n = ReadU32(is);
  std::string s(n, '\0');
  is.read(s.data(), n);
  Check(is.good(), ErrorKind::kFormat, "checkpoint: truncated string");
  return s;
}

}  // namespace

void Checkpoint::Save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary);
  Check(os.good(), ErrorKind::kIo, "cannot open for write: ", path);
  os.write(kMagic, 4);
  WriteU8(os, kVersion);

  WriteU32(os, static_cast<uint32_t>(tensors.size()));
  for (const auto& [name, t] : tensors) {
    WriteStr(os, name);
    WriteU32(os, static_cast<uint32_t>(t.shape().size()));
    for (int64_t d : t.shape()) WriteU64(os, static_cast<uint64_t>(d));
    WriteF64Raw(os, t.data(), t.numel());
  }

  WriteU32(os, static_cast<uint32_t>(str_meta.size()));
  for (const auto& [k, v] : str_meta) {
    WriteStr(os, k);
    WriteStr(os, v);
  }
  WriteU32(os, static_cast<uint32_t>(u64_meta.size()));
  for (const auto& [k, v] : u64_meta) {
    WriteStr(os, k);
    WriteU64(os, v);
  }
  os.flush();
  Check(os.good(), ErrorKind::kIo, "write failed: ", path);
}

Checkpoint Checkpoint::Load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  Check(is.good(), ErrorKind::kIo, "cannot open: ", path);
  char magic[4];
  is.read(magic, 4);
  Check(is.good() && std::memcmp(magic, kMagic, 4) == 0, ErrorKind::kFormat,
        "not a checkpoint file: ", path);
  uint8_t version = ReadU8(is);
  Check(version == kVersion, ErrorKind::kFormat,
        "unsupported checkpoint version ", static_cast<int>(version));

  Checkpoint ck;
  uint32_t nt = ReadU32(is);
  for (uint32_t i = 0; i < nt; ++i) {
    std::string name = ReadStr(is);
    uint32_t rank = ReadU32(is);
    std::vector<int64_t> shape(rank);
    for (uint32_t r = 0; r < rank; ++r)
      shape[r] = static_cast<int64_t>(ReadU64(is));
    Tensor t(shape);
    for (int64_t j = 0; j < t.numel(); ++j) {
      uint64_t bits = ReadU64(is);
      double d;
      std::memcpy(&d, &bits, 8);
      t.at(j) = d;
    }
    ck.tensors.emplace(std::move(name), std::move(t));
  }

  uint32_t ns = ReadU32(is);
  for (uint32_t i = 0; i < ns; ++i) {
    std::string k = ReadStr(is);
    ck.str_meta[k] = ReadStr(is);
  }
  uint32_t nu = ReadU32(is);
  for (uint32_t i = 0; i < nu; ++i) {
    std::string k = ReadStr(is);
    ck.u64_meta[k] = ReadU64(is);
  }
  return ck;
}

void Checkpoint::PutParams(const std::string& prefix, const nn::ParamMap& pm) {
  for (const auto& [name, p] : pm.items())
    tensors[prefix + "." + name] = p->value;
}

void Checkpoint::GetParams(const std::string& prefix,
                           const nn::ParamMap& pm) const {
  for (const auto& [name, p] : pm.items()) {
    auto it = tensors.find(prefix + "." + name);
    Check(it != tensors.end(), ErrorKind::kState,
          "checkpoint missing tensor: ", prefix, ".", name);
    Check(it->second.same_shape(p->value), ErrorKind::kShape,
          "checkpoint tensor shape mismatch: ", prefix, ".", name, ", ",
          ShapeStr(it->second.shape()), " vs ", ShapeStr(p->value.shape()));
    std::copy(it->second.data(), it->second.data() + it->second.numel(),
              p->value.data());
  }
}

void Checkpoint::PutOptimState(const std::string& prefix,
                               const std::map<std::string, Tensor>& state) {
  for (const auto& [k, t] : state) tensors[prefix + "." + k] = t;
}

std::map<std::string, Tensor> Checkpoint::GetOptimState(
    const std::string& prefix) const {
  std::map<std::string, Tensor> out;
  const std::string pre = prefix + ".";
  for (const auto& [k, t] : tensors) {
    if (k.size() > pre.size() && k.compare(0, pre.size(), pre) == 0)
      out[k.substr(pre.size())] = t;
  }
  return out;
}

uint64_t HashTensor(const Tensor& t) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const unsigned char* p, size_t n) {
    for (size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (int64_t d : t.shape()) {
    uint64_t v = static_cast<uint64_t>(d);
    mix(reinterpret_cast<const unsigned char*>(&v), 8);
  }
  mix(reinterpret_cast<const unsigned char*>(t.data()),
      static_cast<size_t>(t.numel()) * 8);
  return h;
}

uint64_t HashParams(const nn::ParamMap& pm) {
  uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const unsigned char* p, size_t n) {
    for (size_t i = 0; i < n; ++i) {
      h ^= p[i];
      h *= 1099511628211ull;
    }
  };
  for (const auto& [name, p] : pm.items()) {
    mix(reinterpret_cast<const unsigned char*>(name.data()), name.size());
    uint64_t th = HashTensor(p->value);
    mix(reinterpret_cast<const unsigned char*>(&th), 8);
  }
  return h;
}

}  // namespace lmlc
