// checkpoint.h

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

#ifndef LMLC_CHECKPOINT_H_
#define LMLC_CHECKPOINT_H_

#include <cstdint>
#include <map>
#include <string>

#include "lmlc/nn.h"
#include "lmlc/tensor.h"

namespace lmlc {

// Binary container of named f64 tensors plus string and integer metadata.
// Values round-trip bitwise: raw IEEE754 little-endian bytes on disk.
struct Checkpoint {
  std::map<std::string, Tensor> tensors;
  std::map<std::string, std::string> str_meta;
  std::map<std::string, uint64_t> u64_meta;

  void Save(const std::string& path) const;
  static Checkpoint Load(const std::string& path);

  // Copies every parameter of `pm` in under `prefix.`.
  void PutParams(const std::string& prefix, const nn::ParamMap& pm);
  // Copies stored values back into the live parameters (shape checked).
  void GetParams(const std::string& prefix, const nn::ParamMap& pm) const;

  void PutOptimState(const std::string& prefix,
                     const std::map<std::string, Tensor>& state);
  std::map<std::string, Tensor> GetOptimState(const std::string& prefix) const;
};

// FNV-1a over names and raw value bytes; cheap identity for freeze checks.
uint64_t HashTensor(const Tensor& t);
uint64_t HashParams(const nn::ParamMap& pm);

}  // namespace lmlc

#endif  // LMLC_CHECKPOINT_H_
