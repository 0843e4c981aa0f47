// kernels.cpp — runtime ISA selection.

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

#include <cstdlib>
#include <cstring>

#include "lmlc/kernels.h"

namespace lmlc {
namespace kern {

namespace {
const Ops* Select() {
  const char* want = std::getenv("LMLC_KERNELS");
  if (want != nullptr) {
    if (std::strcmp(want, "scalar") == 0) return &scalar_ops();
    if (std::strcmp(want, "avx2") == 0 && avx2_ops() != nullptr)
      return avx2_ops();
    if (std::strcmp(want, "neon") == 0 && neon_ops() != nullptr)
      return neon_ops();
    return &scalar_ops();
  }
  if (const Ops* t = avx2_ops()) return t;
  if (const Ops* t = neon_ops()) return t;
  return &scalar_ops();
}
}  // namespace

const Ops& ops() {
  static const Ops* selected = Select();
  return *selected;
}

}  // namespace kern
}  // namespace lmlc
