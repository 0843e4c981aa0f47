// lmlc/kernels.h

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

#ifndef LMLC_KERNELS_H_
#define LMLC_KERNELS_H_

#include <cstddef>
#include <cstdint>

namespace lmlc {
namespace kern {

// f64 inner loops behind a runtime-dispatched table. The scalar table is the
// reference; the AVX2/NEON tables must agree with it within rounding (FMA
// contraction aside), which tests/test_kernels.cpp enforces on random inputs.
//
// Matrices are dense row-major with no leading-dimension padding.
struct Ops {
  const char* isa;

  double (*dot)(const double* x, const double* y, size_t n);
  // y += a * x
  void (*axpy)(double a, const double* x, double* y, size_t n);
  void (*scale)(double a, double* x, size_t n);
  void (*vadd)(const double* x, const double* y, double* z, size_t n);
  void (*vsub)(const double* x, const double* y, double* z, size_t n);
  void (*vmul)(const double* x, const double* y, double* z, size_t n);
  double (*sum)(const double* x, size_t n);
  // sum of (x - y)^2
  double (*sqdist)(const double* x, const double* y, size_t n);

  // C[m,n] (+)= A[m,k] * B[k,n]; accumulate=false zeroes C first.
  void (*gemm_nn)(size_t m, size_t k, size_t n, const double* a,
                  const double* b, double* c, bool accumulate);
  // C[m,n] (+)= A^T * B with A stored [k,m].
  void (*gemm_tn)(size_t m, size_t k, size_t n, const double* a,
                  const double* b, double* c, bool accumulate);
  // C[m,n] (+)= A * B^T with B stored [n,k].
  void (*gemm_nt)(size_t m, size_t k, size_t n, const double* a,
                  const double* b, double* c, bool accumulate);
};

// Runtime-selected table. Honors LMLC_KERNELS=scalar|avx2|neon (set before
// first use) and falls back to scalar when the requested ISA is unsupported.
const Ops& ops();

const Ops& scalar_ops();
// nullptr when the build or the CPU lacks the ISA.
const Ops* avx2_ops();
const Ops* neon_ops();

}  // namespace kern
}  // namespace lmlc

#endif  // LMLC_KERNELS_H_
