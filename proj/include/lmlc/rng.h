// lmlc/rng.h

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

#ifndef LMLC_RNG_H_
#define LMLC_RNG_H_

#include <array>
#include <cstdint>
#include <vector>

namespace lmlc {

// xoshiro256** seeded through splitmix64. Self-contained so that seeded runs
// reproduce bitwise across standard libraries; training resume serializes the
// four state words.
class Rng {
 public:
  explicit Rng(uint64_t seed = 0);

  uint64_t NextU64();
  // Uniform in [0, 1).
  double Uniform();
  double Uniform(double lo, double hi);
  // Box-Muller; two draws per call, no cached state.
  double Gaussian();
  double Gaussian(double mean, double stddev);
  // Uniform integer in [0, n). n must be > 0.
  int64_t UniformInt(int64_t n);
  // Derive an independent stream (for per-provider seeding).
  Rng Fork();

  template <typename T>
  void Shuffle(std::vector<T>& v) {
    for (int64_t i = static_cast<int64_t>(v.size()) - 1; i > 0; --i) {
      std::swap(v[i], v[UniformInt(i + 1)]);
    }
  }

  std::array<uint64_t, 4> state() const { return s_; }
  void set_state(const std::array<uint64_t, 4>& s) { s_ = s; }

 private:
  std::array<uint64_t, 4> s_;
};

}  // namespace lmlc

#endif  // LMLC_RNG_H_
