// lmlc/tensor.h

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

#ifndef LMLC_TENSOR_H_
#define LMLC_TENSOR_H_

#include <cstdint>
#include <vector>

#include "lmlc/common.h"

namespace lmlc {

// Dense row-major f64 tensor. Everything in the toolkit is rank 1 or 2
// ([frames, channels] matrices, vectors, and [1] scalars); rank is not
// restricted but nothing above 2 is used.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(std::vector<int64_t> shape);
  Tensor(std::vector<int64_t> shape, std::vector<double> data);

  static Tensor Zeros(std::vector<int64_t> shape) { return Tensor(shape); }
  static Tensor Full(std::vector<int64_t> shape, double v);
  static Tensor Scalar(double v) { return Tensor({1}, {v}); }

  const std::vector<int64_t>& shape() const { return shape_; }
  int64_t numel() const { return static_cast<int64_t>(data_.size()); }
  bool empty() const { return data_.empty(); }

  // Rank-2 accessors; rank-1 tensors behave as [n, 1].
  int64_t rows() const { return shape_.empty() ? 0 : shape_[0]; }
  int64_t cols() const { return shape_.size() < 2 ? (shape_.empty() ? 0 : 1)
                                                  : shape_[1]; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  double* row(int64_t i) { return data_.data() + i * cols(); }
  const double* row(int64_t i) const { return data_.data() + i * cols(); }

  double& at(int64_t i) { return data_[i]; }
  double at(int64_t i) const { return data_[i]; }
  double& at(int64_t i, int64_t j) { return data_[i * cols() + j]; }
  double at(int64_t i, int64_t j) const { return data_[i * cols() + j]; }

  double item() const {
    Check(numel() == 1, ErrorKind::kShape, "item() on tensor of numel ",
          numel());
    return data_[0];
  }

  bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }
  bool all_finite() const;
  void Fill(double v);

 private:
  std::vector<int64_t> shape_;
  std::vector<double> data_;
};

std::string ShapeStr(const std::vector<int64_t>& shape);

}  // namespace lmlc

#endif  // LMLC_TENSOR_H_
