// test_nn.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <set>

#include "lmlc/nn.h"
#include "lmlc/rng.h"

using namespace lmlc;

namespace {

Tensor RandomTensor(Rng& rng, std::vector<int64_t> shape, double scale = 1.0) {
  Tensor t(shape);
  for (int64_t i = 0; i < t.numel(); ++i) t.at(i) = scale * rng.Gaussian();
  return t;
}

double ScalarLoss(const ag::Var& y) {
  return ag::MeanAll(ag::Mul(y, y))->value.item();
}

}  // namespace

TEST_CASE("linear layer computes x w + b") {
  Rng rng(1);
  nn::Linear lin(3, 2, rng);
  Tensor x = RandomTensor(rng, {4, 3});
  Tensor y = lin.Forward(ag::Constant(x))->value;
  REQUIRE(y.rows() == 4);
  REQUIRE(y.cols() == 2);
  for (int64_t i = 0; i < 4; ++i)
    for (int64_t j = 0; j < 2; ++j) {
      double acc = lin.b->value.at(j);
      for (int64_t k = 0; k < 3; ++k)
        acc += x.row(i)[k] * lin.w->value.row(k)[j];
      CHECK(y.row(i)[j] == doctest::Approx(acc).epsilon(1e-12));
    }
}

TEST_CASE("param maps register every tensor once under the prefix") {
  Rng rng(2);
  nn::TransformerEncoder enc(2, 8, 2, 16, rng);
  nn::ParamMap pm;
  enc.Params(pm, "enc");
  CHECK(pm.size() > 0);
  std::set<std::string> names;
  int64_t numel = 0;
  for (const auto& [name, v] : pm.items()) {
    CHECK(name.rfind("enc.", 0) == 0);
    CHECK(names.insert(name).second);
    numel += v->value.numel();
  }
  CHECK(numel == pm.TotalNumel());
  // 2 layers x (2 layernorms x 2 + attention 4 linears x 2 + ffn 2 x 2)
  // + final layernorm
  CHECK(pm.size() == 2 * (4 + 8 + 4) + 2);
}

TEST_CASE("set-requires-grad freezes and thaws") {
  Rng rng(3);
  nn::Linear lin(4, 4, rng);
  nn::ParamMap pm;
  lin.Params(pm, "lin");
  pm.SetRequiresGrad(false);
  ag::Var y = lin.Forward(ag::Constant(RandomTensor(rng, {2, 4})));
  ag::Backward(ag::MeanAll(ag::Mul(y, y)));
  CHECK(lin.w->grad.numel() == 0);
  pm.SetRequiresGrad(true);
  y = lin.Forward(ag::Constant(RandomTensor(rng, {2, 4})));
  ag::Backward(ag::MeanAll(ag::Mul(y, y)));
  CHECK(lin.w->grad.numel() == lin.w->value.numel());
}

TEST_CASE("attention rows are convex mixtures of value projections") {
  Rng rng(4);
  nn::MultiHeadAttention mha(8, 2, rng);
  ag::Var x = ag::Constant(RandomTensor(rng, {5, 8}));
  ag::Var y = mha.Forward(x, x, false);
  REQUIRE(y->value.rows() == 5);
  REQUIRE(y->value.cols() == 8);
  CHECK(y->value.all_finite());
}

TEST_CASE("causal attention ignores future positions") {
  Rng rng(5);
  nn::MultiHeadAttention mha(8, 2, rng);
  Tensor x = RandomTensor(rng, {6, 8});
  Tensor y_full = mha.Forward(ag::Constant(x), ag::Constant(x), true)->value;

  // Truncating the tail must not change earlier rows under a causal mask.
  Tensor x_head({4, 8});
  for (int64_t i = 0; i < 4; ++i)
    std::copy(x.row(i), x.row(i) + 8, x_head.row(i));
  Tensor y_head =
      mha.Forward(ag::Constant(x_head), ag::Constant(x_head), true)->value;
  for (int64_t i = 0; i < 4; ++i)
    for (int64_t j = 0; j < 8; ++j)
      CHECK(y_full.row(i)[j] == doctest::Approx(y_head.row(i)[j]).epsilon(1e-12));
}

TEST_CASE("non-causal attention does look ahead") {
  Rng rng(6);
  nn::MultiHeadAttention mha(8, 2, rng);
  Tensor x = RandomTensor(rng, {6, 8});
  Tensor y_full = mha.Forward(ag::Constant(x), ag::Constant(x), false)->value;
  Tensor x_head({4, 8});
  for (int64_t i = 0; i < 4; ++i)
    std::copy(x.row(i), x.row(i) + 8, x_head.row(i));
  Tensor y_head =
      mha.Forward(ag::Constant(x_head), ag::Constant(x_head), false)->value;
  double diff = 0.0;
  for (int64_t i = 0; i < 4; ++i)
    for (int64_t j = 0; j < 8; ++j)
      diff += std::abs(y_full.row(i)[j] - y_head.row(i)[j]);
  CHECK(diff > 1e-6);
}

TEST_CASE("encoder and decoder layers are differentiable end to end") {
  Rng rng(7);
  nn::TransformerEncoder enc(2, 8, 2, 16, rng);
  nn::ParamMap pm;
  enc.Params(pm, "enc");
  ag::Var x = ag::Leaf(RandomTensor(rng, {5, 8}));
  ag::Var y = enc.Forward(x);
  double before = ScalarLoss(y);
  ag::Backward(ag::MeanAll(ag::Mul(y, y)));
  CHECK(x->grad.numel() == x->value.numel());
  double gnorm = 0.0;
  for (int64_t i = 0; i < x->grad.numel(); ++i)
    gnorm += x->grad.at(i) * x->grad.at(i);
  CHECK(gnorm > 0.0);
  CHECK(std::isfinite(before));

  nn::TransformerDecoderLayer dec(8, 2, 16, rng);
  ag::Var mem = ag::Constant(RandomTensor(rng, {7, 8}));
  ag::Var tgt = ag::Leaf(RandomTensor(rng, {3, 8}));
  ag::Var out = dec.Forward(tgt, mem);
  REQUIRE(out->value.rows() == 3);
  ag::Backward(ag::MeanAll(ag::Mul(out, out)));
  CHECK(tgt->grad.numel() == tgt->value.numel());
}

TEST_CASE("decoder self attention is causal") {
  Rng rng(8);
  nn::TransformerDecoderLayer dec(8, 2, 16, rng);
  Tensor mem = RandomTensor(rng, {4, 8});
  Tensor tgt = RandomTensor(rng, {5, 8});
  Tensor full = dec.Forward(ag::Constant(tgt), ag::Constant(mem))->value;
  Tensor head({3, 8});
  for (int64_t i = 0; i < 3; ++i)
    std::copy(tgt.row(i), tgt.row(i) + 8, head.row(i));
  Tensor part = dec.Forward(ag::Constant(head), ag::Constant(mem))->value;
  for (int64_t i = 0; i < 3; ++i)
    for (int64_t j = 0; j < 8; ++j)
      CHECK(full.row(i)[j] == doctest::Approx(part.row(i)[j]).epsilon(1e-12));
}

TEST_CASE("sinusoidal positions interleave sin and cos of scaled steps") {
  Tensor p = nn::SinusoidalPositions(6, 8);
  REQUIRE(p.rows() == 6);
  REQUIRE(p.cols() == 8);
  for (int64_t t = 0; t < 6; ++t) {
    for (int64_t i = 0; i < 4; ++i) {
      double freq = std::pow(10000.0, -2.0 * static_cast<double>(i) / 8.0);
      CHECK(p.row(t)[2 * i] ==
            doctest::Approx(std::sin(t * freq)).epsilon(1e-9));
      CHECK(p.row(t)[2 * i + 1] ==
            doctest::Approx(std::cos(t * freq)).epsilon(1e-9));
    }
  }
}

TEST_CASE("xavier uniform stays inside its bound") {
  Rng rng(9);
  Tensor t = nn::XavierUniform(32, 64, {32, 64}, rng);
  double bound = std::sqrt(6.0 / (32 + 64));
  for (int64_t i = 0; i < t.numel(); ++i) {
    CHECK(t.at(i) <= bound);
    CHECK(t.at(i) >= -bound);
  }
}

TEST_CASE("conv layers forward matches the underlying ops") {
  Rng rng(10);
  nn::Conv1dLayer conv(2, 3, 3, 1, 1, 1, rng);
  ag::Var x = ag::Constant(RandomTensor(rng, {6, 2}));
  Tensor got = conv.Forward(x)->value;
  Tensor want =
      ag::Conv1d(x, conv.w, conv.b, 3, 1, 1, 1)->value;
  REQUIRE(got.same_shape(want));
  for (int64_t i = 0; i < got.numel(); ++i) CHECK(got.at(i) == want.at(i));

  nn::ConvT1dLayer convt(3, 2, 4, 2, 1, rng);
  ag::Var h = ag::Constant(RandomTensor(rng, {6, 3}));
  Tensor got_t = convt.Forward(h)->value;
  Tensor want_t = ag::ConvTranspose1d(h, convt.w, convt.b, 4, 2, 1)->value;
  REQUIRE(got_t.same_shape(want_t));
  for (int64_t i = 0; i < got_t.numel(); ++i)
    CHECK(got_t.at(i) == want_t.at(i));
}
