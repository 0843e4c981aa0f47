// test_ttr.cpp

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
#include <vector>

#include "lmlc/rng.h"
#include "lmlc/synthetic.h"
#include "lmlc/ttr.h"

using namespace lmlc;

namespace {

Tensor RandomTensor(Rng& rng, std::vector<int64_t> shape, double scale = 1.0) {
  Tensor t(shape);
  for (int64_t i = 0; i < t.numel(); ++i) t.at(i) = scale * rng.Gaussian();
  return t;
}

frontend::SyntheticConfig TestConfig() {
  frontend::SyntheticConfig cfg;
  cfg.ttr_dim = 16;
  return cfg;
}

ttr::PretrainItem MakeItem(uint64_t seed, const synthetic::SineCorpusConfig& scc) {
  Rng rng(seed);
  std::vector<int> tokens;
  int n = 5 + static_cast<int>(rng.UniformInt(3));
  for (int i = 0; i < n; ++i)
    tokens.push_back(2 + static_cast<int>(rng.UniformInt(scc.n_word_tokens)));
  synthetic::SynthUtterance utt = synthetic::MakeSineUtterance(tokens, scc);
  return {utt.clip, utt.alignments};
}

}  // namespace

TEST_CASE("the summarizer pools any length to one row") {
  Rng rng(121);
  ttr::SummarizerModel sum(16, 4, 32, 2, rng);
  for (int64_t m : {1, 2, 9, 40}) {
    ag::Var seg = ag::Constant(RandomTensor(rng, {m, 16}));
    ag::Var s = sum.Forward(seg);
    CHECK(s->value.rows() == 1);
    CHECK(s->value.cols() == 16);
    CHECK(s->value.all_finite());
  }
}

TEST_CASE("the summary depends on every input row") {
  Rng rng(122);
  ttr::SummarizerModel sum(16, 4, 32, 2, rng);
  Tensor seg = RandomTensor(rng, {6, 16});
  Tensor base = sum.Forward(ag::Constant(seg))->value;
  for (int64_t i = 0; i < 6; ++i) {
    Tensor bumped = seg;
    bumped.row(i)[3] += 0.5;
    Tensor out = sum.Forward(ag::Constant(bumped))->value;
    double diff = 0.0;
    for (int64_t j = 0; j < 16; ++j)
      diff += std::abs(out.row(0)[j] - base.row(0)[j]);
    CHECK(diff > 1e-9);
  }
}

TEST_CASE("the aggregator preserves sequence length") {
  Rng rng(123);
  ttr::AggregatorModel agg(16, 4, 32, 2, rng);
  for (int64_t n : {1, 3, 11}) {
    ag::Var s = ag::Constant(RandomTensor(rng, {n, 16}));
    ag::Var out = agg.Forward(s);
    CHECK(out->value.rows() == n);
    CHECK(out->value.cols() == 16);
  }
}

TEST_CASE("stack parameters split into summarizer and aggregator groups") {
  ttr::TtrStack stack(16, 4, 32, 2, 7);
  nn::ParamMap pm = stack.Params();
  CHECK(pm.size() > 0);
  int sum_params = 0, agg_params = 0;
  for (const auto& [name, v] : pm.items()) {
    (void)v;
    if (name.rfind("summarizer.", 0) == 0) ++sum_params;
    if (name.rfind("aggregator.", 0) == 0) ++agg_params;
  }
  CHECK(sum_params > 0);
  CHECK(agg_params > 0);
  CHECK(sum_params + agg_params == static_cast<int>(pm.size()));
}

TEST_CASE("the codec loss runs end to end on a synthetic utterance") {
  frontend::SyntheticConfig cfg = TestConfig();
  auto prov = frontend::MakeSyntheticProviders(31, cfg);
  synthetic::SineCorpusConfig scc;
  scc.sample_rate = cfg.sample_rate;
  ttr::PretrainItem item = MakeItem(32, scc);
  ttr::TtrStack stack(cfg.ttr_dim, 4, 32, 2, 33);

  Tensor wt({static_cast<int64_t>(item.clip.samples.size())});
  for (size_t i = 0; i < item.clip.samples.size(); ++i)
    wt.at(static_cast<int64_t>(i)) = item.clip.samples[i];
  ag::Var wave = ag::Leaf(wt);

  ag::Var loss = ttr::CodecLoss(wave, item.alignments, stack, prov);
  CHECK(std::isfinite(loss->value.item()));
  CHECK(loss->value.item() >= 0.0);

  // Gradients reach the wave but not the stack.
  ag::Backward(loss);
  REQUIRE(wave->grad.numel() == wave->value.numel());
  double g = 0.0;
  for (int64_t i = 0; i < wave->grad.numel(); ++i)
    g += std::abs(wave->grad.at(i));
  CHECK(g > 0.0);
  for (const auto& [name, v] : stack.Params().items()) {
    (void)name;
    CHECK(v->grad.numel() == 0);
  }
}

TEST_CASE("the codec loss requires alignments") {
  frontend::SyntheticConfig cfg = TestConfig();
  auto prov = frontend::MakeSyntheticProviders(34, cfg);
  ttr::TtrStack stack(cfg.ttr_dim, 4, 32, 2, 35);
  Tensor wt({8000});
  CHECK_THROWS_AS(ttr::CodecLoss(ag::Constant(wt), {}, stack, prov), Error);
}

TEST_CASE("pretraining with zero steps returns the initialization") {
  frontend::SyntheticConfig cfg = TestConfig();
  auto prov = frontend::MakeSyntheticProviders(36, cfg);
  synthetic::SineCorpusConfig scc;
  scc.sample_rate = cfg.sample_rate;
  std::vector<ttr::PretrainItem> train = {MakeItem(37, scc)};

  ttr::TtrPretrainConfig tc;
  tc.dim = cfg.ttr_dim;
  tc.max_steps = 0;
  tc.seed = 38;
  ttr::PretrainResult r = ttr::PretrainTtr(train, {}, tc, prov);
  CHECK(r.best_step == 0);

  ttr::TtrStack fresh(tc.dim, tc.heads, tc.ff, tc.layers, tc.seed);
  ttr::TtrStack loaded(tc.dim, tc.heads, tc.ff, tc.layers, 9999);
  ttr::LoadStack(r.best, loaded);
  CHECK(HashParams(loaded.Params()) == HashParams(fresh.Params()));
  CHECK(r.best.u64_meta.at("dim") == static_cast<uint64_t>(tc.dim));
  CHECK(r.best.u64_meta.at("layers") == static_cast<uint64_t>(tc.layers));
}

TEST_CASE("pretraining reduces the loss when overfitting one item") {
  frontend::SyntheticConfig cfg = TestConfig();
  auto prov = frontend::MakeSyntheticProviders(39, cfg);
  synthetic::SineCorpusConfig scc;
  scc.sample_rate = cfg.sample_rate;
  std::vector<ttr::PretrainItem> train = {MakeItem(40, scc)};

  ttr::TtrPretrainConfig tc;
  tc.dim = cfg.ttr_dim;
  tc.max_steps = 120;
  tc.validate_every = 40;
  tc.learning_rate = 3e-3;
  tc.seed = 41;

  ttr::TtrStack init(tc.dim, tc.heads, tc.ff, tc.layers, tc.seed);
  double before = ttr::ValidateTtr(init, train, prov);

  ttr::PretrainResult r = ttr::PretrainTtr(train, {}, tc, prov);
  CHECK(r.best_val < before);
  CHECK(r.best_step > 0);
  REQUIRE(!r.val_history.empty());

  // The checkpointed best stack reproduces the recorded metric.
  ttr::TtrStack best(tc.dim, tc.heads, tc.ff, tc.layers, 9);
  ttr::LoadStack(r.best, best);
  double revalidated = ttr::ValidateTtr(best, train, prov);
  CHECK(revalidated == doctest::Approx(r.best_val).epsilon(1e-9));
}

TEST_CASE("an empty validation list is rejected") {
  frontend::SyntheticConfig cfg = TestConfig();
  auto prov = frontend::MakeSyntheticProviders(42, cfg);
  ttr::TtrStack stack(cfg.ttr_dim, 4, 32, 2, 43);
  CHECK_THROWS_AS(ttr::ValidateTtr(stack, {}, prov), Error);
}

TEST_CASE("stacks round-trip through checkpoints") {
  ttr::TtrStack a(16, 4, 32, 2, 44);
  Checkpoint ck;
  ttr::SaveStack(ck, a);
  ttr::TtrStack b(16, 4, 32, 2, 45);
  CHECK(HashParams(b.Params()) != HashParams(a.Params()));
  ttr::LoadStack(ck, b);
  CHECK(HashParams(b.Params()) == HashParams(a.Params()));
}
