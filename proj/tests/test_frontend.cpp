// test_frontend.cpp

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
#include <numbers>
#include <vector>

#include "lmlc/frontend.h"
#include "lmlc/rng.h"
#include "lmlc/synthetic.h"

using namespace lmlc;
using frontend::SyntheticConfig;

namespace {

audio::Wave Sine(double freq, double seconds, int rate, double amp = 0.4) {
  audio::Wave w;
  w.sample_rate = rate;
  int64_t n = static_cast<int64_t>(std::llround(seconds * rate));
  w.samples.resize(n);
  for (int64_t i = 0; i < n; ++i)
    w.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq * i / rate);
  return w;
}

ag::Var WaveLeaf(const audio::Wave& w) {
  Tensor t({static_cast<int64_t>(w.samples.size())});
  for (size_t i = 0; i < w.samples.size(); ++i) t.at(i) = w.samples[i];
  return ag::Leaf(std::move(t));
}

}  // namespace

TEST_CASE("feature provider emits the advertised shape deterministically") {
  SyntheticConfig cfg;
  auto prov = frontend::MakeSyntheticProviders(7, cfg);
  audio::Wave w = Sine(300.0, 1.0, cfg.sample_rate);
  frontend::FeatureSequence f1 = prov.feature->Extract(w);
  frontend::FeatureSequence f2 = prov.feature->Extract(w);
  CHECK(f1.frames.cols() == prov.feature->dim());
  CHECK(f1.frame_rate == doctest::Approx(cfg.frame_rate()));
  int64_t want_t = static_cast<int64_t>(w.samples.size()) / cfg.hop;
  CHECK(std::abs(f1.frames.rows() - want_t) <= 1);
  REQUIRE(f1.frames.same_shape(f2.frames));
  for (int64_t i = 0; i < f1.frames.numel(); ++i)
    CHECK(f1.frames.at(i) == f2.frames.at(i));
}

TEST_CASE("feature extraction backpropagates into the waveform") {
  SyntheticConfig cfg;
  auto prov = frontend::MakeSyntheticProviders(8, cfg);
  audio::Wave w = Sine(250.0, 0.5, cfg.sample_rate);
  ag::Var wave = WaveLeaf(w);
  ag::Var feats = prov.feature->ExtractVar(wave);
  ag::Backward(ag::MeanAll(ag::Mul(feats, feats)));
  REQUIRE(wave->grad.numel() == wave->value.numel());
  double g = 0.0;
  for (int64_t i = 0; i < wave->grad.numel(); ++i)
    g += std::abs(wave->grad.at(i));
  CHECK(g > 0.0);
}

TEST_CASE("pitch provider frames at its advertised rate") {
  SyntheticConfig cfg;
  auto prov = frontend::MakeSyntheticProviders(9, cfg);
  audio::Wave w = Sine(220.0, 1.0, cfg.sample_rate);
  frontend::PitchSequence p = prov.pitch->Extract(w);
  CHECK(p.frame_rate == doctest::Approx(prov.pitch->frame_rate()));
  double want = w.duration_s() * p.frame_rate;
  CHECK(std::abs(static_cast<double>(p.values.size()) - want) <= 2.0);
  int voiced = 0;
  for (double f : p.values)
    if (f > 0.0) {
      ++voiced;
      CHECK(std::abs(f - 220.0) < 220.0 * 0.1);
    }
  CHECK(voiced > static_cast<int>(p.values.size()) / 2);
}

TEST_CASE("teacher forced logits give one row per target") {
  SyntheticConfig cfg;
  auto prov = frontend::MakeSyntheticProviders(10, cfg);
  audio::Wave w = Sine(260.0, 0.6, cfg.sample_rate);
  std::vector<int> targets = {3, 5, 2, 1};
  ag::Var logits = prov.asr->StepLogits(ag::Constant(WaveLeaf(w)->value),
                                        targets);
  CHECK(logits->value.rows() == 4);
  CHECK(logits->value.cols() == prov.asr->vocab_size());
  CHECK(logits->value.all_finite());
}

TEST_CASE("greedy transcription is deterministic and never empty") {
  SyntheticConfig cfg;
  auto prov = frontend::MakeSyntheticProviders(11, cfg);
  audio::Wave w = Sine(280.0, 0.8, cfg.sample_rate);
  frontend::TokenSequence a = frontend::AsrGreedyTranscribe(*prov.asr, w);
  frontend::TokenSequence b = frontend::AsrGreedyTranscribe(*prov.asr, w);
  CHECK(a.tokens == b.tokens);
  CHECK(a.vocab_size == prov.asr->vocab_size());
  CHECK_FALSE(a.tokens.empty());  // end token banned at the first step
  for (int t : a.tokens) {
    CHECK(t != prov.asr->begin_token());
    CHECK(t != prov.asr->end_token());
  }
}

TEST_CASE("greedy transcription truncates at the cap") {
  SyntheticConfig cfg;
  auto prov = frontend::MakeSyntheticProviders(11, cfg);
  audio::Wave w = Sine(280.0, 0.8, cfg.sample_rate);
  frontend::TokenSequence full = frontend::AsrGreedyTranscribe(*prov.asr, w);
  // The flag marks exactly the runs that hit the cap.
  CHECK(full.truncated == (static_cast<int>(full.tokens.size()) == 448));
  REQUIRE(full.tokens.size() >= 2);
  frontend::TokenSequence cut = frontend::AsrGreedyTranscribe(
      *prov.asr, w, static_cast<int>(full.tokens.size()) - 1);
  CHECK(cut.truncated);
  CHECK(cut.tokens.size() == full.tokens.size() - 1);

  // A decoder that stops on its own keeps the flag clear.
  frontend::TableAsr table({5, 3, 7}, 16, cfg.sample_rate);
  frontend::TokenSequence done = frontend::AsrGreedyTranscribe(table, w);
  CHECK_FALSE(done.truncated);
  CHECK(done.tokens == std::vector<int>{5, 3, 7});
  frontend::TokenSequence capped = frontend::AsrGreedyTranscribe(table, w, 2);
  CHECK(capped.truncated);
  CHECK(capped.tokens.size() == 2);
}

TEST_CASE("uniform adapter spreads probability evenly") {
  frontend::UniformAsr asr(16, 8000);
  audio::Wave w = Sine(200.0, 0.3, 8000);
  std::vector<int> targets = {4, 9};
  ag::Var logits = asr.StepLogits(ag::Constant(WaveLeaf(w)->value), targets);
  for (int64_t i = 0; i < logits->value.numel(); ++i)
    CHECK(logits->value.at(i) == 0.0);
  auto next = asr.NextLogits(w, {});
  REQUIRE(next.size() == 16);
}

TEST_CASE("table adapter recites its table then stops") {
  std::vector<int> table = {5, 3, 7};
  frontend::TableAsr asr(table, 16, 8000, 20.0);
  audio::Wave w = Sine(200.0, 0.3, 8000);
  frontend::TokenSequence seq = frontend::AsrGreedyTranscribe(asr, w);
  CHECK(seq.tokens == table);
  CHECK_FALSE(seq.truncated);

  // The margin shows up directly in the next-token logits.
  auto next = asr.NextLogits(w, {5});
  REQUIRE(next.size() == 16);
  double best = next[3];
  for (size_t i = 0; i < next.size(); ++i)
    if (i != 3) CHECK(best - next[i] >= 20.0 - 1e-9);
}

TEST_CASE("sine token recognizer reads back its own corpus exactly") {
  synthetic::SineCorpusConfig scc;
  frontend::SineTokenAsr asr(scc.vocab(), scc.sample_rate, scc.burst_s);
  Rng rng(12);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<int> tokens;
    int n = 4 + static_cast<int>(rng.UniformInt(4));
    for (int i = 0; i < n; ++i)
      tokens.push_back(2 + static_cast<int>(rng.UniformInt(scc.n_word_tokens)));
    synthetic::SynthUtterance utt = synthetic::MakeSineUtterance(tokens, scc);
    frontend::TokenSequence got = frontend::AsrGreedyTranscribe(asr, utt.clip);
    CHECK(got.tokens == tokens);
  }
}

TEST_CASE("sine token text form is stable") {
  synthetic::SineCorpusConfig scc;
  frontend::SineTokenAsr asr(scc.vocab(), scc.sample_rate, scc.burst_s);
  CHECK(asr.TokensToText({2, 9, 4}) == "w2 w9 w4");
}

TEST_CASE("sine corpus text matches its token ids") {
  synthetic::SineCorpusConfig scc;
  auto corpus = synthetic::MakeSineCorpus(99, 4, scc);
  REQUIRE(corpus.size() == 4);
  frontend::SineTokenAsr asr(scc.vocab(), scc.sample_rate, scc.burst_s);
  for (const auto& utt : corpus) {
    CHECK(utt.text == asr.TokensToText(utt.tokens));
    CHECK(utt.alignments.size() == utt.tokens.size());
    for (size_t i = 1; i < utt.alignments.size(); ++i)
      CHECK(utt.alignments[i].start_s >= utt.alignments[i - 1].end_s - 1e-9);
  }
}

TEST_CASE("text embeddings are unit rows and token determined") {
  SyntheticConfig cfg;
  auto prov = frontend::MakeSyntheticProviders(13, cfg);
  Tensor e = prov.text_lm->Embed({"he", "llo", "he"});
  REQUIRE(e.rows() == 3);
  REQUIRE(e.cols() == prov.text_lm->dim());
  for (int64_t i = 0; i < 3; ++i) {
    double sq = 0.0;
    for (int64_t d = 0; d < e.cols(); ++d) sq += e.row(i)[d] * e.row(i)[d];
    CHECK(sq == doctest::Approx(1.0).epsilon(1e-9));
  }
  for (int64_t d = 0; d < e.cols(); ++d)
    CHECK(e.row(0)[d] == e.row(2)[d]);  // same token, same row
  double diff = 0.0;
  for (int64_t d = 0; d < e.cols(); ++d)
    diff += std::abs(e.row(0)[d] - e.row(1)[d]);
  CHECK(diff > 1e-3);
}

TEST_CASE("provider seeds are independent per component") {
  SyntheticConfig cfg;
  auto a = frontend::MakeSyntheticProviders(1, cfg);
  auto b = frontend::MakeSyntheticProviders(2, cfg);
  audio::Wave w = Sine(290.0, 0.5, cfg.sample_rate);
  Tensor fa = a.feature->Extract(w).frames;
  Tensor fb = b.feature->Extract(w).frames;
  REQUIRE(fa.same_shape(fb));
  double diff = 0.0;
  for (int64_t i = 0; i < fa.numel(); ++i)
    diff += std::abs(fa.at(i) - fb.at(i));
  CHECK(diff > 1e-6);  // different seeds, different projections

  auto a2 = frontend::MakeSyntheticProviders(1, cfg);
  Tensor fa2 = a2.feature->Extract(w).frames;
  for (int64_t i = 0; i < fa.numel(); ++i) CHECK(fa.at(i) == fa2.at(i));
}

TEST_CASE("ttr speech provider differs from the codec feature provider") {
  SyntheticConfig cfg;
  auto prov = frontend::MakeSyntheticProviders(14, cfg);
  REQUIRE(prov.ttr_speech != nullptr);
  CHECK(prov.ttr_speech->dim() == cfg.ttr_dim);
  CHECK(prov.feature->dim() == cfg.feature_dim);
  audio::Wave w = Sine(310.0, 0.5, cfg.sample_rate);
  Tensor f = prov.ttr_speech->Extract(w).frames;
  CHECK(f.cols() == cfg.ttr_dim);
}
