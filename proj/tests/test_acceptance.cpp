// test_acceptance.cpp

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

// Release gate: one behavioral guarantee per line, each checked against an
// oracle written independently of the library code.  Run it directly or
// through ctest; any FAIL line is a blocker.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lmlc/bitstream.h"
#include "lmlc/codec.h"
#include "lmlc/eval.h"
#include "lmlc/frontend.h"
#include "lmlc/losses.h"
#include "lmlc/rng.h"
#include "lmlc/synthetic.h"
#include "lmlc/trainer.h"
#include "lmlc/ttr.h"
#include "lmlc/vq.h"

using namespace lmlc;

namespace {

void Require(bool cond, const std::string& msg) {
  if (!cond) throw std::runtime_error(msg);
}

template <typename T>
std::string Str(const std::string& what, T got, T want) {
  std::ostringstream os;
  os << what << ": got " << got << ", want " << want;
  return os.str();
}

Tensor RandomTensor(Rng& rng, std::vector<int64_t> shape, double scale) {
  Tensor t(shape);
  for (int64_t i = 0; i < t.numel(); ++i) t.at(i) = scale * rng.Gaussian();
  return t;
}

double GradNorm(const ag::Var& v) {
  if (v->grad.numel() == 0) return 0.0;
  double s = 0.0;
  for (int64_t i = 0; i < v->grad.numel(); ++i) s += v->grad.at(i) * v->grad.at(i);
  return std::sqrt(s);
}

// Naive double-loop transcription of the regularizer definition.
double NaiveTtr(const Tensor& s, const Tensor& t) {
  int64_t n = s.rows(), d = s.cols();
  auto dot = [&](const Tensor& a, int64_t i, const Tensor& b, int64_t j) {
    double acc = 0.0;
    for (int64_t k = 0; k < d; ++k) acc += a.at(i, k) * b.at(j, k);
    return acc;
  };
  double cos_term = 0.0;
  for (int64_t i = 0; i < n; ++i) {
    double ns = std::sqrt(dot(s, i, s, i)), nt = std::sqrt(dot(t, i, t, i));
    cos_term += 1.0 - dot(s, i, t, i) / (ns * nt);
  }
  cos_term /= static_cast<double>(n);
  double gram = 0.0;
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = i; j < n; ++j) {
      double diff = dot(s, i, s, j) - dot(t, i, t, j);
      gram += diff * diff;
    }
  gram *= 2.0 / (static_cast<double>(n) * static_cast<double>(n + 1));
  return cos_term + gram;
}

int NaiveEditDistance(const std::vector<std::string>& a,
                      const std::vector<std::string>& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

// Independent BS.1770 integrated loudness for 48 kHz input, built from the
// published filter coefficients.
double NaiveLoudness48k(const std::vector<double>& x) {
  const double b0a[] = {1.53512485958697, -2.69169618940638, 1.19839281085285};
  const double a0a[] = {1.0, -1.69065929318241, 0.73248077421585};
  const double b0b[] = {1.0, -2.0, 1.0};
  const double a0b[] = {1.0, -1.99004745483398, 0.99007225036621};
  std::vector<double> y(x.size()), z(x.size());
  double w1 = 0, w2 = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double w0 = x[i] - a0a[1] * w1 - a0a[2] * w2;
    y[i] = b0a[0] * w0 + b0a[1] * w1 + b0a[2] * w2;
    w2 = w1;
    w1 = w0;
  }
  w1 = w2 = 0;
  for (size_t i = 0; i < y.size(); ++i) {
    double w0 = y[i] - a0b[1] * w1 - a0b[2] * w2;
    z[i] = b0b[0] * w0 + b0b[1] * w1 + b0b[2] * w2;
    w2 = w1;
    w1 = w0;
  }
  const size_t block = 48000 * 2 / 5;
  const size_t hop = block / 4;
  std::vector<double> lk;
  for (size_t start = 0; start + block <= z.size(); start += hop) {
    double ms = 0.0;
    for (size_t i = start; i < start + block; ++i) ms += z[i] * z[i];
    ms /= static_cast<double>(block);
    lk.push_back(-0.691 + 10.0 * std::log10(ms + 1e-300));
  }
  double sum = 0.0;
  size_t count = 0;
  for (double l : lk)
    if (l > -70.0) {
      sum += std::pow(10.0, (l + 0.691) / 10.0);
      ++count;
    }
  Require(count > 0, "loudness oracle: all blocks gated");
  double gamma_r = -0.691 + 10.0 * std::log10(sum / count) - 10.0;
  sum = 0.0;
  count = 0;
  for (double l : lk)
    if (l > -70.0 && l > gamma_r) {
      sum += std::pow(10.0, (l + 0.691) / 10.0);
      ++count;
    }
  Require(count > 0, "loudness oracle: relative gate removed everything");
  return -0.691 + 10.0 * std::log10(sum / count);
}

data::TrainingSegment SegmentFromUtterance(const synthetic::SynthUtterance& u,
                                           const std::string& source) {
  data::TrainingSegment seg;
  seg.clip = u.clip;
  seg.alignments = u.alignments;
  seg.source_text_id = source;
  seg.start_utterance_id = source + "-0";
  seg.text = u.text;
  seg.duration_s = u.clip.duration_s();
  return seg;
}

std::vector<data::TrainingSegment> MakeSegments(uint64_t seed, int n,
                                                int tokens_per_utt) {
  synthetic::SineCorpusConfig scc;
  Rng rng(seed);
  std::vector<data::TrainingSegment> out;
  for (int i = 0; i < n; ++i) {
    std::vector<int> tokens;
    for (int t = 0; t < tokens_per_utt; ++t)
      tokens.push_back(2 + static_cast<int>(rng.UniformInt(scc.n_word_tokens)));
    out.push_back(SegmentFromUtterance(
        synthetic::MakeSineUtterance(tokens, scc), "line" + std::to_string(i)));
  }
  return out;
}

double Smoothed(const std::vector<trainer::LogEntry>& log, int64_t step,
                int64_t window) {
  double sum = 0.0;
  int64_t count = 0;
  for (const auto& e : log)
    if (e.step > step - window && e.step <= step) {
      sum += e.total;
      ++count;
    }
  Require(count > 0, "no log entries near step " + std::to_string(step));
  return sum / static_cast<double>(count);
}

uint64_t ModuleHash(const codec::Codec& c, codec::Module m) {
  nn::ParamMap pm = c.Params(m);
  return HashParams(pm);
}

// ---------------------------------------------------------------------------

// Regularizer value agrees with the naive double-loop evaluation on 1000
// random instances, within 1e-9.
void RegularizerOracle() {
  Rng rng(21);
  for (int trial = 0; trial < 1000; ++trial) {
    int64_t n = 1 + static_cast<int64_t>(rng.UniformInt(8));
    int64_t d = 2 + static_cast<int64_t>(rng.UniformInt(15));
    Tensor s = RandomTensor(rng, {n, d}, 1.0);
    Tensor t = RandomTensor(rng, {n, d}, 1.0);
    double got = losses::TtrLoss(ag::Constant(s), ag::Constant(t))
                     ->value.item();
    double want = NaiveTtr(s, t);
    Require(std::abs(got - want) <= 1e-9,
            Str("regularizer trial " + std::to_string(trial), got, want));
  }
}

// Analytic gradient of the regularizer vs central finite differences over
// every entry of the speech-side matrix, 20 instances, rel error < 1e-5.
void RegularizerGradient() {
  Rng rng(22);
  const double h = 1e-6;
  for (int trial = 0; trial < 20; ++trial) {
    int64_t n = 1 + static_cast<int64_t>(rng.UniformInt(5));
    int64_t d = 2 + static_cast<int64_t>(rng.UniformInt(7));
    Tensor s0 = RandomTensor(rng, {n, d}, 1.0);
    Tensor t = RandomTensor(rng, {n, d}, 1.0);
    ag::Var s = ag::Leaf(s0);
    ag::Var loss = losses::TtrLoss(s, ag::Constant(t));
    ag::Backward(loss);
    for (int64_t i = 0; i < s0.numel(); ++i) {
      Tensor plus = s0, minus = s0;
      plus.at(i) += h;
      minus.at(i) -= h;
      double lp =
          losses::TtrLoss(ag::Constant(plus), ag::Constant(t))->value.item();
      double lm =
          losses::TtrLoss(ag::Constant(minus), ag::Constant(t))->value.item();
      double fd = (lp - lm) / (2.0 * h);
      double got = s->grad.at(i);
      double rel = std::abs(got - fd) / std::max({1.0, std::abs(fd),
                                                  std::abs(got)});
      Require(rel < 1e-5, Str("regularizer grad entry", got, fd));
    }
  }
}

// Uniform logits over 16 symbols cost exactly ln 16; a high-margin one-hot
// table costs nearly zero; the target tokens are inputs, not functions of
// the synthesized audio.
void TranscriptionLossCalibration() {
  audio::Wave clip;
  clip.sample_rate = 8000;
  clip.samples.assign(4000, 0.0);
  for (size_t i = 0; i < clip.samples.size(); ++i)
    clip.samples[i] = 0.3 * std::sin(2.0 * std::numbers::pi * 300.0 * i / 8000.0);
  ag::Var wave = ag::Leaf(Tensor({4000}, clip.samples));

  frontend::UniformAsr uniform(16, 8000);
  frontend::TokenSequence targets;
  targets.tokens = {2, 3, 4};
  targets.vocab_size = 16;
  double got = losses::AsrLoss(uniform, wave, targets)->value.item();
  Require(std::abs(got - std::log(16.0)) <= 1e-6,
          Str("uniform logits", got, std::log(16.0)));

  frontend::TableAsr table({5, 3, 7}, 16, 8000, 20.0);
  frontend::TokenSequence hot;
  hot.tokens = {5, 3, 7};
  hot.vocab_size = 16;
  double near_zero = losses::AsrLoss(table, wave, hot)->value.item();
  Require(near_zero >= 0.0 && near_zero < 1e-4,
          Str("one-hot margin", near_zero, 0.0));

  // Targets stay fixed while the synthesized audio varies.
  synthetic::SineCorpusConfig scc;
  frontend::SineTokenAsr sine_asr(scc.vocab(), scc.sample_rate, scc.burst_s);
  auto utt = synthetic::MakeSineUtterance({4, 9, 2, 11}, scc);
  frontend::TokenSequence fixed =
      frontend::AsrGreedyTranscribe(sine_asr, utt.clip);
  std::vector<int> before = fixed.tokens;
  Require(!before.empty(), "clean transcription came back empty");

  auto alt = synthetic::MakeSineUtterance({7, 7, 7, 7}, scc);
  ag::Var w1 = ag::Leaf(Tensor(
      {static_cast<int64_t>(utt.clip.samples.size())}, utt.clip.samples));
  ag::Var w2 = ag::Leaf(Tensor(
      {static_cast<int64_t>(alt.clip.samples.size())}, alt.clip.samples));
  double l1 = losses::AsrLoss(sine_asr, w1, fixed)->value.item();
  double l2 = losses::AsrLoss(sine_asr, w2, fixed)->value.item();
  Require(fixed.tokens == before, "targets mutated by the loss");
  Require(l1 < l2, Str("matching audio should cost less", l1, l2));
  ag::Var loss = losses::AsrLoss(sine_asr, w1, fixed);
  ag::Backward(loss);
  Require(GradNorm(w1) > 0.0, "no gradient into the synthesized audio");
}

// Quantizer: indices equal brute-force nearest neighbor on 1000 instances,
// EMA statistics match an independent accumulation for four decay values,
// and dead-code reinit leaves used entries bitwise untouched.
void QuantizerExactness() {
  Rng rng(23);
  for (int trial = 0; trial < 1000; ++trial) {
    int64_t k = 2 + static_cast<int64_t>(rng.UniformInt(7));
    int64_t d = 1 + static_cast<int64_t>(rng.UniformInt(6));
    int64_t n = 1 + static_cast<int64_t>(rng.UniformInt(10));
    vq::Codebook cb = vq::InitCodebook(k, d, rng);
    Tensor latents = RandomTensor(rng, {n, d}, 1.0);
    if (trial % 7 == 0 && n > 1)
      std::memcpy(latents.row(0), cb.entries.row(k - 1),
                  sizeof(double) * d);
    std::vector<int> got = vq::NearestIndices(cb, latents);
    for (int64_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = 1e300;
      for (int64_t c = 0; c < k; ++c) {
        double dist = 0.0;
        for (int64_t j = 0; j < d; ++j) {
          double diff = latents.at(i, j) - cb.entries.at(c, j);
          dist += diff * diff;
        }
        if (dist < best_d) {
          best_d = dist;
          best = static_cast<int>(c);
        }
      }
      Require(got[i] == best, Str("nearest index", got[i], best));
    }
  }

  for (double gamma : {0.0, 0.5, 0.99, 1.0}) {
    Rng r2(24);
    vq::Codebook cb = vq::InitCodebook(4, 3, r2);
    Tensor latents = RandomTensor(r2, {9, 3}, 1.0);
    std::vector<int> idx = vq::NearestIndices(cb, latents);
    Tensor want_cluster = cb.ema_cluster;
    Tensor want_sum = cb.ema_sum;
    Tensor count = Tensor::Zeros({4});
    Tensor batch_sum = Tensor::Zeros({4, 3});
    for (int64_t i = 0; i < 9; ++i) {
      count.at(idx[i]) += 1.0;
      for (int64_t j = 0; j < 3; ++j)
        batch_sum.at(idx[i], j) += latents.at(i, j);
    }
    for (int64_t c = 0; c < 4; ++c) {
      want_cluster.at(c) =
          gamma * want_cluster.at(c) + (1.0 - gamma) * count.at(c);
      for (int64_t j = 0; j < 3; ++j)
        want_sum.at(c, j) =
            gamma * want_sum.at(c, j) + (1.0 - gamma) * batch_sum.at(c, j);
    }
    vq::EmaUpdate(cb, latents, idx, gamma);
    for (int64_t c = 0; c < 4; ++c) {
      Require(std::abs(cb.ema_cluster.at(c) - want_cluster.at(c)) <= 1e-12,
              Str("ema cluster", cb.ema_cluster.at(c), want_cluster.at(c)));
      for (int64_t j = 0; j < 3; ++j) {
        double want_entry =
            want_sum.at(c, j) / std::max(want_cluster.at(c), cb.eps);
        Require(std::abs(cb.ema_sum.at(c, j) - want_sum.at(c, j)) <= 1e-12,
                Str("ema sum", cb.ema_sum.at(c, j), want_sum.at(c, j)));
        Require(std::abs(cb.entries.at(c, j) - want_entry) <= 1e-12,
                Str("ema entry", cb.entries.at(c, j), want_entry));
      }
    }
  }

  Rng r3(25);
  vq::Codebook cb = vq::InitCodebook(6, 3, r3);
  Tensor latents = RandomTensor(r3, {8, 3}, 1.0);
  std::vector<int> idx = vq::NearestIndices(cb, latents);
  std::vector<int64_t> usage = vq::CountUsage(idx, 6);
  Tensor before = cb.entries;
  vq::ReinitDeadCodes(cb, usage, latents, r3);
  bool any_dead = false;
  for (int64_t c = 0; c < 6; ++c) {
    if (usage[c] > 0) {
      Require(std::memcmp(cb.entries.row(c), before.row(c),
                          sizeof(double) * 3) == 0,
              "used entry moved during reinit");
    } else {
      any_dead = true;
    }
  }
  Require(any_dead, "fixture produced no dead codes; pick another seed");
}

// Straight-through contract: for a quadratic loss on the quantized output,
// the gradient reaching the pre-quantization latents equals the gradient at
// the quantized values, elementwise and exactly.
void StraightThrough() {
  Rng rng(26);
  vq::Codebook cb = vq::InitCodebook(5, 4, rng);
  Tensor l0 = RandomTensor(rng, {7, 4}, 1.0);
  ag::Var latents = ag::Leaf(l0);
  vq::QuantizeResult q = vq::Quantize(cb, latents);
  ag::Var loss = ag::SumAll(ag::Mul(q.quantized, q.quantized));
  ag::Backward(loss);
  Require(latents->grad.numel() == l0.numel(), "no gradient at latents");
  for (int64_t i = 0; i < l0.numel(); ++i) {
    double want = 2.0 * q.quantized->value.at(i);
    Require(latents->grad.at(i) == want,
            Str("straight-through entry", latents->grad.at(i), want));
  }
}

// Branch rates times index widths give exactly 187.5 and 212.5 bps.
void BitrateArithmetic() {
  Require(bitstream::Bitrate(32, 25.0, 32, 12.5) == 187.5,
          Str("bitrate", bitstream::Bitrate(32, 25.0, 32, 12.5), 187.5));
  Require(bitstream::Bitrate(64, 25.0, 32, 12.5) == 212.5,
          Str("bitrate", bitstream::Bitrate(64, 25.0, 32, 12.5), 212.5));
  Require(codec::CodecProfile::Paper(32).bitrate() == 187.5,
          "32-entry profile bitrate is off");
  Require(codec::CodecProfile::Paper(64).bitrate() == 212.5,
          "64-entry profile bitrate is off");
}

// 1000 random code streams survive pack/unpack unchanged; corrupted headers
// raise structured format errors instead of crashing or mis-decoding.
void BitstreamRoundTrip() {
  std::mt19937 gen(27);
  for (int trial = 0; trial < 1000; ++trial) {
    bitstream::CodeStream cs;
    cs.sample_rate = 8000 + 8000 * (gen() % 3);
    cs.k_sem = static_cast<uint16_t>(1 + gen() % 128);
    cs.k_pitch = static_cast<uint16_t>(1 + gen() % 64);
    cs.rate_sem = 25.0f;
    cs.rate_pitch = 12.5f;
    int ns = static_cast<int>(gen() % 200), np = static_cast<int>(gen() % 100);
    for (int i = 0; i < ns; ++i)
      cs.semantic_indices.push_back(static_cast<int>(gen() % cs.k_sem));
    for (int i = 0; i < np; ++i)
      cs.pitch_indices.push_back(static_cast<int>(gen() % cs.k_pitch));
    std::vector<uint8_t> bytes = bitstream::Pack(cs);
    bitstream::CodeStream back = bitstream::Unpack(bytes);
    Require(back == cs, "round trip changed the stream");

    if (trial < 50) {
      // The first five bytes are magic and version; flipping any one of
      // them must surface as a structured format error.
      std::vector<uint8_t> bad = bytes;
      bad[trial % 5] ^= 0xff;
      bool structured = false;
      try {
        bitstream::Unpack(bad);
      } catch (const Error& e) {
        structured = e.kind() == ErrorKind::kFormat;
      }
      Require(structured, "corrupt header accepted");
    }
  }
  bitstream::CodeStream probe;
  probe.k_sem = 4;
  probe.k_pitch = 4;
  probe.rate_sem = 25.0f;
  probe.rate_pitch = 12.5f;
  probe.sample_rate = 8000;
  probe.semantic_indices = {0, 1, 2, 3};
  probe.pitch_indices = {3, 2};
  std::vector<uint8_t> bytes = bitstream::Pack(probe);
  for (size_t byte : {size_t{0}, size_t{4}}) {
    std::vector<uint8_t> bad = bytes;
    bad[byte] ^= 0xff;
    bool threw = false;
    try {
      bitstream::Unpack(bad);
    } catch (const Error& e) {
      threw = e.kind() == ErrorKind::kFormat;
    }
    Require(threw, "corrupt header byte " + std::to_string(byte) +
                       " not rejected");
  }
  std::vector<uint8_t> truncated(bytes.begin(), bytes.begin() + 6);
  bool threw = false;
  try {
    bitstream::Unpack(truncated);
  } catch (const Error& e) {
    threw = e.kind() == ErrorKind::kFormat;
  }
  Require(threw, "truncated header not rejected");
}

// The freeze schedule, table-driven over every stage and variant, plus hash
// invariance of frozen modules across real optimizer steps.
void FreezeSchedule() {
  using codec::Module;
  using trainer::ModState;
  using trainer::Variant;
  struct Row {
    int stage;
    Variant variant;
    Module module;
    ModState want;
  };
  const Row table[] = {
      {1, Variant::kNone, Module::kSemanticEncoder, ModState::kTrainable},
      {1, Variant::kNone, Module::kPitchEncoder, ModState::kTrainable},
      {1, Variant::kNone, Module::kSemanticVq, ModState::kTrainable},
      {1, Variant::kNone, Module::kPitchVq, ModState::kTrainable},
      {1, Variant::kNone, Module::kFeatureDecoders, ModState::kTrainable},
      {1, Variant::kNone, Module::kVocoder, ModState::kIdle},
      {1, Variant::kNone, Module::kDiscriminators, ModState::kIdle},
      {1, Variant::kNone, Module::kTtrStack, ModState::kIdle},
      {2, Variant::kNone, Module::kSemanticEncoder, ModState::kFrozen},
      {2, Variant::kNone, Module::kPitchEncoder, ModState::kFrozen},
      {2, Variant::kNone, Module::kSemanticVq, ModState::kFrozen},
      {2, Variant::kNone, Module::kPitchVq, ModState::kFrozen},
      {2, Variant::kNone, Module::kFeatureDecoders, ModState::kIdle},
      {2, Variant::kNone, Module::kVocoder, ModState::kTrainable},
      {2, Variant::kNone, Module::kDiscriminators, ModState::kTrainable},
      {2, Variant::kNone, Module::kTtrStack, ModState::kIdle},
      {3, Variant::kAsr, Module::kSemanticEncoder, ModState::kTrainable},
      {3, Variant::kAsr, Module::kSemanticVq, ModState::kTrainable},
      {3, Variant::kAsr, Module::kPitchEncoder, ModState::kFrozen},
      {3, Variant::kAsr, Module::kPitchVq, ModState::kFrozen},
      {3, Variant::kAsr, Module::kFeatureDecoders, ModState::kIdle},
      {3, Variant::kAsr, Module::kVocoder, ModState::kTrainable},
      {3, Variant::kAsr, Module::kDiscriminators, ModState::kTrainable},
      {3, Variant::kAsr, Module::kTtrStack, ModState::kIdle},
      {3, Variant::kTtr, Module::kSemanticEncoder, ModState::kTrainable},
      {3, Variant::kTtr, Module::kTtrStack, ModState::kFrozen},
      {3, Variant::kTtr, Module::kFeatureDecoders, ModState::kIdle},
      {3, Variant::kTtr, Module::kPitchEncoder, ModState::kFrozen},
      {3, Variant::kSd, Module::kSemanticEncoder, ModState::kTrainable},
      {3, Variant::kSd, Module::kFeatureDecoders, ModState::kFrozen},
      {3, Variant::kSd, Module::kTtrStack, ModState::kIdle},
      {3, Variant::kSd, Module::kPitchEncoder, ModState::kFrozen},
      {3, Variant::kSd, Module::kPitchVq, ModState::kFrozen},
      {3, Variant::kSd, Module::kVocoder, ModState::kTrainable},
  };
  for (const Row& row : table) {
    trainer::StagePlan plan = trainer::MakeStagePlan(row.stage, row.variant);
    Require(plan.state(row.module) == row.want,
            std::string("stage ") + std::to_string(row.stage) + " " +
                trainer::VariantName(row.variant) + " " +
                codec::ModuleName(row.module) + " state is wrong");
  }

  // Frozen modules keep their hashes across real steps.
  auto segments = MakeSegments(31, 3, 6);
  frontend::Providers prov = frontend::MakeSyntheticProviders(31, {});
  codec::Codec model = codec::Codec::Init(codec::CodecProfile::Tiny(), 31);
  trainer::TrainConfig cfg;
  cfg.max_steps = 3;
  cfg.crop_frames = 8;
  cfg.validate_every = 1000000;
  cfg.seed = 31;
  cfg.asr_max_tokens = 6;
  uint64_t sem_enc = ModuleHash(model, codec::Module::kSemanticEncoder);
  uint64_t pitch_enc = ModuleHash(model, codec::Module::kPitchEncoder);
  uint64_t sem_vq = vq::HashCodebook(model.sem_vq);
  uint64_t pitch_vq = vq::HashCodebook(model.pitch_vq);
  trainer::RunStage(trainer::MakeStagePlan(2, trainer::Variant::kNone), model,
                    segments, segments, prov, nullptr, cfg);
  Require(ModuleHash(model, codec::Module::kSemanticEncoder) == sem_enc,
          "frozen semantic encoder moved in the second stage");
  Require(ModuleHash(model, codec::Module::kPitchEncoder) == pitch_enc,
          "frozen pitch encoder moved in the second stage");
  Require(vq::HashCodebook(model.sem_vq) == sem_vq,
          "frozen semantic codebook moved in the second stage");
  Require(vq::HashCodebook(model.pitch_vq) == pitch_vq,
          "frozen pitch codebook moved in the second stage");

  uint64_t decoders = ModuleHash(model, codec::Module::kFeatureDecoders);
  uint64_t pe = ModuleHash(model, codec::Module::kPitchEncoder);
  uint64_t pvq = vq::HashCodebook(model.pitch_vq);
  trainer::RunStage(trainer::MakeStagePlan(3, trainer::Variant::kSd), model,
                    segments, segments, prov, nullptr, cfg);
  Require(ModuleHash(model, codec::Module::kFeatureDecoders) == decoders,
          "frozen feature decoders moved in the distillation stage");
  Require(ModuleHash(model, codec::Module::kPitchEncoder) == pe,
          "frozen pitch encoder moved in the distillation stage");
  Require(vq::HashCodebook(model.pitch_vq) == pvq,
          "frozen pitch codebook moved in the distillation stage");
}

// Each language-model objective on the decoded audio reaches the semantic
// encoder's input projection; the distillation term never touches the
// vocoder because it terminates at the feature decoders.
void GradientReach() {
  frontend::Providers prov = frontend::MakeSyntheticProviders(41, {});
  auto segments = MakeSegments(41, 1, 6);
  codec::CodecProfile profile = codec::CodecProfile::Tiny();
  trainer::Batch batch = trainer::MakeBatch(segments[0], 40, 0, prov, profile);

  auto synthesize = [&](codec::Codec& m, vq::QuantizeResult* q_sem_out,
                        ag::Var* features_out) {
    ag::Var features = ag::Constant(batch.features);
    ag::Var pitch_in = ag::Constant(batch.pitch_input);
    ag::Var lat_sem = m.sem_enc.Forward(features);
    vq::QuantizeResult q_sem = vq::Quantize(m.sem_vq, lat_sem);
    ag::Var lat_pitch = m.pitch_enc.Forward(pitch_in);
    vq::QuantizeResult q_pitch = vq::Quantize(m.pitch_vq, lat_pitch);
    ag::Var z = m.VocoderInput(q_sem.quantized, q_pitch.quantized);
    ag::Var fake2d = m.vocoder.Forward(z);
    if (q_sem_out) *q_sem_out = q_sem;
    if (features_out) *features_out = features;
    return ag::Reshape(fake2d, {fake2d->value.rows()});
  };
  auto proj_grad = [](const codec::Codec& m) {
    nn::ParamMap pm = m.Params(codec::Module::kSemanticEncoder);
    for (const auto& [name, v] : pm.items())
      if (name == "sem_enc.proj.w") return GradNorm(v);
    throw std::runtime_error("input projection parameter not found");
  };

  {
    codec::Codec m = codec::Codec::Init(profile, 42);
    ag::Var fake = synthesize(m, nullptr, nullptr);
    frontend::TokenSequence targets =
        frontend::AsrGreedyTranscribe(*prov.asr, batch.crop, 12);
    Require(!targets.tokens.empty(), "transcriber returned no tokens");
    ag::Var loss = losses::AsrLoss(*prov.asr, fake, targets);
    ag::Backward(loss);
    Require(proj_grad(m) > 0.0,
            "transcription loss fails to reach the semantic encoder");
  }
  {
    codec::Codec m = codec::Codec::Init(profile, 43);
    ttr::TtrStack stack(16, 4, 32, 2, 43);
    ag::Var fake = synthesize(m, nullptr, nullptr);
    ag::Var loss = ttr::CodecLoss(fake, batch.aligns, stack, prov);
    ag::Backward(loss);
    Require(proj_grad(m) > 0.0,
            "regularizer loss fails to reach the semantic encoder");
  }
  {
    codec::Codec m = codec::Codec::Init(profile, 44);
    vq::QuantizeResult q_sem;
    ag::Var features;
    ag::Var fake = synthesize(m, &q_sem, &features);
    (void)fake;
    ag::Var rec = m.sem_dec.Forward(q_sem.quantized, batch.features.rows());
    ag::Var loss = losses::SdLoss(features, rec);
    ag::Backward(loss);
    Require(proj_grad(m) > 0.0,
            "distillation loss fails to reach the semantic encoder");
    nn::ParamMap voc = m.Params(codec::Module::kVocoder);
    for (const auto& [name, v] : voc.items())
      Require(GradNorm(v) == 0.0,
              "distillation gradient leaked into vocoder parameter " + name);
  }
}

// All three stages train end to end on a synthetic corpus and the smoothed
// total loss goes down; the early-stop counter fires at exactly
// best_step + patience.
void SmokeTraining() {
  auto segments = MakeSegments(51, 8, 6);
  frontend::Providers prov = frontend::MakeSyntheticProviders(51, {});
  codec::Codec model = codec::Codec::Init(codec::CodecProfile::Tiny(), 51);
  ttr::TtrStack stack(16, 4, 32, 2, 51);

  trainer::TrainConfig cfg;
  cfg.max_steps = 300;
  cfg.crop_frames = 8;
  cfg.validate_every = 1000000;
  cfg.seed = 51;
  cfg.asr_max_tokens = 6;

  auto check_decrease = [&](const trainer::TrainResult& r, const char* tag) {
    Require(static_cast<int64_t>(r.log.size()) == cfg.max_steps,
            std::string(tag) + ": run did not complete");
    double early = Smoothed(r.log, 20, 20);
    double late = Smoothed(r.log, 300, 20);
    Require(late < early, std::string(tag) + ": smoothed loss rose from " +
                              std::to_string(early) + " to " +
                              std::to_string(late));
  };

  trainer::TrainResult r1 = trainer::RunStage(
      trainer::MakeStagePlan(1, trainer::Variant::kNone), model, segments,
      segments, prov, nullptr, cfg);
  check_decrease(r1, "feature stage");
  trainer::TrainResult r2 = trainer::RunStage(
      trainer::MakeStagePlan(2, trainer::Variant::kNone), model, segments,
      segments, prov, nullptr, cfg);
  check_decrease(r2, "vocoder stage");

  Checkpoint base;
  model.SaveTo(base);
  const trainer::Variant variants[] = {
      trainer::Variant::kAsr, trainer::Variant::kTtr, trainer::Variant::kSd};
  for (trainer::Variant v : variants) {
    codec::Codec m3 = codec::Codec::Init(codec::CodecProfile::Tiny(), 52);
    m3.LoadFrom(base);
    trainer::TrainResult r3 = trainer::RunStage(
        trainer::MakeStagePlan(3, v), m3, segments, segments, prov,
        v == trainer::Variant::kTtr ? &stack : nullptr, cfg);
    check_decrease(r3, trainer::VariantName(v));
  }

  trainer::EarlyStop es;
  es.patience = 100000;
  es.Observe(1000, 5.0);
  es.Observe(2000, 4.0);
  es.Observe(3000, 4.5);
  Require(!es.ShouldStop(101999), "stop fired one step early");
  Require(es.ShouldStop(102000), "stop missed best_step + patience");

  trainer::EarlyStop scaled;
  scaled.patience = 100;
  scaled.Observe(7, 1.0);
  Require(!scaled.ShouldStop(106), "scaled stop fired one step early");
  Require(scaled.ShouldStop(107), "scaled stop missed best_step + patience");
}

// Word error rate agrees with a full dynamic-programming oracle on 1000
// random cases, and the canonical rates come out exact.
void ErrorRateOracle() {
  std::mt19937 gen(61);
  std::uniform_int_distribution<int> len(0, 10), voc(0, 4);
  const char* words[] = {"aa", "bb", "cc", "dd", "ee"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> ref, hyp;
    int nr = len(gen), nh = len(gen);
    for (int i = 0; i < nr; ++i) ref.push_back(words[voc(gen)]);
    for (int i = 0; i < nh; ++i) hyp.push_back(words[voc(gen)]);
    int64_t got = eval::EditDistance(ref, hyp).total();
    int want = NaiveEditDistance(ref, hyp);
    Require(got == want, Str("edit distance", got, int64_t{want}));
  }
  Require(eval::Wer(eval::SplitWords("a b c d e"),
                    eval::SplitWords("a b c d e")) == 0.0,
          "identical words should score zero");
  Require(eval::Wer(eval::SplitWords("a b c d e"),
                    eval::SplitWords("a b x d e")) == 20.0,
          "one substitution in five should score twenty");
  Require(eval::Wer(eval::SplitWords("a b c d"),
                    eval::SplitWords("a c d e")) == 50.0,
          "one deletion plus one insertion against four should score fifty");
}

// Pretraining the regularizer stack on one clip halves the loss and touches
// nothing outside the summarizer and aggregator.
void RegularizerPretrainOverfit() {
  frontend::Providers prov = frontend::MakeSyntheticProviders(71, {});
  synthetic::SineCorpusConfig scc;
  auto utt = synthetic::MakeSineUtterance({3, 8, 5, 12, 6, 9}, scc);
  ttr::PretrainItem item{utt.clip, utt.alignments};
  std::vector<ttr::PretrainItem> set = {item};

  ttr::TtrPretrainConfig cfg;
  cfg.learning_rate = 3e-3;
  cfg.max_steps = 2000;
  cfg.validate_every = 100;
  cfg.seed = 71;

  ttr::TtrPretrainConfig init_cfg = cfg;
  init_cfg.max_steps = 0;
  ttr::PretrainResult init = ttr::PretrainTtr(set, set, init_cfg, prov);
  ttr::TtrStack stack(cfg.dim, cfg.heads, cfg.ff, cfg.layers, cfg.seed);
  ttr::LoadStack(init.best, stack);
  double before = ttr::ValidateTtr(stack, set, prov);

  codec::Codec bystander = codec::Codec::Init(codec::CodecProfile::Tiny(), 72);
  uint64_t codec_hash = HashParams(bystander.AllParams());

  ttr::PretrainResult r = ttr::PretrainTtr(set, set, cfg, prov);
  Require(r.best_val <= 0.5 * before,
          Str("overfit loss", r.best_val, 0.5 * before));
  Require(HashParams(bystander.AllParams()) == codec_hash,
          "pretraining touched codec parameters");

  ttr::TtrStack after(cfg.dim, cfg.heads, cfg.ff, cfg.layers, cfg.seed);
  ttr::LoadStack(r.best, after);
  auto group_hash = [](const ttr::TtrStack& s, const std::string& prefix) {
    nn::ParamMap pm = s.Params();
    nn::ParamMap sub;
    for (const auto& [name, v] : pm.items())
      if (name.rfind(prefix, 0) == 0) sub.Add(name, v);
    return HashParams(sub);
  };
  Require(group_hash(after, "summarizer.") != group_hash(stack, "summarizer."),
          "summarizer untouched by pretraining");
  Require(group_hash(after, "aggregator.") != group_hash(stack, "aggregator."),
          "aggregator untouched by pretraining");
}

// The whole evaluation pipeline: pass-through codec plus an exact stand-in
// recognizer scores zero error, the report sorts rates ascending with the
// unencoded reference last, and loudness normalization lands within 0.2 LU
// of an independent meter.
void EvaluationPipeline() {
  synthetic::SineCorpusConfig scc;
  frontend::SineTokenAsr asr(scc.vocab(), scc.sample_rate, scc.burst_s);
  auto corpus = synthetic::MakeSineCorpus(81, 4, scc);
  std::vector<eval::EvalItem> items;
  for (size_t i = 0; i < corpus.size(); ++i)
    items.push_back({"utt" + std::to_string(i), corpus[i].clip,
                     corpus[i].text});

  struct RatedPassthrough : eval::CodecLike {
    audio::Wave Roundtrip(const audio::Wave& clip) const override {
      return clip;
    }
    double bitrate() const override { return 187.5; }
  };

  eval::IdentityCodec reference;
  RatedPassthrough coded;
  eval::AsrAdapterList adapters = {{asr.name(), &asr}};
  eval::EvalReport report;
  report.rows.push_back(
      eval::EvaluateCodec(reference, "-", items, adapters, {}));
  report.rows.push_back(
      eval::EvaluateCodec(coded, "ASR", items, adapters, {}));
  report.Sort();

  Require(report.rows.size() == 2, "report lost a row");
  Require(report.rows[0].bitrate == 187.5, "coded row should sort first");
  Require(std::isinf(report.rows[1].bitrate),
          "unencoded reference should sort last");
  for (const auto& row : report.rows) {
    Require(row.failures.empty(), "evaluation recorded failures");
    Require(row.wer.at(asr.name()).available, "error rate missing");
    Require(row.wer.at(asr.name()).value == 0.0,
            Str("pipeline error rate", row.wer.at(asr.name()).value, 0.0));
  }
  Require(report.ToJson().find("\"inf\"") != std::string::npos,
          "reference rate missing from the json report");
  Require(report.ToTable().find("Rate (bps)") != std::string::npos,
          "table header missing");

  audio::Wave loud;
  loud.sample_rate = 48000;
  loud.samples.resize(48000 * 3);
  for (size_t i = 0; i < loud.samples.size(); ++i)
    loud.samples[i] =
        0.6 * std::sin(2.0 * std::numbers::pi * 997.0 * i / 48000.0);
  audio::Wave leveled = audio::NormalizeLoudness(loud, -24.0);
  double measured = NaiveLoudness48k(leveled.samples);
  Require(std::abs(measured - (-24.0)) <= 0.2,
          Str("normalized loudness", measured, -24.0));
}

struct Criterion {
  const char* name;
  double limit_s;
  std::function<void()> fn;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"regularizer matches double-loop oracle (1000 cases, 1e-9)", 10.0,
       RegularizerOracle},
      {"regularizer gradient matches finite differences (20 cases, 1e-5)",
       30.0, RegularizerGradient},
      {"transcription loss calibration (ln V, one-hot, fixed targets)", 10.0,
       TranscriptionLossCalibration},
      {"quantizer nearest/EMA/reinit match oracles (1000 cases, 1e-12)", 10.0,
       QuantizerExactness},
      {"straight-through gradient equals post-quantization gradient", 10.0,
       StraightThrough},
      {"bitrate arithmetic gives 187.5 and 212.5 bps exactly", 10.0,
       BitrateArithmetic},
      {"bitstream round trip (1000 cases) and header corruption errors", 10.0,
       BitstreamRoundTrip},
      {"freeze schedule table and frozen-hash invariance", 120.0,
       FreezeSchedule},
      {"loss gradients reach the semantic encoder; distillation skips the "
       "vocoder",
       60.0, GradientReach},
      {"smoke training: all stages learn; early stop fires exactly on time",
       600.0, SmokeTraining},
      {"word error rate matches dynamic-programming oracle (1000 cases)",
       10.0, ErrorRateOracle},
      {"regularizer pretraining halves the loss on one clip", 120.0,
       RegularizerPretrainOverfit},
      {"evaluation pipeline: zero WER pass-through, sorted report, loudness "
       "within 0.2 LU",
       60.0, EvaluationPipeline},
  };

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    const Criterion& c = criteria[i];
    auto t0 = std::chrono::steady_clock::now();
    std::string verdict = "PASS";
    std::string detail;
    try {
      c.fn();
    } catch (const std::exception& e) {
      verdict = "FAIL";
      detail = e.what();
      ++failures;
    }
    double secs = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - t0)
                      .count();
    if (verdict == "PASS" && secs > c.limit_s) {
      verdict = "FAIL";
      detail = "exceeded " + std::to_string(c.limit_s) + " s budget";
      ++failures;
    }
    std::printf("[%2zu/%zu] %-72s %s (%.1fs)\n", i + 1, criteria.size(),
                c.name, verdict.c_str(), secs);
    if (!detail.empty()) std::printf("        %s\n", detail.c_str());
  }
  if (failures > 0) {
    std::printf("%d criteria failing\n", failures);
    return 1;
  }
  std::printf("all %zu criteria pass\n", criteria.size());
  return 0;
}
