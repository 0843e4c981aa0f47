// frontend.h

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

#ifndef LMLC_FRONTEND_H_
#define LMLC_FRONTEND_H_

#include <memory>
#include <string>
#include <vector>

#include "lmlc/audio.h"
#include "lmlc/autodiff.h"
#include "lmlc/nn.h"

namespace lmlc {
namespace frontend {

struct FeatureSequence {
  Tensor frames;  // [T, D]
  double frame_rate = 0.0;
  std::string provenance;
};

struct PitchSequence {
  std::vector<double> values;  // Hz, 0 = unvoiced
  double frame_rate = 0.0;
};

struct TokenSequence {
  std::vector<int> tokens;  // real tokens only; begin/end specials stripped
  int vocab_size = 0;
  bool truncated = false;
};

// Frame-level speech embeddings.  The graph path exists because losses on
// decoded audio backpropagate through feature extraction into the waveform.
class FeatureProvider {
 public:
  virtual ~FeatureProvider() = default;
  virtual int expected_sample_rate() const = 0;
  virtual double frame_rate() const = 0;
  virtual int dim() const = 0;
  virtual std::string name() const = 0;
  virtual ag::Var ExtractVar(const ag::Var& wave) const = 0;  // [n] -> [T, D]
  FeatureSequence Extract(const audio::Wave& clip) const;
};

class PitchProvider {
 public:
  virtual ~PitchProvider() = default;
  virtual int expected_sample_rate() const = 0;
  virtual double frame_rate() const = 0;
  virtual PitchSequence Extract(const audio::Wave& clip) const = 0;
};

// Autoregressive scorer over subword tokens, conditioned on audio.
class AsrAdapter {
 public:
  virtual ~AsrAdapter() = default;
  virtual int vocab_size() const = 0;
  virtual int begin_token() const = 0;
  virtual int end_token() const = 0;
  virtual bool differentiable() const = 0;
  virtual int expected_sample_rate() const = 0;
  virtual std::string name() const = 0;
  // Teacher-forced logits, one row per target position: [N, vocab].
  // Row i is conditioned on the begin token plus targets[0 .. i-1].
  virtual ag::Var StepLogits(const ag::Var& wave,
                             const std::vector<int>& targets) const = 0;
  // Logits for the token following `prefix` (real tokens, no specials).
  virtual std::vector<double> NextLogits(
      const audio::Wave& clip, const std::vector<int>& prefix) const = 0;
  virtual std::string TokensToText(const std::vector<int>& tokens) const = 0;
};

// Greedy decode: repeatedly take the argmax next token until the end token
// or max_len, which sets the truncated flag.
TokenSequence AsrGreedyTranscribe(const AsrAdapter& asr,
                                  const audio::Wave& clip, int max_len = 448);

class TextLm {
 public:
  virtual ~TextLm() = default;
  virtual int dim() const = 0;
  virtual Tensor Embed(const std::vector<std::string>& tokens) const = 0;
};

struct Providers {
  std::shared_ptr<FeatureProvider> feature;
  std::shared_ptr<PitchProvider> pitch;
  std::shared_ptr<AsrAdapter> asr;
  std::shared_ptr<TextLm> text_lm;
  std::shared_ptr<FeatureProvider> ttr_speech;
};

struct SyntheticConfig {
  int sample_rate = 8000;
  int feature_dim = 32;
  int ttr_dim = 16;
  int hop = 160;  // frame rate = sample_rate / hop
  int n_fft = 256;
  int n_mels = 16;
  int asr_vocab = 16;
  int asr_dim = 32;
  int asr_heads = 4;
  int asr_ff = 64;
  int asr_layers = 2;
  int asr_mel_hop = 320;
  double frame_rate() const {
    return static_cast<double>(sample_rate) / hop;
  }
};

// Deterministic desk-scale providers standing in for the production speech,
// pitch, recognition, and text models.
Providers MakeSyntheticProviders(uint64_t seed,
                                 const SyntheticConfig& cfg = {});

// All-zero logits: every step distribution is uniform.
class UniformAsr : public AsrAdapter {
 public:
  UniformAsr(int vocab, int sample_rate);
  int vocab_size() const override { return vocab_; }
  int begin_token() const override { return 0; }
  int end_token() const override { return 1; }
  bool differentiable() const override { return true; }
  int expected_sample_rate() const override { return sample_rate_; }
  std::string name() const override { return "uniform"; }
  ag::Var StepLogits(const ag::Var& wave,
                     const std::vector<int>& targets) const override;
  std::vector<double> NextLogits(const audio::Wave& clip,
                                 const std::vector<int>& prefix) const override;
  std::string TokensToText(const std::vector<int>& tokens) const override;

 private:
  int vocab_, sample_rate_;
};

// Emits a fixed token table with a configurable logit margin; an empty table
// means the end token is always the argmax.
class TableAsr : public AsrAdapter {
 public:
  TableAsr(std::vector<int> table, int vocab, int sample_rate,
           double margin = 20.0);
  int vocab_size() const override { return vocab_; }
  int begin_token() const override { return 0; }
  int end_token() const override { return 1; }
  bool differentiable() const override { return true; }
  int expected_sample_rate() const override { return sample_rate_; }
  std::string name() const override { return "table"; }
  ag::Var StepLogits(const ag::Var& wave,
                     const std::vector<int>& targets) const override;
  std::vector<double> NextLogits(const audio::Wave& clip,
                                 const std::vector<int>& prefix) const override;
  std::string TokensToText(const std::vector<int>& tokens) const override;

 private:
  std::vector<int> table_;
  int vocab_, sample_rate_;
  double margin_;
};

// Decodes fixed-length sine bursts by spectral peak: token k maps to a
// distinct frequency, so transcription is amplitude-invariant.  This is the
// "perfect" recognizer for the synthetic sine corpus.
class SineTokenAsr : public AsrAdapter {
 public:
  // Token ids 0 and 1 are begin/end; ids 2 .. vocab-1 carry frequencies.
  SineTokenAsr(int vocab, int sample_rate, double burst_s);
  static double TokenFrequency(int token, int vocab, int sample_rate);
  int vocab_size() const override { return vocab_; }
  int begin_token() const override { return 0; }
  int end_token() const override { return 1; }
  bool differentiable() const override { return true; }
  int expected_sample_rate() const override { return sample_rate_; }
  std::string name() const override { return "sine-token"; }
  ag::Var StepLogits(const ag::Var& wave,
                     const std::vector<int>& targets) const override;
  std::vector<double> NextLogits(const audio::Wave& clip,
                                 const std::vector<int>& prefix) const override;
  std::string TokensToText(const std::vector<int>& tokens) const override;

 private:
  int NumBursts(int64_t n_samples) const;
  int vocab_, sample_rate_;
  double burst_s_;
  std::vector<double> freqs_;  // indexed by token id, 0 for specials
};

}  // namespace frontend
}  // namespace lmlc

#endif  // LMLC_FRONTEND_H_
