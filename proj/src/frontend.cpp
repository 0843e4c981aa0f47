// frontend.cpp

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

#include "lmlc/frontend.h"

#include <cmath>

#include "lmlc/pitch.h"
#include "lmlc/rng.h"
#include "lmlc/stft.h"

namespace lmlc {
namespace frontend {

namespace {

uint64_t Fnv1a(const std::string& s) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

ag::Var WaveConstant(const audio::Wave& clip) {
  return ag::Constant(
      Tensor({static_cast<int64_t>(clip.samples.size())}, clip.samples));
}

}  // namespace

FeatureSequence FeatureProvider::Extract(const audio::Wave& clip) const {
  Check(clip.sample_rate == expected_sample_rate(), ErrorKind::kDomain,
        name(), " expects ", expected_sample_rate(), " Hz, got ",
        clip.sample_rate);
  ag::Var out = ExtractVar(WaveConstant(clip));
  FeatureSequence fs;
  fs.frames = out->value;
  fs.frame_rate = frame_rate();
  fs.provenance = name();
  Check(fs.frames.rows() >= 1, ErrorKind::kShape, name(),
        " produced no frames");
  return fs;
}

TokenSequence AsrGreedyTranscribe(const AsrAdapter& asr,
                                  const audio::Wave& clip, int max_len) {
  Check(!clip.samples.empty(), ErrorKind::kDomain, "empty audio");
  Check(max_len >= 1, ErrorKind::kDomain, "bad max_len");
  TokenSequence out;
  out.vocab_size = asr.vocab_size();
  while (static_cast<int>(out.tokens.size()) < max_len) {
    std::vector<double> logits = asr.NextLogits(clip, out.tokens);
    Check(static_cast<int>(logits.size()) == asr.vocab_size(),
          ErrorKind::kShape, "adapter logit size mismatch");
    // The begin symbol only ever conditions the decoder; never emit it.
    int best = -1;
    for (int i = 0; i < static_cast<int>(logits.size()); ++i) {
      if (i == asr.begin_token()) continue;
      if (best < 0 || logits[i] > logits[best]) best = i;
    }
    if (best == asr.end_token()) return out;
    out.tokens.push_back(best);
  }
  out.truncated = true;
  return out;
}

// ---------------------------------------------------------------------------
// Mel + fixed random projection feature provider

namespace {

class SynthFeatureProvider : public FeatureProvider {
 public:
  SynthFeatureProvider(uint64_t seed, int dim, const SyntheticConfig& cfg,
                       std::string name)
      : dim_(dim), cfg_(cfg), name_(std::move(name)) {
    Rng rng(seed);
    proj_ = Tensor({cfg.n_mels, dim});
    double scale = 1.0 / std::sqrt(static_cast<double>(cfg.n_mels));
    for (int64_t i = 0; i < proj_.numel(); ++i)
      proj_.at(i) = rng.Gaussian() * scale;
  }

  int expected_sample_rate() const override { return cfg_.sample_rate; }
  double frame_rate() const override { return cfg_.frame_rate(); }
  int dim() const override { return dim_; }
  std::string name() const override { return name_; }

  ag::Var ExtractVar(const ag::Var& wave) const override {
    int64_t n = wave->value.numel();
    Check(n > cfg_.n_fft / 2, ErrorKind::kShape, name_, ": clip of ", n,
          " samples shorter than one analysis window");
    stft::MelConfig mc;
    mc.n_fft = cfg_.n_fft;
    mc.hop = cfg_.hop;
    mc.n_mels = cfg_.n_mels;
    mc.sample_rate = cfg_.sample_rate;
    ag::Var lm = stft::LogMel(wave, mc);
    int64_t t = n / cfg_.hop;
    if (t < 1) t = 1;
    if (t > lm->value.rows()) t = lm->value.rows();
    return ag::Matmul(ag::SliceRows(lm, 0, t), ag::Constant(proj_));
  }

 private:
  int dim_;
  SyntheticConfig cfg_;
  std::string name_;
  Tensor proj_;
};

class SynthPitchProvider : public PitchProvider {
 public:
  explicit SynthPitchProvider(const SyntheticConfig& cfg) : cfg_(cfg) {}
  int expected_sample_rate() const override { return cfg_.sample_rate; }
  double frame_rate() const override { return cfg_.frame_rate(); }
  PitchSequence Extract(const audio::Wave& clip) const override {
    Check(clip.sample_rate == cfg_.sample_rate, ErrorKind::kDomain,
          "pitch provider expects ", cfg_.sample_rate, " Hz");
    pitch::PitchConfig pc;
    pc.frame_rate = cfg_.frame_rate();
    std::vector<double> f0 = pitch::TrackPitch(clip, pc);
    int64_t want = static_cast<int64_t>(clip.samples.size()) / cfg_.hop;
    if (want < 1) want = 1;
    f0.resize(want, 0.0);
    PitchSequence ps;
    ps.values = std::move(f0);
    ps.frame_rate = cfg_.frame_rate();
    return ps;
  }

 private:
  SyntheticConfig cfg_;
};

// Fixed-weight causal transformer with cross attention to a log-mel memory.
class SynthTransformerAsr : public AsrAdapter {
 public:
  SynthTransformerAsr(uint64_t seed, const SyntheticConfig& cfg) : cfg_(cfg) {
    Rng rng(seed);
    embed_ = ag::Leaf(nn::XavierUniform(cfg.asr_vocab, cfg.asr_dim,
                                        {cfg.asr_vocab, cfg.asr_dim}, rng),
                      true);
    mem_proj_ = nn::Linear(cfg.n_mels, cfg.asr_dim, rng);
    for (int i = 0; i < cfg.asr_layers; ++i)
      layers_.emplace_back(cfg.asr_dim, cfg.asr_heads, cfg.asr_ff, rng);
    ln_out_ = nn::LayerNormLayer(cfg.asr_dim);
    out_proj_ = nn::Linear(cfg.asr_dim, cfg.asr_vocab, rng);

    params_.Add("embed", embed_);
    mem_proj_.Params(params_, "mem_proj");
    for (size_t i = 0; i < layers_.size(); ++i)
      layers_[i].Params(params_, "layer" + std::to_string(i));
    ln_out_.Params(params_, "ln_out");
    out_proj_.Params(params_, "out_proj");
    params_.SetRequiresGrad(false);
  }

  int vocab_size() const override { return cfg_.asr_vocab; }
  int begin_token() const override { return 0; }
  int end_token() const override { return 1; }
  bool differentiable() const override { return true; }
  int expected_sample_rate() const override { return cfg_.sample_rate; }
  std::string name() const override { return "synthetic-transformer"; }
  const nn::ParamMap& params() const { return params_; }

  ag::Var StepLogits(const ag::Var& wave,
                     const std::vector<int>& targets) const override {
    Check(!targets.empty(), ErrorKind::kDomain, "empty target sequence");
    std::vector<int64_t> ids;
    ids.push_back(begin_token());
    for (size_t i = 0; i + 1 < targets.size(); ++i) ids.push_back(targets[i]);
    return Decode(wave, ids);
  }

  std::vector<double> NextLogits(const audio::Wave& clip,
                                 const std::vector<int>& prefix) const override {
    std::vector<int64_t> ids;
    ids.push_back(begin_token());
    for (int t : prefix) ids.push_back(t);
    ag::Var logits = Decode(WaveConstant(clip), ids);
    int64_t last = logits->value.rows() - 1;
    std::vector<double> row(logits->value.row(last),
                            logits->value.row(last) + cfg_.asr_vocab);
    // Never end on the very first step so transcriptions are non-empty.
    if (prefix.empty()) row[end_token()] = -1e9;
    return row;
  }

  std::string TokensToText(const std::vector<int>& tokens) const override {
    std::string out;
    for (int t : tokens) {
      if (!out.empty()) out += " ";
      out += "t" + std::to_string(t);
    }
    return out;
  }

 private:
  ag::Var Decode(const ag::Var& wave, const std::vector<int64_t>& ids) const {
    stft::MelConfig mc;
    mc.n_fft = cfg_.n_fft;
    mc.hop = cfg_.asr_mel_hop;
    mc.n_mels = cfg_.n_mels;
    mc.sample_rate = cfg_.sample_rate;
    ag::Var mem = mem_proj_.Forward(stft::LogMel(wave, mc));
    mem = ag::Add(mem, ag::Constant(nn::SinusoidalPositions(
                           mem->value.rows(), cfg_.asr_dim)));

    ag::Var x = ag::Embedding(embed_, ids);
    x = ag::Add(x, ag::Constant(nn::SinusoidalPositions(
                       static_cast<int64_t>(ids.size()), cfg_.asr_dim)));
    for (const auto& layer : layers_) x = layer.Forward(x, mem);
    return out_proj_.Forward(ln_out_.Forward(x));
  }

  SyntheticConfig cfg_;
  ag::Var embed_;
  nn::Linear mem_proj_, out_proj_;
  std::vector<nn::TransformerDecoderLayer> layers_;
  nn::LayerNormLayer ln_out_;
  nn::ParamMap params_;
};

class SynthTextLm : public TextLm {
 public:
  SynthTextLm(uint64_t seed, int dim) : seed_(seed), dim_(dim) {}
  int dim() const override { return dim_; }
  Tensor Embed(const std::vector<std::string>& tokens) const override {
    Check(!tokens.empty(), ErrorKind::kDomain, "empty token list");
    Tensor out({static_cast<int64_t>(tokens.size()),
                static_cast<int64_t>(dim_)});
    for (size_t i = 0; i < tokens.size(); ++i) {
      Rng rng(Fnv1a(tokens[i]) ^ seed_);
      double* row = out.row(static_cast<int64_t>(i));
      double sq = 0.0;
      for (int d = 0; d < dim_; ++d) {
        row[d] = rng.Gaussian();
        sq += row[d] * row[d];
      }
      double inv = 1.0 / std::sqrt(sq);
      for (int d = 0; d < dim_; ++d) row[d] *= inv;
    }
    return out;
  }

 private:
  uint64_t seed_;
  int dim_;
};

}  // namespace

Providers MakeSyntheticProviders(uint64_t seed, const SyntheticConfig& cfg) {
  Providers p;
  p.feature = std::make_shared<SynthFeatureProvider>(
      seed ^ 0x9e3779b97f4a7c15ull, cfg.feature_dim, cfg, "synthetic-feature");
  p.ttr_speech = std::make_shared<SynthFeatureProvider>(
      seed ^ 0xc2b2ae3d27d4eb4full, cfg.ttr_dim, cfg, "synthetic-ttr-speech");
  p.pitch = std::make_shared<SynthPitchProvider>(cfg);
  p.asr = std::make_shared<SynthTransformerAsr>(seed ^ 0x165667b19e3779f9ull,
                                                cfg);
  p.text_lm = std::make_shared<SynthTextLm>(seed ^ 0xd6e8feb86659fd93ull,
                                            cfg.ttr_dim);
  return p;
}

// ---------------------------------------------------------------------------
// Calibration stand-ins

UniformAsr::UniformAsr(int vocab, int sample_rate)
    : vocab_(vocab), sample_rate_(sample_rate) {
  Check(vocab >= 2, ErrorKind::kDomain, "vocab too small");
}

ag::Var UniformAsr::StepLogits(const ag::Var& wave,
                               const std::vector<int>& targets) const {
  (void)wave;
  Check(!targets.empty(), ErrorKind::kDomain, "empty target sequence");
  return ag::Constant(
      Tensor::Zeros({static_cast<int64_t>(targets.size()), vocab_}));
}

std::vector<double> UniformAsr::NextLogits(const audio::Wave& clip,
                                           const std::vector<int>& prefix) const {
  (void)clip;
  (void)prefix;
  return std::vector<double>(vocab_, 0.0);
}

std::string UniformAsr::TokensToText(const std::vector<int>& tokens) const {
  std::string out;
  for (int t : tokens) {
    if (!out.empty()) out += " ";
    out += "t" + std::to_string(t);
  }
  return out;
}

TableAsr::TableAsr(std::vector<int> table, int vocab, int sample_rate,
                   double margin)
    : table_(std::move(table)),
      vocab_(vocab),
      sample_rate_(sample_rate),
      margin_(margin) {
  Check(vocab >= 2, ErrorKind::kDomain, "vocab too small");
  for (int t : table_)
    Check(t >= 0 && t < vocab, ErrorKind::kDomain, "table token out of vocab");
}

ag::Var TableAsr::StepLogits(const ag::Var& wave,
                             const std::vector<int>& targets) const {
  (void)wave;
  Check(!targets.empty(), ErrorKind::kDomain, "empty target sequence");
  Tensor logits({static_cast<int64_t>(targets.size()), vocab_});
  for (size_t i = 0; i < targets.size(); ++i) {
    int predicted =
        i < table_.size() ? table_[i] : end_token();
    logits.at(static_cast<int64_t>(i), predicted) = margin_;
  }
  return ag::Constant(std::move(logits));
}

std::vector<double> TableAsr::NextLogits(const audio::Wave& clip,
                                         const std::vector<int>& prefix) const {
  (void)clip;
  std::vector<double> logits(vocab_, 0.0);
  size_t pos = prefix.size();
  bool matched = pos <= table_.size();
  for (size_t i = 0; matched && i < pos; ++i)
    matched = prefix[i] == table_[i];
  int next = (matched && pos < table_.size()) ? table_[pos] : end_token();
  logits[next] = margin_;
  return logits;
}

std::string TableAsr::TokensToText(const std::vector<int>& tokens) const {
  std::string out;
  for (int t : tokens) {
    if (!out.empty()) out += " ";
    out += "t" + std::to_string(t);
  }
  return out;
}

SineTokenAsr::SineTokenAsr(int vocab, int sample_rate, double burst_s)
    : vocab_(vocab), sample_rate_(sample_rate), burst_s_(burst_s) {
  Check(vocab >= 3, ErrorKind::kDomain, "need at least one word token");
  Check(burst_s > 0.0, ErrorKind::kDomain, "bad burst length");
  freqs_.assign(vocab, 0.0);
  for (int t = 2; t < vocab; ++t)
    freqs_[t] = TokenFrequency(t, vocab, sample_rate);
}

double SineTokenAsr::TokenFrequency(int token, int vocab, int sample_rate) {
  Check(token >= 2 && token < vocab, ErrorKind::kDomain,
        "no frequency for token ", token);
  double lo = 400.0;
  double hi = std::min(3400.0, 0.85 * sample_rate / 2.0);
  int n_words = vocab - 2;
  if (n_words == 1) return lo;
  return lo + (hi - lo) * (token - 2) / (n_words - 1);
}

int SineTokenAsr::NumBursts(int64_t n_samples) const {
  int64_t b = static_cast<int64_t>(std::lround(burst_s_ * sample_rate_));
  return static_cast<int>((n_samples + b / 2) / b);
}

ag::Var SineTokenAsr::StepLogits(const ag::Var& wave,
                                 const std::vector<int>& targets) const {
  Check(!targets.empty(), ErrorKind::kDomain, "empty target sequence");
  int64_t b = static_cast<int64_t>(std::lround(burst_s_ * sample_rate_));
  int64_t n = wave->value.numel();
  Check(n >= b, ErrorKind::kShape, "audio shorter than one burst");
  int64_t n_bursts = n / b;
  int64_t want = static_cast<int64_t>(targets.size());

  ag::Var frames = ag::FrameRows(wave, b, b);  // [n_bursts, b]
  if (want < n_bursts) frames = ag::SliceRows(frames, 0, want);

  // Quadrature basis per word frequency; log power is the logit.
  int n_words = vocab_ - 2;
  Tensor basis({b, static_cast<int64_t>(2 * n_words)});
  for (int64_t t = 0; t < b; ++t) {
    for (int w = 0; w < n_words; ++w) {
      double ang = 2.0 * M_PI * freqs_[w + 2] * t / sample_rate_;
      basis.at(t, w) = std::cos(ang);
      basis.at(t, n_words + w) = std::sin(ang);
    }
  }
  ag::Var q = ag::Matmul(frames, ag::Constant(std::move(basis)));
  ag::Var re = ag::SliceCols(q, 0, n_words);
  ag::Var im = ag::SliceCols(q, n_words, 2 * n_words);
  ag::Var power = ag::Add(ag::Mul(re, re), ag::Mul(im, im));
  ag::Var word_logits = ag::Log(ag::AddScalar(power, 1e-12));

  int64_t have = word_logits->value.rows();
  std::vector<ag::Var> rows;
  rows.push_back(ag::ConcatCols(
      {ag::Constant(Tensor::Full({have, 2}, -60.0)), word_logits}));
  if (have < want) {
    // Positions past the last burst predict the end token.
    Tensor tail({want - have, static_cast<int64_t>(vocab_)});
    tail.Fill(-60.0);
    for (int64_t i = 0; i < want - have; ++i) tail.at(i, end_token()) = 0.0;
    rows.push_back(ag::Constant(std::move(tail)));
  }
  return rows.size() == 1 ? rows[0] : ag::ConcatRows(rows);
}

std::vector<double> SineTokenAsr::NextLogits(
    const audio::Wave& clip, const std::vector<int>& prefix) const {
  std::vector<double> logits(vocab_, 0.0);
  int64_t b = static_cast<int64_t>(std::lround(burst_s_ * sample_rate_));
  int64_t n = static_cast<int64_t>(clip.samples.size());
  int pos = static_cast<int>(prefix.size());
  if (pos >= NumBursts(n)) {
    logits[end_token()] = 20.0;
    return logits;
  }
  int64_t start = pos * b;
  int64_t len = std::min(b, n - start);
  double best_power = -1.0;
  int best_token = end_token();
  for (int t = 2; t < vocab_; ++t) {
    double re = 0.0, im = 0.0;
    for (int64_t i = 0; i < len; ++i) {
      double ang = 2.0 * M_PI * freqs_[t] * i / sample_rate_;
      re += clip.samples[start + i] * std::cos(ang);
      im += clip.samples[start + i] * std::sin(ang);
    }
    double p = re * re + im * im;
    if (p > best_power) {
      best_power = p;
      best_token = t;
    }
  }
  logits[best_token] = 20.0;
  return logits;
}

std::string SineTokenAsr::TokensToText(const std::vector<int>& tokens) const {
  std::string out;
  for (int t : tokens) {
    if (!out.empty()) out += " ";
    out += "w" + std::to_string(t);
  }
  return out;
}

}  // namespace frontend
}  // namespace lmlc
