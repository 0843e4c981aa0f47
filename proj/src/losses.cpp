// losses.cpp

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

#include "lmlc/losses.h"

#include <algorithm>
#include <cmath>

namespace lmlc {
namespace losses {

std::vector<std::pair<int64_t, int64_t>> SegmentRuns(
    const std::vector<data::SubwordAlignment>& alignments, double rate,
    int64_t t_frames) {
  Check(rate > 0.0, ErrorKind::kDomain, "bad frame rate");
  Check(t_frames >= 1, ErrorKind::kShape, "no frames to segment");
  std::vector<std::pair<int64_t, int64_t>> runs;
  runs.reserve(alignments.size());
  for (const auto& a : alignments) {
    int64_t lo = static_cast<int64_t>(std::floor(a.start_s * rate));
    int64_t hi = static_cast<int64_t>(std::ceil(a.end_s * rate));
    Check(lo <= t_frames && hi <= t_frames + 1, ErrorKind::kDomain,
          "alignment [", a.start_s, ", ", a.end_s, "]s reaches frame ", hi,
          " but the audio has only ", t_frames);
    lo = std::clamp<int64_t>(lo, 0, t_frames);
    hi = std::clamp<int64_t>(hi, 0, t_frames);
    if (lo >= hi) {
      int64_t nearest = std::clamp<int64_t>(lo, 0, t_frames - 1);
      runs.emplace_back(nearest, nearest + 1);
    } else {
      runs.emplace_back(lo, hi);
    }
  }
  return runs;
}

ag::Var TtrLoss(const ag::Var& sbar, const ag::Var& text) {
  const Tensor& sv = sbar->value;
  const Tensor& tv = text->value;
  Check(sv.shape().size() == 2 && sv.same_shape(tv), ErrorKind::kShape,
        "operands must be equal [N, d] matrices");
  int64_t n = sv.rows();
  Check(n >= 1, ErrorKind::kShape, "need at least one vector pair");

  ag::Var s_sq = ag::SumRows(ag::Mul(sbar, sbar));
  ag::Var t_sq = ag::SumRows(ag::Mul(text, text));
  for (int64_t i = 0; i < n; ++i) {
    Check(s_sq->value.at(i) > 0.0, ErrorKind::kDomain,
          "zero-norm speech vector at row ", i, ", cosine undefined");
    Check(t_sq->value.at(i) > 0.0, ErrorKind::kDomain,
          "zero-norm text vector at row ", i, ", cosine undefined");
  }
  ag::Var dots = ag::SumRows(ag::Mul(sbar, text));
  ag::Var cos = ag::Div(dots, ag::Mul(ag::Sqrt(s_sq), ag::Sqrt(t_sq)));
  ag::Var cos_term = ag::MeanAll(ag::AddScalar(ag::Neg(cos), 1.0));

  ag::Var gram_s = ag::Matmul(sbar, ag::Transpose(sbar));
  ag::Var gram_t = ag::Matmul(text, ag::Transpose(text));
  ag::Var diff = ag::Sub(gram_s, gram_t);
  Tensor mask({n, n});
  for (int64_t i = 0; i < n; ++i)
    for (int64_t j = i; j < n; ++j) mask.at(i, j) = 1.0;
  ag::Var masked = ag::Mul(ag::Mul(diff, diff), ag::Constant(std::move(mask)));
  double norm = 2.0 / (static_cast<double>(n) * (n + 1));
  ag::Var gram_term = ag::MulScalar(ag::SumAll(masked), norm);

  return ag::Add(cos_term, gram_term);
}

ag::Var AsrLoss(const frontend::AsrAdapter& asr, const ag::Var& wave,
                const frontend::TokenSequence& targets, int max_positions) {
  Check(!targets.tokens.empty(), ErrorKind::kDomain,
        "empty target transcription");
  Check(asr.differentiable(), ErrorKind::kState,
        "adapter ", asr.name(), " exposes no gradient path");
  Check(targets.vocab_size == asr.vocab_size(), ErrorKind::kShape,
        "target vocab ", targets.vocab_size, " vs adapter ", asr.vocab_size());
  std::vector<int> toks = targets.tokens;
  if (static_cast<int>(toks.size()) > max_positions)
    toks.resize(max_positions);

  ag::Var logits = asr.StepLogits(wave, toks);
  Check(logits->value.rows() == static_cast<int64_t>(toks.size()) &&
            logits->value.cols() == asr.vocab_size(),
        ErrorKind::kShape, "adapter returned bad logit shape");
  ag::Var logp = ag::LogSoftmaxRows(logits);
  std::vector<int64_t> picks(toks.begin(), toks.end());
  return ag::Neg(ag::MeanAll(ag::PickPerRow(logp, picks)));
}

ag::Var SdLoss(const ag::Var& features_in, const ag::Var& features_out) {
  Check(features_in->value.same_shape(features_out->value), ErrorKind::kShape,
        "feature shapes differ: ", ShapeStr(features_in->value.shape()),
        " vs ", ShapeStr(features_out->value.shape()));
  return ag::Mse(features_out, features_in);
}

ag::Var DiscriminatorLoss(const codec::DiscOutput& real,
                          const codec::DiscOutput& fake) {
  Check(real.scores.size() == fake.scores.size() && !real.scores.empty(),
        ErrorKind::kShape, "discriminator output mismatch");
  ag::Var total;
  for (size_t i = 0; i < real.scores.size(); ++i) {
    ag::Var r = ag::AddScalar(real.scores[i], -1.0);
    ag::Var term = ag::Add(ag::MeanAll(ag::Mul(r, r)),
                           ag::MeanAll(ag::Mul(fake.scores[i], fake.scores[i])));
    total = i == 0 ? term : ag::Add(total, term);
  }
  return total;
}

GenLosses GeneratorLosses(const ag::Var& real_wave, const ag::Var& fake_wave,
                          const codec::DiscriminatorBank& disc,
                          const stft::MelConfig& mel) {
  Check(real_wave->value.rows() == fake_wave->value.rows(), ErrorKind::kShape,
        "waveform lengths differ; crop first");
  GenLosses g;
  g.mel_l1 = ag::L1(stft::LogMel(fake_wave, mel),
                    stft::LogMel(real_wave, mel));

  codec::DiscOutput real = disc.Forward(real_wave);
  codec::DiscOutput fake = disc.Forward(fake_wave);
  for (size_t i = 0; i < fake.scores.size(); ++i) {
    ag::Var f = ag::AddScalar(fake.scores[i], -1.0);
    ag::Var adv = ag::MeanAll(ag::Mul(f, f));
    g.adv = i == 0 ? adv : ag::Add(g.adv, adv);
    for (size_t l = 0; l < fake.feats[i].size(); ++l) {
      ag::Var fm = ag::L1(fake.feats[i][l], real.feats[i][l]);
      g.fm = (i == 0 && l == 0) ? fm : ag::Add(g.fm, fm);
    }
  }
  return g;
}

std::pair<ag::Var, ag::Var> CropToMin(const ag::Var& a, const ag::Var& b,
                                      int64_t max_gap) {
  int64_t na = a->value.rows();
  int64_t nb = b->value.rows();
  Check(std::llabs(na - nb) <= max_gap, ErrorKind::kShape,
        "length mismatch of ", std::llabs(na - nb), " rows exceeds ", max_gap);
  int64_t n = std::min(na, nb);
  ag::Var ca = na == n ? a : ag::SliceRows(a, 0, n);
  ag::Var cb = nb == n ? b : ag::SliceRows(b, 0, n);
  return {ca, cb};
}

}  // namespace losses
}  // namespace lmlc
