// ttr.cpp

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

#include "lmlc/ttr.h"

#include <cmath>
#include <limits>
#include <sstream>

#include "lmlc/optim.h"

namespace lmlc {
namespace ttr {

SummarizerModel::SummarizerModel(int64_t dim, int64_t heads, int64_t ff,
                                 int64_t layers, Rng& rng)
    : query(ag::Leaf(nn::XavierUniform(1, dim, {1, dim}, rng), true)),
      enc(layers, dim, heads, ff, rng),
      dim(dim) {}

ag::Var SummarizerModel::Forward(const ag::Var& segment) const {
  Check(segment->value.rows() >= 1, ErrorKind::kShape, "empty segment");
  Check(segment->value.cols() == dim, ErrorKind::kShape, "segment dim ",
        segment->value.cols(), " vs model dim ", dim);
  ag::Var x = ag::ConcatRows({query, segment});
  x = ag::Add(x, ag::Constant(nn::SinusoidalPositions(x->value.rows(), dim)));
  return ag::SliceRows(enc.Forward(x), 0, 1);
}

void SummarizerModel::Params(nn::ParamMap& pm,
                             const std::string& prefix) const {
  pm.Add(prefix + ".query", query);
  enc.Params(pm, prefix + ".enc");
}

AggregatorModel::AggregatorModel(int64_t dim, int64_t heads, int64_t ff,
                                 int64_t layers, Rng& rng)
    : enc(layers, dim, heads, ff, rng), dim(dim) {}

ag::Var AggregatorModel::Forward(const ag::Var& s) const {
  Check(s->value.rows() >= 1, ErrorKind::kShape, "empty summary sequence");
  ag::Var x =
      ag::Add(s, ag::Constant(nn::SinusoidalPositions(s->value.rows(), dim)));
  return enc.Forward(x);
}

void AggregatorModel::Params(nn::ParamMap& pm,
                             const std::string& prefix) const {
  enc.Params(pm, prefix + ".enc");
}

TtrStack::TtrStack(int64_t dim, int64_t heads, int64_t ff, int64_t layers,
                   uint64_t seed) {
  Rng rng(seed);
  sum = SummarizerModel(dim, heads, ff, layers, rng);
  agg = AggregatorModel(dim, heads, ff, layers, rng);
}

nn::ParamMap TtrStack::Params() const {
  nn::ParamMap pm;
  sum.Params(pm, "sum");
  agg.Params(pm, "agg");
  return pm;
}

ag::Var CodecLoss(const ag::Var& wave,
                  const std::vector<data::SubwordAlignment>& alignments,
                  const TtrStack& stack, const frontend::Providers& prov) {
  Check(!alignments.empty(), ErrorKind::kDomain,
        "no alignments for this clip");
  Check(prov.ttr_speech && prov.text_lm, ErrorKind::kState,
        "speech and text embedding providers required");

  ag::Var feats = prov.ttr_speech->ExtractVar(wave);
  auto runs = losses::SegmentRuns(alignments, prov.ttr_speech->frame_rate(),
                                  feats->value.rows());

  std::vector<ag::Var> summaries;
  std::vector<std::string> tokens;
  summaries.reserve(runs.size());
  for (size_t i = 0; i < runs.size(); ++i) {
    ag::Var seg = ag::SliceRows(feats, runs[i].first, runs[i].second);
    summaries.push_back(stack.sum.Forward(seg));
    tokens.push_back(alignments[i].token);
  }
  ag::Var s = summaries.size() == 1 ? summaries[0] : ag::ConcatRows(summaries);
  ag::Var sbar = stack.agg.Forward(s);
  ag::Var text = ag::Constant(prov.text_lm->Embed(tokens));
  return losses::TtrLoss(sbar, text);
}

namespace {

std::string ConfigEcho(const TtrPretrainConfig& cfg) {
  std::ostringstream os;
  os << "dim=" << cfg.dim << " heads=" << cfg.heads << " ff=" << cfg.ff
     << " layers=" << cfg.layers << " lr=" << cfg.learning_rate
     << " betas=(" << cfg.beta1 << "," << cfg.beta2 << ")"
     << " decay=" << cfg.lr_decay << " clip=" << cfg.clip_norm
     << " max_steps=" << cfg.max_steps << " seed=" << cfg.seed;
  return os.str();
}

Checkpoint Snapshot(const TtrStack& stack, const TtrPretrainConfig& cfg,
                    int64_t step, const std::vector<double>& val_history) {
  Checkpoint c;
  nn::ParamMap pm;
  stack.sum.Params(pm, "s");
  c.PutParams("summarizer", pm);
  nn::ParamMap pa;
  stack.agg.Params(pa, "a");
  c.PutParams("aggregator", pa);
  c.u64_meta["step"] = static_cast<uint64_t>(step);
  c.u64_meta["dim"] = static_cast<uint64_t>(cfg.dim);
  c.u64_meta["heads"] = static_cast<uint64_t>(cfg.heads);
  c.u64_meta["ff"] = static_cast<uint64_t>(cfg.ff);
  c.u64_meta["layers"] = static_cast<uint64_t>(cfg.layers);
  c.str_meta["config"] = ConfigEcho(cfg);
  if (!val_history.empty())
    c.tensors["val_history"] =
        Tensor({static_cast<int64_t>(val_history.size())}, val_history);
  return c;
}

}  // namespace

PretrainResult PretrainTtr(const std::vector<PretrainItem>& train,
                           const std::vector<PretrainItem>& val,
                           const TtrPretrainConfig& cfg,
                           const frontend::Providers& prov) {
  Check(!train.empty(), ErrorKind::kDomain, "empty training corpus");
  Check(cfg.learning_rate > 0.0, ErrorKind::kDomain, "learning rate <= 0");
  Check(cfg.lr_decay > 0.0 && cfg.lr_decay <= 1.0, ErrorKind::kDomain,
        "decay must be in (0, 1]");
  for (const auto& item : train)
    Check(!item.alignments.empty(), ErrorKind::kDomain,
          "corpus item missing alignments");

  TtrStack stack(cfg.dim, cfg.heads, cfg.ff, cfg.layers, cfg.seed);
  nn::ParamMap params = stack.Params();
  optim::AdamConfig ac;
  ac.lr = cfg.learning_rate;
  ac.beta1 = cfg.beta1;
  ac.beta2 = cfg.beta2;
  optim::Adam opt(params, ac);

  PretrainResult r;
  r.best_val = ValidateTtr(stack, val.empty() ? train : val, prov);
  r.best_step = 0;
  r.val_history.push_back(r.best_val);
  r.best = Snapshot(stack, cfg, 0, r.val_history);

  int64_t n = static_cast<int64_t>(train.size());
  for (int64_t step = 1; step <= cfg.max_steps; ++step) {
    const PretrainItem& item = train[(step - 1) % n];
    params.ZeroGrads();
    ag::Var loss = CodecLoss(ag::Constant(Tensor(
                                 {static_cast<int64_t>(item.clip.samples.size())},
                                 item.clip.samples)),
                             item.alignments, stack, prov);
    ag::Backward(loss);
    opt.ClipGradNorm(cfg.clip_norm);
    int64_t epoch = (step - 1) / n;
    opt.Step(cfg.learning_rate * std::pow(cfg.lr_decay, epoch));

    if (step % cfg.validate_every == 0 || step == cfg.max_steps) {
      double v = ValidateTtr(stack, val.empty() ? train : val, prov);
      r.val_history.push_back(v);
      if (v < r.best_val) {
        r.best_val = v;
        r.best_step = step;
        r.best = Snapshot(stack, cfg, step, r.val_history);
      }
    }
  }
  return r;
}

double ValidateTtr(const TtrStack& stack,
                   const std::vector<PretrainItem>& items,
                   const frontend::Providers& prov) {
  Check(!items.empty(), ErrorKind::kDomain, "empty validation set");
  double total = 0.0;
  for (const auto& item : items) {
    ag::Var wave = ag::Constant(Tensor(
        {static_cast<int64_t>(item.clip.samples.size())}, item.clip.samples));
    ag::Var loss = CodecLoss(wave, item.alignments, stack, prov);
    total += loss->value.item();
  }
  return total / static_cast<double>(items.size());
}

void SaveStack(Checkpoint& c, const TtrStack& stack) {
  nn::ParamMap pm;
  stack.sum.Params(pm, "s");
  c.PutParams("summarizer", pm);
  nn::ParamMap pa;
  stack.agg.Params(pa, "a");
  c.PutParams("aggregator", pa);
  c.u64_meta["dim"] = static_cast<uint64_t>(stack.sum.dim);
}

void LoadStack(const Checkpoint& c, TtrStack& stack) {
  nn::ParamMap pm;
  stack.sum.Params(pm, "s");
  c.GetParams("summarizer", pm);
  nn::ParamMap pa;
  stack.agg.Params(pa, "a");
  c.GetParams("aggregator", pa);
}

}  // namespace ttr
}  // namespace lmlc
