// trainer.cpp

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

#include "lmlc/trainer.h"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

#include "json.hpp"
#include "lmlc/losses.h"
#include "lmlc/optim.h"
#include "lmlc/vq.h"

namespace lmlc {
namespace trainer {

const char* VariantName(Variant v) {
  switch (v) {
    case Variant::kNone: return "none";
    case Variant::kAsr: return "asr";
    case Variant::kTtr: return "ttr";
    case Variant::kSd: return "sd";
  }
  return "none";
}

Variant ParseVariant(const std::string& name) {
  if (name == "none" || name.empty()) return Variant::kNone;
  if (name == "asr") return Variant::kAsr;
  if (name == "ttr") return Variant::kTtr;
  if (name == "sd") return Variant::kSd;
  Raise(ErrorKind::kDomain, "unknown variant '", name,
        "'; expected asr, ttr or sd");
}

ModState StagePlan::state(codec::Module m) const {
  auto it = states.find(m);
  Check(it != states.end(), ErrorKind::kState, "module missing from plan");
  return it->second;
}

std::vector<codec::Module> StagePlan::Trainable() const {
  std::vector<codec::Module> out;
  for (codec::Module m : codec::AllModules())
    if (state(m) == ModState::kTrainable) out.push_back(m);
  return out;
}

std::vector<codec::Module> StagePlan::Frozen() const {
  std::vector<codec::Module> out;
  for (codec::Module m : codec::AllModules())
    if (state(m) == ModState::kFrozen) out.push_back(m);
  return out;
}

StagePlan MakeStagePlan(int stage, Variant variant) {
  Check(stage >= 1 && stage <= 3, ErrorKind::kDomain, "stage must be 1..3");
  if (stage < 3) {
    Check(variant == Variant::kNone, ErrorKind::kDomain,
          "stages 1 and 2 do not take a variant");
  } else {
    Check(variant != Variant::kNone, ErrorKind::kDomain,
          "stage 3 needs a variant (asr, ttr or sd)");
  }
  using M = codec::Module;
  StagePlan p;
  p.stage = stage;
  p.variant = variant;
  for (M m : codec::AllModules()) p.states[m] = ModState::kIdle;
  if (stage == 1) {
    p.states[M::kPitchEncoder] = ModState::kTrainable;
    p.states[M::kPitchVq] = ModState::kTrainable;
    p.states[M::kSemanticEncoder] = ModState::kTrainable;
    p.states[M::kSemanticVq] = ModState::kTrainable;
    p.states[M::kFeatureDecoders] = ModState::kTrainable;
  } else if (stage == 2) {
    p.states[M::kPitchEncoder] = ModState::kFrozen;
    p.states[M::kPitchVq] = ModState::kFrozen;
    p.states[M::kSemanticEncoder] = ModState::kFrozen;
    p.states[M::kSemanticVq] = ModState::kFrozen;
    p.states[M::kVocoder] = ModState::kTrainable;
    p.states[M::kDiscriminators] = ModState::kTrainable;
  } else {
    p.states[M::kPitchEncoder] = ModState::kFrozen;
    p.states[M::kPitchVq] = ModState::kFrozen;
    p.states[M::kSemanticEncoder] = ModState::kTrainable;
    p.states[M::kSemanticVq] = ModState::kTrainable;
    p.states[M::kVocoder] = ModState::kTrainable;
    p.states[M::kDiscriminators] = ModState::kTrainable;
    if (variant == Variant::kSd)
      p.states[M::kFeatureDecoders] = ModState::kFrozen;
    if (variant == Variant::kTtr) p.states[M::kTtrStack] = ModState::kFrozen;
  }
  return p;
}

double LrAt(int64_t epoch, double base, double decay) {
  return base * std::pow(decay, static_cast<double>(epoch));
}

void EarlyStop::Observe(int64_t step, double metric) {
  if (!has_best || metric < best_metric) {
    best_metric = metric;
    best_step = step;
    has_best = true;
  }
}

bool EarlyStop::ShouldStop(int64_t step) const {
  return has_best && step - best_step >= patience;
}

namespace {

int64_t HopSamples(const codec::CodecProfile& profile) {
  return static_cast<int64_t>(
      std::llround(profile.sample_rate / profile.feature_rate));
}

int64_t SegmentFrames(const data::TrainingSegment& seg,
                      const codec::CodecProfile& profile) {
  return static_cast<int64_t>(seg.clip.samples.size()) / HopSamples(profile);
}

}  // namespace

int64_t RandomCropOffset(const data::TrainingSegment& seg,
                         int64_t crop_frames,
                         const codec::CodecProfile& profile, Rng& rng) {
  int64_t total = SegmentFrames(seg, profile);
  Check(total >= crop_frames, ErrorKind::kDomain, "segment of ", total,
        " frames shorter than crop of ", crop_frames);
  int64_t slots = (total - crop_frames) / 4 + 1;
  return 4 * static_cast<int64_t>(rng.UniformInt(slots));
}

Batch MakeBatch(const data::TrainingSegment& seg, int64_t crop_frames,
                int64_t offset_frames, const frontend::Providers& prov,
                const codec::CodecProfile& profile) {
  Check(prov.feature && prov.pitch, ErrorKind::kState,
        "feature and pitch providers are required");
  Check(crop_frames >= 4 && crop_frames % 4 == 0, ErrorKind::kDomain,
        "crop must be a positive multiple of four frames");
  Check(offset_frames >= 0 && offset_frames % 4 == 0, ErrorKind::kDomain,
        "crop offset must be a non-negative multiple of four frames");
  Check(seg.clip.sample_rate == profile.sample_rate, ErrorKind::kDomain,
        "segment sample rate ", seg.clip.sample_rate, " does not match ",
        profile.sample_rate);
  int64_t hop = HopSamples(profile);
  int64_t total = SegmentFrames(seg, profile);
  Check(offset_frames + crop_frames <= total, ErrorKind::kDomain,
        "crop window runs past the segment");

  Batch b;
  b.crop.sample_rate = seg.clip.sample_rate;
  int64_t s0 = offset_frames * hop;
  int64_t s1 = (offset_frames + crop_frames) * hop;
  b.crop.samples.assign(seg.clip.samples.begin() + s0,
                        seg.clip.samples.begin() + s1);

  frontend::FeatureSequence fs = prov.feature->Extract(b.crop);
  Check(fs.frames.rows() == crop_frames, ErrorKind::kShape,
        "feature provider returned ", fs.frames.rows(), " frames for a ",
        crop_frames, " frame crop");
  b.features = fs.frames;
  b.pitch_input = codec::PitchToInput(prov.pitch->Extract(b.crop));
  Check(b.pitch_input.rows() == crop_frames, ErrorKind::kShape,
        "pitch provider frame count mismatch");

  double t0 = static_cast<double>(s0) / profile.sample_rate;
  double dur = static_cast<double>(s1 - s0) / profile.sample_rate;
  for (const auto& a : seg.alignments) {
    double mid = 0.5 * (a.start_s + a.end_s);
    if (mid < t0 || mid >= t0 + dur) continue;
    data::SubwordAlignment shifted;
    shifted.token = a.token;
    shifted.start_s = std::max(a.start_s - t0, 0.0);
    shifted.end_s = std::min(a.end_s - t0, dur);
    if (shifted.end_s <= shifted.start_s) continue;
    b.aligns.push_back(shifted);
  }
  if (b.aligns.empty() && !seg.alignments.empty()) {
    // Window fell between token midpoints; keep the nearest token so the
    // regularizer always has at least one span to look at.
    double mid_w = t0 + 0.5 * dur;
    const data::SubwordAlignment* best = nullptr;
    double best_d = 0.0;
    for (const auto& a : seg.alignments) {
      double d = std::abs(0.5 * (a.start_s + a.end_s) - mid_w);
      if (!best || d < best_d) {
        best = &a;
        best_d = d;
      }
    }
    data::SubwordAlignment shifted;
    shifted.token = best->token;
    shifted.start_s = std::clamp(best->start_s - t0, 0.0, dur * 0.5);
    shifted.end_s = std::clamp(best->end_s - t0, shifted.start_s + 1e-3, dur);
    b.aligns.push_back(shifted);
  }
  return b;
}

void WriteLogJsonl(const std::string& path, const std::vector<LogEntry>& log) {
  std::ofstream out(path, std::ios::trunc);
  Check(out.good(), ErrorKind::kIo, "cannot open ", path, " for writing");
  for (const auto& e : log) {
    nlohmann::json j;
    j["step"] = e.step;
    j["lr"] = e.lr;
    j["total"] = e.total;
    for (const auto& [k, v] : e.terms) j["terms"][k] = v;
    if (e.has_val) j["val"] = e.val;
    out << j.dump() << "\n";
  }
  Check(out.good(), ErrorKind::kIo, "short write to ", path);
}

namespace {

struct StageContext {
  const StagePlan* plan = nullptr;
  codec::Codec* model = nullptr;
  const frontend::Providers* prov = nullptr;
  const ttr::TtrStack* stack = nullptr;
  const TrainConfig* cfg = nullptr;
};

ag::Var Wave1d(const std::vector<double>& samples) {
  return ag::Constant(
      Tensor({static_cast<int64_t>(samples.size())}, samples));
}

// Stage 1 objective: feature reconstruction through both quantized branches
// plus the commitment pull on the encoders.
StepBreakdown Stage1Loss(const StageContext& sc, const Batch& batch,
                         bool backward, std::vector<int>* sem_indices,
                         Tensor* sem_latents, std::vector<int>* pitch_indices,
                         Tensor* pitch_latents) {
  codec::Codec& m = *sc.model;
  ag::Var features = ag::Constant(batch.features);
  ag::Var pitch_in = ag::Constant(batch.pitch_input);
  int64_t t = batch.features.rows();

  ag::Var lat_sem = m.sem_enc.Forward(features);
  vq::QuantizeResult q_sem = vq::Quantize(m.sem_vq, lat_sem);
  ag::Var rec_sem = m.sem_dec.Forward(q_sem.quantized, t);

  ag::Var lat_pitch = m.pitch_enc.Forward(pitch_in);
  vq::QuantizeResult q_pitch = vq::Quantize(m.pitch_vq, lat_pitch);
  ag::Var rec_pitch = m.pitch_dec.Forward(q_pitch.quantized, t);

  double w_c = sc.cfg->weights.commitment;
  ag::Var commit = ag::MulScalar(
      ag::Add(q_sem.commitment, q_pitch.commitment), w_c);
  ag::Var total = ag::Add(
      ag::Add(ag::Mse(rec_sem, features), ag::Mse(rec_pitch, pitch_in)),
      commit);
  if (backward) ag::Backward(total);

  if (sem_indices) *sem_indices = q_sem.indices;
  if (sem_latents) *sem_latents = lat_sem->value;
  if (pitch_indices) *pitch_indices = q_pitch.indices;
  if (pitch_latents) *pitch_latents = lat_pitch->value;

  StepBreakdown bd;
  bd.terms["sem_recon"] = ag::Mse(rec_sem, features)->value.item();
  bd.terms["pitch_recon"] = ag::Mse(rec_pitch, pitch_in)->value.item();
  bd.terms["commitment"] = commit->value.item();
  bd.total = total->value.item();
  return bd;
}

struct SynthOut {
  ag::Var fake;  // rank-1 waveform
  ag::Var real;  // rank-1 waveform
  vq::QuantizeResult q_sem;
  Tensor sem_latents;
  ag::Var features;  // encoder input, for the distillation term
};

SynthOut Synthesize(const StageContext& sc, const Batch& batch) {
  codec::Codec& m = *sc.model;
  SynthOut so;
  so.features = ag::Constant(batch.features);
  ag::Var pitch_in = ag::Constant(batch.pitch_input);
  ag::Var lat_sem = m.sem_enc.Forward(so.features);
  so.sem_latents = lat_sem->value;
  so.q_sem = vq::Quantize(m.sem_vq, lat_sem);
  ag::Var lat_pitch = m.pitch_enc.Forward(pitch_in);
  vq::QuantizeResult q_pitch = vq::Quantize(m.pitch_vq, lat_pitch);
  ag::Var z = m.VocoderInput(so.q_sem.quantized, q_pitch.quantized);
  ag::Var fake2d = m.vocoder.Forward(z);
  int64_t n = fake2d->value.rows();
  Check(n == static_cast<int64_t>(batch.crop.samples.size()),
        ErrorKind::kShape, "vocoder produced ", n, " samples for a crop of ",
        batch.crop.samples.size());
  so.fake = ag::Reshape(fake2d, {n});
  so.real = Wave1d(batch.crop.samples);
  return so;
}

// Adversarial half-step: update the discriminators against a detached fake.
double DiscStep(const StageContext& sc, const SynthOut& so, optim::Adam& d_opt,
                double lr) {
  codec::Codec& m = *sc.model;
  d_opt.ZeroGrads();
  codec::DiscOutput real = m.disc.Forward(so.real);
  codec::DiscOutput fake = m.disc.Forward(ag::Detach(so.fake));
  ag::Var d_loss = losses::DiscriminatorLoss(real, fake);
  ag::Backward(d_loss);
  d_opt.Step(lr);
  return d_loss->value.item();
}

StepBreakdown GeneratorObjective(const StageContext& sc, const Batch& batch,
                                 const SynthOut& so) {
  const StagePlan& plan = *sc.plan;
  const LossWeights& w = sc.cfg->weights;
  losses::GenLosses gl = losses::GeneratorLosses(
      so.real, so.fake, sc.model->disc, sc.model->profile.mel);

  StepBreakdown bd;
  ag::Var total = ag::MulScalar(gl.mel_l1, w.mel_l1);
  bd.terms["mel_l1"] = total->value.item();
  ag::Var adv = ag::MulScalar(gl.adv, w.adversarial);
  bd.terms["adv"] = adv->value.item();
  total = ag::Add(total, adv);
  ag::Var fm = ag::MulScalar(gl.fm, w.feature_matching);
  bd.terms["fm"] = fm->value.item();
  total = ag::Add(total, fm);

  if (plan.stage == 3) {
    ag::Var commit = ag::MulScalar(so.q_sem.commitment, w.commitment);
    bd.terms["commitment"] = commit->value.item();
    total = ag::Add(total, commit);

    ag::Var lm;
    if (plan.variant == Variant::kAsr) {
      Check(sc.prov->asr != nullptr, ErrorKind::kState,
            "ASR variant needs a transcriber");
      frontend::TokenSequence targets = frontend::AsrGreedyTranscribe(
          *sc.prov->asr, batch.crop, sc.cfg->asr_max_tokens);
      lm = losses::AsrLoss(*sc.prov->asr, so.fake, targets);
    } else if (plan.variant == Variant::kTtr) {
      Check(sc.stack != nullptr, ErrorKind::kState,
            "TTR variant needs a pretrained regularizer");
      lm = ttr::CodecLoss(so.fake, batch.aligns, *sc.stack, *sc.prov);
    } else {
      ag::Var rec = sc.model->sem_dec.Forward(so.q_sem.quantized,
                                              batch.features.rows());
      lm = losses::SdLoss(so.features, rec);
    }
    lm = ag::MulScalar(lm, w.lm);
    bd.terms[VariantName(plan.variant)] = lm->value.item();
    total = ag::Add(total, lm);
  }
  bd.total = total->value.item();
  ag::Backward(total);
  return bd;
}

double ValidateStage(const StageContext& sc,
                     const std::vector<data::TrainingSegment>& segs) {
  Check(!segs.empty(), ErrorKind::kDomain, "empty validation list");
  double sum = 0.0;
  for (const auto& seg : segs) {
    Batch b = MakeBatch(seg, sc.cfg->crop_frames, 0, *sc.prov,
                        sc.model->profile);
    if (sc.plan->stage == 1) {
      sum += Stage1Loss(sc, b, false, nullptr, nullptr, nullptr, nullptr)
                 .total;
    } else {
      SynthOut so = Synthesize(sc, b);
      sum += ag::L1(stft::LogMel(so.fake, sc.model->profile.mel),
                    stft::LogMel(so.real, sc.model->profile.mel))
                 ->value.item();
    }
  }
  return sum / static_cast<double>(segs.size());
}

void SnapshotCheckpoint(const StageContext& sc, optim::Adam* g_opt,
                        optim::Adam* d_opt, const Rng& rng, int64_t step,
                        const EarlyStop& es, Checkpoint& out) {
  out = Checkpoint{};
  sc.model->SaveTo(out);
  if (g_opt) out.PutOptimState("g_opt", g_opt->ExportState());
  if (d_opt) out.PutOptimState("d_opt", d_opt->ExportState());
  std::array<uint64_t, 4> st = rng.state();
  for (int i = 0; i < 4; ++i)
    out.u64_meta["rng" + std::to_string(i)] = st[i];
  out.u64_meta["step"] = static_cast<uint64_t>(step);
  out.u64_meta["stage"] = static_cast<uint64_t>(sc.plan->stage);
  out.u64_meta["best_step"] = static_cast<uint64_t>(es.best_step);
  out.u64_meta["best_metric_bits"] = std::bit_cast<uint64_t>(es.best_metric);
  out.u64_meta["has_best"] = es.has_best ? 1 : 0;
  out.str_meta["variant"] = VariantName(sc.plan->variant);
}

uint64_t MetaOr(const Checkpoint& c, const std::string& key, uint64_t dflt) {
  auto it = c.u64_meta.find(key);
  return it == c.u64_meta.end() ? dflt : it->second;
}

}  // namespace

TrainResult RunStage(const StagePlan& plan, codec::Codec& model,
                     const std::vector<data::TrainingSegment>& train,
                     const std::vector<data::TrainingSegment>& val,
                     const frontend::Providers& prov,
                     const ttr::TtrStack* stack, const TrainConfig& cfg,
                     const Checkpoint* resume) {
  using M = codec::Module;
  Check(!train.empty(), ErrorKind::kDomain, "no training segments");
  Check(cfg.max_steps >= 1, ErrorKind::kDomain, "max_steps must be positive");
  Check(cfg.validate_every >= 1, ErrorKind::kDomain,
        "validate_every must be positive");
  Check(cfg.crop_frames >= 4 && cfg.crop_frames % 4 == 0, ErrorKind::kDomain,
        "crop_frames must be a positive multiple of four");
  if (plan.variant == Variant::kTtr)
    Check(stack != nullptr, ErrorKind::kState,
          "TTR variant needs a pretrained regularizer");

  StageContext sc;
  sc.plan = &plan;
  sc.model = &model;
  sc.prov = &prov;
  sc.stack = stack;
  sc.cfg = &cfg;

  // Freeze enforcement: only trainable modules keep gradients.
  for (M m : codec::AllModules()) {
    nn::ParamMap pm = model.Params(m);
    pm.SetRequiresGrad(plan.state(m) == ModState::kTrainable);
  }
  if (stack) stack->Params().SetRequiresGrad(false);

  nn::ParamMap g_params;
  for (M m : plan.Trainable()) {
    if (m == M::kDiscriminators) continue;
    nn::ParamMap pm = model.Params(m);
    for (const auto& [name, v] : pm.items()) g_params.Add(name, v);
  }
  optim::AdamConfig ocfg;
  ocfg.lr = cfg.learning_rate;
  ocfg.beta1 = cfg.beta1;
  ocfg.beta2 = cfg.beta2;
  ocfg.weight_decay = cfg.weight_decay;
  optim::Adam g_opt(g_params, ocfg);

  bool has_disc = plan.state(M::kDiscriminators) == ModState::kTrainable;
  std::unique_ptr<optim::Adam> d_opt;
  if (has_disc)
    d_opt = std::make_unique<optim::Adam>(model.Params(M::kDiscriminators),
                                          ocfg);

  bool sem_vq_live = plan.state(M::kSemanticVq) == ModState::kTrainable;
  bool pitch_vq_live = plan.state(M::kPitchVq) == ModState::kTrainable;

  Rng rng(cfg.seed);
  EarlyStop es;
  es.patience = cfg.patience;
  int64_t start_step = 0;

  if (resume) {
    Check(MetaOr(*resume, "stage", 0) == static_cast<uint64_t>(plan.stage),
          ErrorKind::kState, "checkpoint was written by a different stage");
    model.LoadFrom(*resume);
    g_opt.ImportState(resume->GetOptimState("g_opt"));
    if (d_opt) d_opt->ImportState(resume->GetOptimState("d_opt"));
    std::array<uint64_t, 4> st;
    for (int i = 0; i < 4; ++i)
      st[i] = MetaOr(*resume, "rng" + std::to_string(i), 0);
    rng.set_state(st);
    start_step = static_cast<int64_t>(MetaOr(*resume, "step", 0));
    es.has_best = MetaOr(*resume, "has_best", 0) != 0;
    es.best_step = static_cast<int64_t>(MetaOr(*resume, "best_step", 0));
    es.best_metric =
        std::bit_cast<double>(MetaOr(*resume, "best_metric_bits", 0));
  }

  TrainResult result;
  int64_t n_train = static_cast<int64_t>(train.size());
  const std::vector<data::TrainingSegment>& val_set = val.empty() ? train
                                                                  : val;

  auto snapshot_best = [&](int64_t step) {
    SnapshotCheckpoint(sc, &g_opt, d_opt.get(), rng, step, es, result.best);
    if (!cfg.checkpoint_dir.empty()) {
      std::string p = cfg.checkpoint_dir + "/stage" +
                      std::to_string(plan.stage) + "_best.ckpt";
      result.best.Save(p);
    }
  };

  int64_t step = start_step;
  for (step = start_step + 1; step <= cfg.max_steps; ++step) {
    int64_t epoch = (step - 1) / n_train;
    double lr = LrAt(epoch, cfg.learning_rate, cfg.lr_decay);
    const data::TrainingSegment& seg = train[(step - 1) % n_train];
    int64_t offset = RandomCropOffset(seg, cfg.crop_frames, model.profile,
                                      rng);
    Batch batch = MakeBatch(seg, cfg.crop_frames, offset, prov,
                            model.profile);

    StepBreakdown bd;
    if (plan.stage == 1) {
      std::vector<int> sem_idx, pitch_idx;
      Tensor sem_lat, pitch_lat;
      g_opt.ZeroGrads();
      bd = Stage1Loss(sc, batch, true, &sem_idx, &sem_lat, &pitch_idx,
                      &pitch_lat);
      g_opt.Step(lr);
      if (sem_vq_live) {
        vq::EmaUpdate(model.sem_vq, sem_lat, sem_idx, model.sem_vq.decay);
        vq::ReinitDeadCodes(model.sem_vq,
                            vq::CountUsage(sem_idx, model.sem_vq.k()),
                            sem_lat, rng);
      }
      if (pitch_vq_live) {
        vq::EmaUpdate(model.pitch_vq, pitch_lat, pitch_idx,
                      model.pitch_vq.decay);
        vq::ReinitDeadCodes(model.pitch_vq,
                            vq::CountUsage(pitch_idx, model.pitch_vq.k()),
                            pitch_lat, rng);
      }
    } else {
      SynthOut so = Synthesize(sc, batch);
      if (d_opt) {
        model.Params(M::kDiscriminators).SetRequiresGrad(true);
        DiscStep(sc, so, *d_opt, lr);
        model.Params(M::kDiscriminators).SetRequiresGrad(false);
      }
      // Fresh forward pass against the just-updated discriminators; their
      // params take no gradient here.
      g_opt.ZeroGrads();
      bd = GeneratorObjective(sc, batch, so);
      g_opt.Step(lr);
      if (d_opt) model.Params(M::kDiscriminators).SetRequiresGrad(true);
      if (sem_vq_live) {
        vq::EmaUpdate(model.sem_vq, so.sem_latents, so.q_sem.indices,
                      model.sem_vq.decay);
        vq::ReinitDeadCodes(model.sem_vq,
                            vq::CountUsage(so.q_sem.indices,
                                           model.sem_vq.k()),
                            so.sem_latents, rng);
      }
    }

    LogEntry entry;
    entry.step = step;
    entry.lr = lr;
    entry.total = bd.total;
    entry.terms = bd.terms;

    bool at_cadence = step % cfg.validate_every == 0 || step == cfg.max_steps;
    if (at_cadence) {
      double metric = ValidateStage(sc, val_set);
      entry.has_val = true;
      entry.val = metric;
      int64_t prev_best = es.best_step;
      bool had_best = es.has_best;
      es.Observe(step, metric);
      if (!had_best || es.best_step != prev_best) snapshot_best(step);
    }
    result.log.push_back(entry);
    if (es.ShouldStop(step)) break;
  }
  result.stopped_step = std::min(step, cfg.max_steps);
  if (!es.has_best) {
    // max_steps was hit without ever validating; keep the final state.
    es.Observe(result.stopped_step, result.log.empty()
                                        ? 0.0
                                        : result.log.back().total);
    snapshot_best(result.stopped_step);
  }
  result.best_metric = es.best_metric;
  result.best_step = es.best_step;
  if (!cfg.checkpoint_dir.empty()) {
    Checkpoint last;
    SnapshotCheckpoint(sc, &g_opt, d_opt.get(), rng, result.stopped_step, es,
                       last);
    last.Save(cfg.checkpoint_dir + "/stage" +
              std::to_string(plan.stage) + "_last.ckpt");
  }
  return result;
}

}  // namespace trainer
}  // namespace lmlc
