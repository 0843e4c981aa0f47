// codec.cpp

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

#include "lmlc/codec.h"

#include <algorithm>
#include <cmath>

namespace lmlc {
namespace codec {

namespace {

constexpr double kSlope = 0.1;

ag::Var PadToEvenRows(const ag::Var& x) {
  if (x->value.rows() % 2 == 0) return x;
  return ag::ConcatRows({x, ag::Constant(Tensor::Zeros({1, x->value.cols()}))});
}

ag::Var ZeroPadRows(const ag::Var& x, int64_t extra) {
  if (extra == 0) return x;
  return ag::ConcatRows(
      {x, ag::Constant(Tensor::Zeros({extra, x->value.cols()}))});
}

}  // namespace

int CodecProfile::hop_product() const {
  int p = 1;
  for (int u : upsample) p *= u;
  return p;
}

double CodecProfile::bitrate() const {
  return bitstream::Bitrate(k_sem, semantic_rate(), k_pitch, pitch_rate());
}

CodecProfile CodecProfile::Tiny() {
  CodecProfile p;
  p.name = "tiny";
  p.sample_rate = 8000;
  p.feature_dim = 32;
  p.feature_rate = 50.0;
  p.latent_dim = 16;
  p.k_sem = 8;
  p.k_pitch = 8;
  p.upsample = {5, 4, 4, 4};
  p.voc_channels = 16;
  p.disc_channels = 4;
  p.mel.n_fft = 256;
  p.mel.hop = 64;
  p.mel.n_mels = 16;
  p.mel.sample_rate = 8000;
  p.msd_scales = {1, 2};
  p.mpd_periods = {2, 3};
  Check(p.hop_product() * 25 == p.sample_rate * 1, ErrorKind::kDomain,
        "tiny profile rate arithmetic broken");
  return p;
}

CodecProfile CodecProfile::Paper(int k_sem) {
  Check(k_sem == 32 || k_sem == 64, ErrorKind::kDomain,
        "semantic codebook must be 32 or 64, got ", k_sem);
  CodecProfile p;
  p.name = "paper";
  p.sample_rate = 16000;
  p.feature_dim = 768;
  p.feature_rate = 50.0;
  p.latent_dim = 128;
  p.k_sem = k_sem;
  p.k_pitch = 32;
  p.upsample = {10, 8, 8};
  p.voc_channels = 512;
  p.disc_channels = 16;
  p.mel.n_fft = 1024;
  p.mel.hop = 256;
  p.mel.n_mels = 80;
  p.mel.sample_rate = 16000;
  p.msd_scales = {1, 2, 4};
  p.mpd_periods = {2, 3, 5, 7, 11};
  return p;
}

ResBlock::ResBlock(int64_t channels, Rng& rng)
    : c1(channels, channels, 3, 1, 1, 1, rng),
      c2(channels, channels, 3, 1, 3, 3, rng) {}

ag::Var ResBlock::Forward(const ag::Var& x) const {
  ag::Var h = c1.Forward(ag::LeakyRelu(x, kSlope));
  h = c2.Forward(ag::LeakyRelu(h, kSlope));
  return ag::Add(x, h);
}

void ResBlock::Params(nn::ParamMap& pm, const std::string& prefix) const {
  c1.Params(pm, prefix + ".c1");
  c2.Params(pm, prefix + ".c2");
}

SemanticEncoder::SemanticEncoder(int64_t feature_dim, int64_t latent_dim,
                                 Rng& rng)
    : proj(feature_dim, latent_dim, 1, 1, 0, 1, rng),
      res(latent_dim, rng),
      down(latent_dim, latent_dim, 4, 2, 1, 1, rng) {}

ag::Var SemanticEncoder::Forward(const ag::Var& features) const {
  Check(features->value.rows() >= 2, ErrorKind::kShape,
        "need at least 2 feature frames, got ", features->value.rows());
  ag::Var h = res.Forward(proj.Forward(features));
  return down.Forward(PadToEvenRows(h));
}

void SemanticEncoder::Params(nn::ParamMap& pm,
                             const std::string& prefix) const {
  proj.Params(pm, prefix + ".proj");
  res.Params(pm, prefix + ".res");
  down.Params(pm, prefix + ".down");
}

PitchEncoder::PitchEncoder(int64_t latent_dim, Rng& rng)
    : proj(2, latent_dim, 1, 1, 0, 1, rng),
      unvoiced(ag::Leaf(nn::XavierUniform(1, latent_dim, {1, latent_dim}, rng),
                        true)),
      res(latent_dim, rng),
      down1(latent_dim, latent_dim, 4, 2, 1, 1, rng),
      down2(latent_dim, latent_dim, 4, 2, 1, 1, rng) {}

ag::Var PitchEncoder::Forward(const ag::Var& pitch_input) const {
  Check(pitch_input->value.cols() == 2, ErrorKind::kShape,
        "pitch input must be [T, 2]");
  ag::Var voiced = ag::SliceCols(pitch_input, 1, 2);
  ag::Var unvoiced_col = ag::AddScalar(ag::Neg(voiced), 1.0);
  ag::Var h = ag::Add(proj.Forward(pitch_input),
                      ag::Matmul(unvoiced_col, unvoiced));
  h = res.Forward(h);
  h = down1.Forward(PadToEvenRows(h));
  return down2.Forward(PadToEvenRows(h));
}

void PitchEncoder::Params(nn::ParamMap& pm, const std::string& prefix) const {
  proj.Params(pm, prefix + ".proj");
  pm.Add(prefix + ".unvoiced", unvoiced);
  res.Params(pm, prefix + ".res");
  down1.Params(pm, prefix + ".down1");
  down2.Params(pm, prefix + ".down2");
}

SemanticFeatureDecoder::SemanticFeatureDecoder(int64_t latent_dim,
                                               int64_t feature_dim, Rng& rng)
    : up(latent_dim, latent_dim, 4, 2, 1, rng),
      res(latent_dim, rng),
      out(latent_dim, feature_dim, 1, 1, 0, 1, rng) {}

ag::Var SemanticFeatureDecoder::Forward(const ag::Var& q, int64_t t_out) const {
  ag::Var h = res.Forward(up.Forward(q));
  Check(h->value.rows() >= t_out, ErrorKind::kShape, "decoder produced ",
        h->value.rows(), " frames, need ", t_out);
  return out.Forward(ag::SliceRows(h, 0, t_out));
}

void SemanticFeatureDecoder::Params(nn::ParamMap& pm,
                                    const std::string& prefix) const {
  up.Params(pm, prefix + ".up");
  res.Params(pm, prefix + ".res");
  out.Params(pm, prefix + ".out");
}

PitchFeatureDecoder::PitchFeatureDecoder(int64_t latent_dim, Rng& rng)
    : up1(latent_dim, latent_dim, 4, 2, 1, rng),
      up2(latent_dim, latent_dim, 4, 2, 1, rng),
      res(latent_dim, rng),
      out(latent_dim, 2, 1, 1, 0, 1, rng) {}

ag::Var PitchFeatureDecoder::Forward(const ag::Var& q, int64_t t_out) const {
  ag::Var h = up2.Forward(up1.Forward(q));
  h = res.Forward(h);
  Check(h->value.rows() >= t_out, ErrorKind::kShape, "decoder produced ",
        h->value.rows(), " frames, need ", t_out);
  return out.Forward(ag::SliceRows(h, 0, t_out));
}

void PitchFeatureDecoder::Params(nn::ParamMap& pm,
                                 const std::string& prefix) const {
  up1.Params(pm, prefix + ".up1");
  up2.Params(pm, prefix + ".up2");
  res.Params(pm, prefix + ".res");
  out.Params(pm, prefix + ".out");
}

Vocoder::Vocoder(int64_t in_dim, int channels,
                 const std::vector<int>& upsample, Rng& rng)
    : pre(in_dim, channels, 7, 1, 3, 1, rng) {
  int64_t ch = channels;
  for (size_t i = 0; i < upsample.size(); ++i) {
    int u = upsample[i];
    Check(u >= 2, ErrorKind::kDomain, "upsample factor must be >= 2");
    int64_t next = std::max<int64_t>(channels >> (i + 1), 2);
    if (u % 2 == 0)
      ups.emplace_back(ch, next, 2 * u, u, u / 2, rng);
    else
      ups.emplace_back(ch, next, u, u, 0, rng);
    res.emplace_back(next, rng);
    ch = next;
  }
  post = nn::Conv1dLayer(ch, 1, 7, 1, 3, 1, rng);
}

ag::Var Vocoder::Forward(const ag::Var& z) const {
  ag::Var h = pre.Forward(z);
  for (size_t i = 0; i < ups.size(); ++i) {
    h = ups[i].Forward(ag::LeakyRelu(h, kSlope));
    h = res[i].Forward(h);
  }
  return ag::Tanh(post.Forward(ag::LeakyRelu(h, kSlope)));
}

void Vocoder::Params(nn::ParamMap& pm, const std::string& prefix) const {
  pre.Params(pm, prefix + ".pre");
  for (size_t i = 0; i < ups.size(); ++i) {
    ups[i].Params(pm, prefix + ".up" + std::to_string(i));
    res[i].Params(pm, prefix + ".res" + std::to_string(i));
  }
  post.Params(pm, prefix + ".post");
}

ScaleDisc::ScaleDisc(int channels, Rng& rng) {
  int c = channels;
  layers.emplace_back(1, c, 15, 1, 7, 1, rng);
  layers.emplace_back(c, 2 * c, 15, 2, 7, 1, rng);
  layers.emplace_back(2 * c, 2 * c, 15, 2, 7, 1, rng);
  layers.emplace_back(2 * c, 2 * c, 5, 1, 2, 1, rng);
  layers.emplace_back(2 * c, 1, 3, 1, 1, 1, rng);
}

void ScaleDisc::Run(const ag::Var& wave, DiscOutput& out) const {
  std::vector<ag::Var> feats;
  ag::Var h = wave;
  for (size_t i = 0; i < layers.size(); ++i) {
    h = layers[i].Forward(h);
    if (i + 1 < layers.size()) h = ag::LeakyRelu(h, kSlope);
    feats.push_back(h);
  }
  out.scores.push_back(h);
  out.feats.push_back(std::move(feats));
}

void ScaleDisc::Params(nn::ParamMap& pm, const std::string& prefix) const {
  for (size_t i = 0; i < layers.size(); ++i)
    layers[i].Params(pm, prefix + ".l" + std::to_string(i));
}

PeriodDisc::PeriodDisc(int period, int channels, Rng& rng) : period(period) {
  Check(period >= 2, ErrorKind::kDomain, "period must be >= 2");
  int c = channels;
  layers.emplace_back(1, c, 5, 3, 2, 1, rng);
  layers.emplace_back(c, 2 * c, 5, 3, 2, 1, rng);
  layers.emplace_back(2 * c, 2 * c, 5, 1, 2, 1, rng);
  layers.emplace_back(2 * c, 1, 3, 1, 1, 1, rng);
}

void PeriodDisc::Run(const ag::Var& wave, DiscOutput& out) const {
  int64_t t = wave->value.rows();
  int64_t pad = (period - t % period) % period;
  ag::Var padded = ZeroPadRows(wave, pad);
  std::vector<ag::Var> phases;
  for (int ph = 0; ph < period; ++ph)
    phases.push_back(ag::DownsampleRows(padded, period, ph));

  std::vector<ag::Var> feats;
  for (size_t i = 0; i < layers.size(); ++i) {
    for (auto& p : phases) {
      p = layers[i].Forward(p);
      if (i + 1 < layers.size()) p = ag::LeakyRelu(p, kSlope);
    }
    feats.push_back(ag::ConcatCols(phases));
  }
  out.scores.push_back(feats.back());
  out.feats.push_back(std::move(feats));
}

void PeriodDisc::Params(nn::ParamMap& pm, const std::string& prefix) const {
  for (size_t i = 0; i < layers.size(); ++i)
    layers[i].Params(pm, prefix + ".l" + std::to_string(i));
}

DiscriminatorBank::DiscriminatorBank(const std::vector<int>& msd_scales,
                                     const std::vector<int>& mpd_periods,
                                     int channels, Rng& rng)
    : scales(msd_scales) {
  for (size_t i = 0; i < msd_scales.size(); ++i) msd.emplace_back(channels, rng);
  for (int p : mpd_periods) mpd.emplace_back(p, channels, rng);
}

DiscOutput DiscriminatorBank::Forward(const ag::Var& wave) const {
  Check(wave->value.cols() == 1, ErrorKind::kShape,
        "discriminators take a [T, 1] waveform");
  DiscOutput out;
  for (size_t i = 0; i < msd.size(); ++i) {
    ag::Var x = wave;
    for (int s = scales[i]; s > 1; s /= 2) {
      Check(s % 2 == 0, ErrorKind::kDomain, "scales must be powers of two");
      x = ag::AvgPoolRows(x, 2);
    }
    msd[i].Run(x, out);
  }
  for (const auto& pd : mpd) pd.Run(wave, out);
  return out;
}

void DiscriminatorBank::Params(nn::ParamMap& pm,
                               const std::string& prefix) const {
  for (size_t i = 0; i < msd.size(); ++i)
    msd[i].Params(pm, prefix + ".msd" + std::to_string(i));
  for (size_t i = 0; i < mpd.size(); ++i)
    mpd[i].Params(pm, prefix + ".mpd" + std::to_string(i));
}

const char* ModuleName(Module m) {
  switch (m) {
    case Module::kPitchEncoder: return "pitch_enc";
    case Module::kPitchVq: return "pitch_vq";
    case Module::kSemanticEncoder: return "sem_enc";
    case Module::kSemanticVq: return "sem_vq";
    case Module::kFeatureDecoders: return "feature_decoders";
    case Module::kVocoder: return "vocoder";
    case Module::kDiscriminators: return "discriminators";
    case Module::kTtrStack: return "ttr_stack";
  }
  return "?";
}

const std::vector<Module>& AllModules() {
  static const std::vector<Module> mods = {
      Module::kPitchEncoder,    Module::kPitchVq,
      Module::kSemanticEncoder, Module::kSemanticVq,
      Module::kFeatureDecoders, Module::kVocoder,
      Module::kDiscriminators,  Module::kTtrStack,
  };
  return mods;
}

Tensor PitchToInput(const frontend::PitchSequence& ps) {
  int64_t t = static_cast<int64_t>(ps.values.size());
  Check(t >= 1, ErrorKind::kShape, "empty pitch sequence");
  double mean = 0.0;
  int64_t voiced = 0;
  for (double f : ps.values) {
    if (f > 0.0) {
      mean += std::log(f);
      ++voiced;
    }
  }
  if (voiced > 0) mean /= voiced;
  double var = 0.0;
  for (double f : ps.values) {
    if (f > 0.0) {
      double d = std::log(f) - mean;
      var += d * d;
    }
  }
  double sigma = voiced > 0 ? std::sqrt(var / voiced) : 1.0;
  sigma = std::max(sigma, 1e-3);

  Tensor out({t, 2});
  for (int64_t i = 0; i < t; ++i) {
    double f = ps.values[i];
    if (f > 0.0) {
      out.at(i, 0) = (std::log(f) - mean) / sigma;
      out.at(i, 1) = 1.0;
    }
  }
  return out;
}

Codec Codec::Init(const CodecProfile& p, uint64_t seed) {
  Rng rng(seed);
  Codec c;
  c.profile = p;
  c.sem_enc = SemanticEncoder(p.feature_dim, p.latent_dim, rng);
  c.pitch_enc = PitchEncoder(p.latent_dim, rng);
  c.sem_vq = vq::InitCodebook(p.k_sem, p.latent_dim, rng);
  c.pitch_vq = vq::InitCodebook(p.k_pitch, p.latent_dim, rng);
  c.sem_dec = SemanticFeatureDecoder(p.latent_dim, p.feature_dim, rng);
  c.pitch_dec = PitchFeatureDecoder(p.latent_dim, rng);
  c.vocoder = Vocoder(2 * p.latent_dim, p.voc_channels, p.upsample, rng);
  c.disc = DiscriminatorBank(p.msd_scales, p.mpd_periods, p.disc_channels, rng);
  return c;
}

nn::ParamMap Codec::Params(Module m) const {
  nn::ParamMap pm;
  switch (m) {
    case Module::kPitchEncoder:
      pitch_enc.Params(pm, "pitch_enc");
      break;
    case Module::kSemanticEncoder:
      sem_enc.Params(pm, "sem_enc");
      break;
    case Module::kFeatureDecoders:
      sem_dec.Params(pm, "sem_dec");
      pitch_dec.Params(pm, "pitch_dec");
      break;
    case Module::kVocoder:
      vocoder.Params(pm, "vocoder");
      break;
    case Module::kDiscriminators:
      disc.Params(pm, "disc");
      break;
    case Module::kPitchVq:
    case Module::kSemanticVq:
    case Module::kTtrStack:
      break;
  }
  return pm;
}

nn::ParamMap Codec::AllParams() const {
  nn::ParamMap pm;
  for (Module m : AllModules()) {
    nn::ParamMap sub = Params(m);
    for (const auto& [name, v] : sub.items()) pm.Add(name, v);
  }
  return pm;
}

ag::Var Codec::VocoderInput(const ag::Var& q_sem, const ag::Var& q_pitch) const {
  int64_t ts = q_sem->value.rows();
  int64_t tp = q_pitch->value.rows();
  Check(tp == (ts + 1) / 2, ErrorKind::kShape,
        "pitch/semantic frame counts inconsistent: ", tp, " vs ", ts);
  ag::Var up = ag::SliceRows(ag::RepeatRows(q_pitch, 2), 0, ts);
  return ag::ConcatCols({q_sem, up});
}

bitstream::CodeStream Codec::EncodeClip(const audio::Wave& clip,
                                        const frontend::FeatureProvider& fp,
                                        const frontend::PitchProvider& pp) const {
  Check(clip.sample_rate == profile.sample_rate, ErrorKind::kDomain,
        "codec expects ", profile.sample_rate, " Hz, got ", clip.sample_rate);
  frontend::FeatureSequence features = fp.Extract(clip);
  Check(features.frames.cols() == profile.feature_dim, ErrorKind::kShape,
        "feature dim ", features.frames.cols(), " vs profile ",
        profile.feature_dim);
  ag::Var lat_sem = sem_enc.Forward(ag::Constant(features.frames));
  frontend::PitchSequence ps = pp.Extract(clip);
  ag::Var lat_pitch = pitch_enc.Forward(ag::Constant(PitchToInput(ps)));

  bitstream::CodeStream cs;
  cs.sample_rate = static_cast<uint32_t>(profile.sample_rate);
  cs.k_sem = static_cast<uint16_t>(profile.k_sem);
  cs.k_pitch = static_cast<uint16_t>(profile.k_pitch);
  cs.rate_sem = static_cast<float>(profile.semantic_rate());
  cs.rate_pitch = static_cast<float>(profile.pitch_rate());
  cs.semantic_indices = vq::NearestIndices(sem_vq, lat_sem->value);
  cs.pitch_indices = vq::NearestIndices(pitch_vq, lat_pitch->value);
  return cs;
}

audio::Wave Codec::DecodeStream(const bitstream::CodeStream& cs) const {
  Check(cs.k_sem == profile.k_sem && cs.k_pitch == profile.k_pitch,
        ErrorKind::kState, "stream codebook sizes do not match this codec");
  Check(cs.sample_rate == static_cast<uint32_t>(profile.sample_rate),
        ErrorKind::kState, "stream sample rate does not match this codec");
  int64_t ts = static_cast<int64_t>(cs.semantic_indices.size());
  int64_t tp = static_cast<int64_t>(cs.pitch_indices.size());
  Check(ts >= 1, ErrorKind::kDomain, "empty semantic plane");
  Check(tp == (ts + 1) / 2, ErrorKind::kDomain,
        "rate-inconsistent planes: ", tp, " pitch frames vs ", ts,
        " semantic");
  ag::Var q_sem = ag::Constant(vq::Lookup(sem_vq, cs.semantic_indices));
  ag::Var q_pitch = ag::Constant(vq::Lookup(pitch_vq, cs.pitch_indices));
  ag::Var wave = vocoder.Forward(VocoderInput(q_sem, q_pitch));

  audio::Wave out;
  out.sample_rate = profile.sample_rate;
  out.samples.assign(wave->value.data(),
                     wave->value.data() + wave->value.numel());
  for (double s : out.samples)
    Check(std::isfinite(s), ErrorKind::kDomain, "non-finite sample produced");
  return out;
}

void Codec::SaveTo(Checkpoint& c) const {
  for (Module m : AllModules()) {
    nn::ParamMap pm = Params(m);
    if (pm.size() > 0) c.PutParams("codec", pm);
  }
  vq::PutCodebook(c, "sem_vq", sem_vq);
  vq::PutCodebook(c, "pitch_vq", pitch_vq);
  c.str_meta["profile"] = profile.name;
  c.u64_meta["sample_rate"] = static_cast<uint64_t>(profile.sample_rate);
  c.u64_meta["k_sem"] = static_cast<uint64_t>(profile.k_sem);
  c.u64_meta["k_pitch"] = static_cast<uint64_t>(profile.k_pitch);
  c.u64_meta["latent_dim"] = static_cast<uint64_t>(profile.latent_dim);
  c.u64_meta["feature_dim"] = static_cast<uint64_t>(profile.feature_dim);
}

void Codec::LoadFrom(const Checkpoint& c) {
  auto meta = [&](const std::string& key) -> uint64_t {
    auto it = c.u64_meta.find(key);
    Check(it != c.u64_meta.end(), ErrorKind::kFormat,
          "checkpoint missing meta: ", key);
    return it->second;
  };
  Check(meta("sample_rate") == static_cast<uint64_t>(profile.sample_rate) &&
            meta("k_sem") == static_cast<uint64_t>(profile.k_sem) &&
            meta("k_pitch") == static_cast<uint64_t>(profile.k_pitch) &&
            meta("latent_dim") == static_cast<uint64_t>(profile.latent_dim) &&
            meta("feature_dim") == static_cast<uint64_t>(profile.feature_dim),
        ErrorKind::kState, "checkpoint was written by a different profile");
  for (Module m : AllModules()) {
    nn::ParamMap pm = Params(m);
    if (pm.size() > 0) c.GetParams("codec", pm);
  }
  vq::GetCodebook(c, "sem_vq", sem_vq);
  vq::GetCodebook(c, "pitch_vq", pitch_vq);
}

}  // namespace codec
}  // namespace lmlc
