// codec.h

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

#ifndef LMLC_CODEC_H_
#define LMLC_CODEC_H_

#include <cstdint>
#include <string>
#include <vector>

#include "lmlc/audio.h"
#include "lmlc/autodiff.h"
#include "lmlc/bitstream.h"
#include "lmlc/checkpoint.h"
#include "lmlc/frontend.h"
#include "lmlc/nn.h"
#include "lmlc/stft.h"
#include "lmlc/vq.h"

namespace lmlc {
namespace codec {

// Two sizes of the same architecture: "tiny" runs every test on a laptop,
// "paper" mirrors the published configuration.
struct CodecProfile {
  std::string name;
  int sample_rate = 8000;
  int feature_dim = 32;
  double feature_rate = 50.0;
  int latent_dim = 16;
  int k_sem = 8;
  int k_pitch = 8;
  std::vector<int> upsample = {5, 4, 4, 4};
  int voc_channels = 16;
  int disc_channels = 4;
  stft::MelConfig mel;
  std::vector<int> msd_scales = {1, 2};
  std::vector<int> mpd_periods = {2, 3};

  double semantic_rate() const { return feature_rate / 2.0; }
  double pitch_rate() const { return feature_rate / 4.0; }
  int hop_product() const;
  double bitrate() const;

  static CodecProfile Tiny();
  static CodecProfile Paper(int k_sem);
};

// Two dilated 3-tap convolutions with a skip, as in the HiFi-GAN residual
// stack but with a single block per stage.
struct ResBlock {
  nn::Conv1dLayer c1, c2;
  ResBlock() = default;
  ResBlock(int64_t channels, Rng& rng);
  ag::Var Forward(const ag::Var& x) const;
  void Params(nn::ParamMap& pm, const std::string& prefix) const;
};

// features [T, D] -> latents [ceil(T/2), latent].  Odd input lengths are
// right-padded with a zero frame before the strided convolution.
struct SemanticEncoder {
  nn::Conv1dLayer proj;
  ResBlock res;
  nn::Conv1dLayer down;
  SemanticEncoder() = default;
  SemanticEncoder(int64_t feature_dim, int64_t latent_dim, Rng& rng);
  ag::Var Forward(const ag::Var& features) const;
  void Params(nn::ParamMap& pm, const std::string& prefix) const;
};

// pitch input [T, 2] (normalized log f0, voiced flag) -> [ceil(T/4), latent].
// Unvoiced frames get a learned embedding added after the input projection.
struct PitchEncoder {
  nn::Conv1dLayer proj;
  ag::Var unvoiced;
  ResBlock res;
  nn::Conv1dLayer down1, down2;
  PitchEncoder() = default;
  PitchEncoder(int64_t latent_dim, Rng& rng);
  ag::Var Forward(const ag::Var& pitch_input) const;
  void Params(nn::ParamMap& pm, const std::string& prefix) const;
};

// Latents back to input features; length is cropped to t_out because the
// transposed convolution can overshoot by the encoder's padding.
struct SemanticFeatureDecoder {
  nn::ConvT1dLayer up;
  ResBlock res;
  nn::Conv1dLayer out;
  SemanticFeatureDecoder() = default;
  SemanticFeatureDecoder(int64_t latent_dim, int64_t feature_dim, Rng& rng);
  ag::Var Forward(const ag::Var& q, int64_t t_out) const;
  void Params(nn::ParamMap& pm, const std::string& prefix) const;
};

struct PitchFeatureDecoder {
  nn::ConvT1dLayer up1, up2;
  ResBlock res;
  nn::Conv1dLayer out;
  PitchFeatureDecoder() = default;
  PitchFeatureDecoder(int64_t latent_dim, Rng& rng);
  ag::Var Forward(const ag::Var& q, int64_t t_out) const;
  void Params(nn::ParamMap& pm, const std::string& prefix) const;
};

// Upsampling generator: concatenated latents [Ts, 2*latent] to a waveform
// of exactly Ts * prod(upsample) samples.
struct Vocoder {
  nn::Conv1dLayer pre;
  std::vector<nn::ConvT1dLayer> ups;
  std::vector<ResBlock> res;
  nn::Conv1dLayer post;
  Vocoder() = default;
  Vocoder(int64_t in_dim, int channels, const std::vector<int>& upsample,
          Rng& rng);
  ag::Var Forward(const ag::Var& z) const;  // -> [Ts*hop, 1]
  void Params(nn::ParamMap& pm, const std::string& prefix) const;
};

struct DiscOutput {
  std::vector<ag::Var> scores;
  std::vector<std::vector<ag::Var>> feats;
};

struct ScaleDisc {
  std::vector<nn::Conv1dLayer> layers;
  ScaleDisc() = default;
  ScaleDisc(int channels, Rng& rng);
  void Run(const ag::Var& wave, DiscOutput& out) const;
  void Params(nn::ParamMap& pm, const std::string& prefix) const;
};

// Period discriminator: the waveform is zero-padded to a period multiple and
// split into per-phase subsequences that share one convolution stack.
struct PeriodDisc {
  int period = 2;
  std::vector<nn::Conv1dLayer> layers;
  PeriodDisc() = default;
  PeriodDisc(int period, int channels, Rng& rng);
  void Run(const ag::Var& wave, DiscOutput& out) const;
  void Params(nn::ParamMap& pm, const std::string& prefix) const;
};

struct DiscriminatorBank {
  std::vector<int> scales;
  std::vector<ScaleDisc> msd;
  std::vector<PeriodDisc> mpd;
  DiscriminatorBank() = default;
  DiscriminatorBank(const std::vector<int>& msd_scales,
                    const std::vector<int>& mpd_periods, int channels,
                    Rng& rng);
  DiscOutput Forward(const ag::Var& wave) const;  // wave [T, 1]
  void Params(nn::ParamMap& pm, const std::string& prefix) const;
};

enum class Module {
  kPitchEncoder,
  kPitchVq,
  kSemanticEncoder,
  kSemanticVq,
  kFeatureDecoders,
  kVocoder,
  kDiscriminators,
  kTtrStack,
};

const char* ModuleName(Module m);
const std::vector<Module>& AllModules();

// Log-scales and per-crop mean/variance normalizes voiced pitch values;
// returns [T, 2] with the voiced flag in the second column.
Tensor PitchToInput(const frontend::PitchSequence& ps);

struct Codec {
  CodecProfile profile;
  SemanticEncoder sem_enc;
  PitchEncoder pitch_enc;
  vq::Codebook sem_vq, pitch_vq;
  SemanticFeatureDecoder sem_dec;
  PitchFeatureDecoder pitch_dec;
  Vocoder vocoder;
  DiscriminatorBank disc;

  static Codec Init(const CodecProfile& p, uint64_t seed);

  // Gradient parameters only; VQ modules and the TTR stack are not part of
  // the codec's parameter universe and come back empty.
  nn::ParamMap Params(Module m) const;
  nn::ParamMap AllParams() const;

  // Pitch latents run at half the semantic rate and are nearest-neighbor
  // upsampled before concatenation.
  ag::Var VocoderInput(const ag::Var& q_sem, const ag::Var& q_pitch) const;

  bitstream::CodeStream EncodeClip(const audio::Wave& clip,
                                   const frontend::FeatureProvider& fp,
                                   const frontend::PitchProvider& pp) const;
  audio::Wave DecodeStream(const bitstream::CodeStream& cs) const;

  void SaveTo(Checkpoint& c) const;
  void LoadFrom(const Checkpoint& c);
};

}  // namespace codec
}  // namespace lmlc

#endif  // LMLC_CODEC_H_
