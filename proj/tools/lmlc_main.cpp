// lmlc_main.cpp

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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lmlc/bitstream.h"
#include "lmlc/codec.h"
#include "lmlc/data.h"
#include "lmlc/eval.h"
#include "lmlc/frontend.h"
#include "lmlc/spectrogram_compare.h"
#include "lmlc/synthetic.h"
#include "lmlc/trainer.h"
#include "lmlc/ttr.h"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;
using namespace lmlc;

json LoadConfig(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  Check(in.good(), ErrorKind::kIo, "cannot open config ", path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    Raise(ErrorKind::kFormat, "config ", path, ": ", e.what());
  }
  Check(j.is_object(), ErrorKind::kFormat, "config root must be an object");
  return j;
}

template <typename T>
T Get(const json& j, const std::string& key, T dflt) {
  if (!j.is_object() || !j.contains(key)) return dflt;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    Raise(ErrorKind::kFormat, "config field '", key, "': ", e.what());
  }
}

json Sub(const json& j, const std::string& key) {
  if (j.is_object() && j.contains(key)) {
    Check(j.at(key).is_object(), ErrorKind::kFormat, "config field '", key,
          "' must be an object");
    return j.at(key);
  }
  return json::object();
}

struct Session {
  json config;
  uint64_t seed = 1;
  std::string profile_name = "tiny";
  codec::CodecProfile profile;
  frontend::Providers prov;
  std::string ckpt_dir = "checkpoints";

  void Finish() {
    profile_name = Get<std::string>(config, "profile", profile_name);
    if (profile_name == "tiny") {
      profile = codec::CodecProfile::Tiny();
    } else if (profile_name == "paper") {
      profile = codec::CodecProfile::Paper(Get<int>(config, "k_sem", 32));
    } else {
      Raise(ErrorKind::kDomain, "profile must be tiny or paper, got '",
            profile_name, "'");
    }
    seed = Get<uint64_t>(config, "seed", seed);
    ckpt_dir = Get<std::string>(Sub(config, "checkpoints"), "dir", ckpt_dir);

    frontend::SyntheticConfig sc;
    json pj = Sub(config, "providers");
    sc.sample_rate = profile.sample_rate;
    sc.feature_dim = profile.feature_dim;
    sc.hop = static_cast<int>(profile.sample_rate / profile.feature_rate);
    sc.ttr_dim = Get<int>(pj, "ttr_dim", sc.ttr_dim);
    sc.n_fft = Get<int>(pj, "n_fft", sc.n_fft);
    sc.n_mels = Get<int>(pj, "n_mels", sc.n_mels);
    sc.asr_vocab = Get<int>(pj, "asr_vocab", sc.asr_vocab);
    sc.asr_dim = Get<int>(pj, "asr_dim", sc.asr_dim);
    sc.asr_mel_hop = Get<int>(pj, "asr_mel_hop", 2 * sc.hop);
    prov = frontend::MakeSyntheticProviders(
        Get<uint64_t>(pj, "seed", seed), sc);
    if (Get<std::string>(pj, "asr", "transformer") == "sine") {
      json cj = Sub(config, "data");
      synthetic::SineCorpusConfig scc;
      scc.sample_rate = profile.sample_rate;
      scc.n_word_tokens = Get<int>(cj, "n_word_tokens", scc.n_word_tokens);
      scc.burst_s = Get<double>(cj, "burst_s", scc.burst_s);
      prov.asr = std::make_shared<frontend::SineTokenAsr>(
          scc.vocab(), profile.sample_rate, scc.burst_s);
    }
  }
};

struct Corpus {
  std::vector<data::TrainingSegment> train, val, test;
  std::vector<eval::EvalItem> test_items;
};

Corpus LoadCorpus(const Session& s) {
  json dj = Sub(s.config, "data");
  double min_s = Get<double>(dj, "min_segment_s", 1.0);
  double max_s = Get<double>(dj, "max_segment_s", 45.0);

  std::vector<data::UtteranceAudio> loaded;
  if (dj.contains("manifest")) {
    std::string mpath = dj.at("manifest").get<std::string>();
    fs::path base = fs::path(mpath).parent_path();
    for (const data::Utterance& u : data::ReadManifest(mpath)) {
      data::UtteranceAudio ua;
      ua.meta = u;
      auto resolve = [&](const std::string& p) {
        return fs::path(p).is_absolute() ? p : (base / p).string();
      };
      ua.clip = audio::LoadAudio(resolve(u.audio_path), s.profile.sample_rate);
      if (!u.alignment_path.empty())
        ua.alignments = data::ParseAlignments(resolve(u.alignment_path));
      loaded.push_back(std::move(ua));
    }
  } else {
    json sj = Sub(dj, "synthetic");
    synthetic::SineCorpusConfig scc;
    scc.sample_rate = s.profile.sample_rate;
    scc.n_word_tokens = Get<int>(sj, "n_word_tokens", scc.n_word_tokens);
    scc.burst_s = Get<double>(sj, "burst_s", scc.burst_s);
    scc.min_tokens = Get<int>(sj, "min_tokens", scc.min_tokens);
    scc.max_tokens = Get<int>(sj, "max_tokens", scc.max_tokens);
    int count = Get<int>(sj, "count", 12);
    uint64_t cseed = Get<uint64_t>(sj, "seed", s.seed);
    std::vector<synthetic::SynthUtterance> corpus =
        synthetic::MakeSineCorpus(cseed, count, scc);
    for (size_t i = 0; i < corpus.size(); ++i) {
      data::UtteranceAudio ua;
      char buf[32];
      std::snprintf(buf, sizeof buf, "line%04zu", i);
      ua.meta.id = "utt" + std::to_string(i);
      ua.meta.text = corpus[i].text;
      ua.meta.source_text_id = buf;
      ua.meta.order_index = 0;
      ua.clip = corpus[i].clip;
      ua.alignments = corpus[i].alignments;
      loaded.push_back(std::move(ua));
    }
  }
  Check(!loaded.empty(), ErrorKind::kDomain, "corpus is empty");

  std::vector<std::string> test_pfx =
      Get<std::vector<std::string>>(dj, "test_prefixes", {});
  std::vector<std::string> val_pfx =
      Get<std::vector<std::string>>(dj, "val_prefixes", {});
  if (test_pfx.empty() && val_pfx.empty()) {
    // No explicit split: hold out the last utterances (one quarter each for
    // val and test, at least one of each when there are enough).
    size_t n = loaded.size();
    size_t n_hold = std::max<size_t>(n >= 4 ? n / 4 : 0, n >= 3 ? 1 : 0);
    for (size_t i = 0; i < n; ++i) {
      if (i >= n - n_hold)
        test_pfx.push_back(loaded[i].meta.source_text_id);
      else if (i >= n - 2 * n_hold)
        val_pfx.push_back(loaded[i].meta.source_text_id);
    }
  }

  std::vector<data::Utterance> metas;
  for (const auto& ua : loaded) metas.push_back(ua.meta);
  data::Splits splits = data::SplitCorpus(metas, test_pfx, val_pfx);

  auto collect = [&](const std::vector<data::Utterance>& part) {
    std::vector<data::UtteranceAudio> out;
    for (const auto& u : part)
      for (const auto& ua : loaded)
        if (ua.meta.id == u.id) out.push_back(ua);
    return out;
  };
  Corpus c;
  c.train = data::BuildSegments(collect(splits.train), min_s, max_s);
  c.val = data::BuildSegments(collect(splits.val), min_s, max_s);
  std::vector<data::UtteranceAudio> test_utts = collect(splits.test);
  c.test = data::BuildSegments(test_utts, min_s, max_s);
  for (const auto& ua : test_utts) {
    eval::EvalItem item;
    item.id = ua.meta.id;
    item.clip = ua.clip;
    item.text = ua.meta.text;
    c.test_items.push_back(std::move(item));
  }
  Check(!c.train.empty(), ErrorKind::kDomain,
        "no training segments after splitting");
  return c;
}

trainer::TrainConfig ReadTrainConfig(const Session& s) {
  json tj = Sub(s.config, "train");
  trainer::TrainConfig cfg;
  cfg.learning_rate = Get<double>(tj, "learning_rate", cfg.learning_rate);
  json oj = Sub(s.config, "optimizer");
  cfg.beta1 = Get<double>(oj, "beta1", cfg.beta1);
  cfg.beta2 = Get<double>(oj, "beta2", cfg.beta2);
  cfg.weight_decay = Get<double>(oj, "weight_decay", cfg.weight_decay);
  cfg.lr_decay = Get<double>(tj, "lr_decay", cfg.lr_decay);
  cfg.max_steps = Get<int64_t>(tj, "max_steps", cfg.max_steps);
  cfg.validate_every = Get<int64_t>(tj, "validate_every", cfg.validate_every);
  cfg.patience = Get<int64_t>(tj, "patience", cfg.patience);
  cfg.crop_frames = Get<int64_t>(tj, "crop_frames", cfg.crop_frames);
  cfg.asr_max_tokens = Get<int>(tj, "asr_max_tokens", cfg.asr_max_tokens);
  cfg.seed = Get<uint64_t>(tj, "seed", s.seed);
  json wj = Sub(s.config, "loss_weights");
  cfg.weights.mel_l1 = Get<double>(wj, "mel_l1", cfg.weights.mel_l1);
  cfg.weights.adversarial =
      Get<double>(wj, "adversarial", cfg.weights.adversarial);
  cfg.weights.feature_matching =
      Get<double>(wj, "feature_matching", cfg.weights.feature_matching);
  cfg.weights.commitment =
      Get<double>(wj, "commitment", cfg.weights.commitment);
  cfg.weights.lm = Get<double>(wj, "lm", cfg.weights.lm);
  cfg.checkpoint_dir = s.ckpt_dir;
  return cfg;
}

std::string StagePath(const Session& s, int stage, const char* which) {
  return s.ckpt_dir + "/stage" + std::to_string(stage) + "_" + which +
         ".ckpt";
}

Checkpoint RequireCheckpoint(const std::string& path, const char* why) {
  Check(fs::exists(path), ErrorKind::kState, why, ": missing checkpoint ",
        path);
  return Checkpoint::Load(path);
}

int RunTrainStage(Session& s, int stage, const std::string& variant_name) {
  trainer::Variant variant = stage == 3
                                 ? trainer::ParseVariant(
                                       variant_name.empty()
                                           ? Get<std::string>(s.config,
                                                              "variant", "")
                                           : variant_name)
                                 : trainer::Variant::kNone;
  trainer::StagePlan plan = trainer::MakeStagePlan(stage, variant);
  Corpus corpus = LoadCorpus(s);
  trainer::TrainConfig cfg = ReadTrainConfig(s);
  fs::create_directories(s.ckpt_dir);

  codec::Codec model = codec::Codec::Init(s.profile, s.seed);
  if (stage == 2) {
    Checkpoint prev = RequireCheckpoint(StagePath(s, 1, "best"),
                                        "stage 2 starts from stage 1");
    model.LoadFrom(prev);
  } else if (stage == 3) {
    Checkpoint prev = RequireCheckpoint(StagePath(s, 2, "best"),
                                        "stage 3 starts from stage 2");
    model.LoadFrom(prev);
  }

  std::unique_ptr<ttr::TtrStack> stack;
  if (variant == trainer::Variant::kTtr) {
    std::string tp = Get<std::string>(Sub(s.config, "checkpoints"), "ttr",
                                      s.ckpt_dir + "/ttr_best.ckpt");
    Checkpoint tc = RequireCheckpoint(
        tp, "the TTR variant needs a pretrained regularizer");
    auto meta = [&](const char* key) {
      auto it = tc.u64_meta.find(key);
      Check(it != tc.u64_meta.end(), ErrorKind::kFormat,
            "regularizer checkpoint is missing '", key, "'");
      return static_cast<int64_t>(it->second);
    };
    stack = std::make_unique<ttr::TtrStack>(meta("dim"), meta("heads"),
                                            meta("ff"), meta("layers"),
                                            s.seed);
    ttr::LoadStack(tc, *stack);
  }

  std::unique_ptr<Checkpoint> resume;
  std::string resume_path =
      Get<std::string>(Sub(s.config, "checkpoints"), "resume", "");
  if (!resume_path.empty())
    resume = std::make_unique<Checkpoint>(
        RequireCheckpoint(resume_path, "resume requested"));

  trainer::TrainResult res = trainer::RunStage(
      plan, model, corpus.train, corpus.val, s.prov, stack.get(), cfg,
      resume.get());
  std::string log_path =
      s.ckpt_dir + "/stage" + std::to_string(stage) + "_log.jsonl";
  trainer::WriteLogJsonl(log_path, res.log);
  std::cout << "stage " << stage << " done: best metric " << res.best_metric
            << " at step " << res.best_step << ", stopped at step "
            << res.stopped_step << "\n"
            << "checkpoints in " << s.ckpt_dir << ", log " << log_path
            << "\n";
  return 0;
}

int RunPretrainTtr(Session& s) {
  Corpus corpus = LoadCorpus(s);
  json tj = Sub(s.config, "ttr");
  ttr::TtrPretrainConfig cfg;
  cfg.dim = Get<int64_t>(tj, "dim", cfg.dim);
  cfg.heads = Get<int64_t>(tj, "heads", cfg.heads);
  cfg.ff = Get<int64_t>(tj, "ff", cfg.ff);
  cfg.layers = Get<int64_t>(tj, "layers", cfg.layers);
  cfg.learning_rate = Get<double>(tj, "learning_rate", cfg.learning_rate);
  cfg.lr_decay = Get<double>(tj, "lr_decay", cfg.lr_decay);
  cfg.clip_norm = Get<double>(tj, "clip_norm", cfg.clip_norm);
  cfg.max_steps = Get<int64_t>(tj, "max_steps", cfg.max_steps);
  cfg.validate_every = Get<int64_t>(tj, "validate_every", cfg.validate_every);
  cfg.seed = Get<uint64_t>(tj, "seed", s.seed);

  auto items = [](const std::vector<data::TrainingSegment>& segs) {
    std::vector<ttr::PretrainItem> out;
    for (const auto& seg : segs)
      out.push_back({seg.clip, seg.alignments});
    return out;
  };
  ttr::PretrainResult res =
      ttr::PretrainTtr(items(corpus.train), items(corpus.val), cfg, s.prov);
  fs::create_directories(s.ckpt_dir);
  std::string path = s.ckpt_dir + "/ttr_best.ckpt";
  res.best.Save(path);
  std::cout << "regularizer pretraining done: best val " << res.best_val
            << " at step " << res.best_step << ", saved " << path << "\n";
  return 0;
}

codec::Codec LoadCodecForInference(const Session& s,
                                   const std::string& ckpt_flag) {
  std::string path = ckpt_flag;
  if (path.empty())
    path = Get<std::string>(Sub(s.config, "checkpoints"), "codec", "");
  if (path.empty()) {
    for (const char* cand : {"stage3_best.ckpt", "stage2_best.ckpt"}) {
      std::string p = s.ckpt_dir + "/" + cand;
      if (fs::exists(p)) {
        path = p;
        break;
      }
    }
  }
  Check(!path.empty(), ErrorKind::kState,
        "no codec checkpoint given; pass --checkpoint or set "
        "checkpoints.codec");
  Checkpoint c = RequireCheckpoint(path, "codec inference");
  codec::Codec model = codec::Codec::Init(s.profile, s.seed);
  model.LoadFrom(c);
  return model;
}

int RunEncode(Session& s, const std::string& wav_path,
              const std::string& stream_path, const std::string& ckpt) {
  codec::Codec model = LoadCodecForInference(s, ckpt);
  audio::Wave clip = audio::LoadAudio(wav_path, s.profile.sample_rate);
  bitstream::CodeStream cs =
      model.EncodeClip(clip, *s.prov.feature, *s.prov.pitch);
  bitstream::WriteCodeStream(stream_path, cs);
  std::cout << "encoded " << wav_path << " (" << clip.duration_s()
            << " s) at " << model.profile.bitrate() << " bps -> "
            << stream_path << "\n";
  return 0;
}

int RunDecode(Session& s, const std::string& stream_path,
              const std::string& wav_path, const std::string& ckpt) {
  codec::Codec model = LoadCodecForInference(s, ckpt);
  bitstream::CodeStream cs = bitstream::ReadCodeStream(stream_path);
  audio::Wave out = model.DecodeStream(cs);
  audio::WriteWav(wav_path, out);
  std::cout << "decoded " << stream_path << " -> " << wav_path << " ("
            << out.duration_s() << " s)\n";
  return 0;
}

int RunEvaluate(Session& s) {
  Corpus corpus = LoadCorpus(s);
  Check(!corpus.test_items.empty(), ErrorKind::kDomain,
        "no test utterances; adjust the split");
  json rj = Sub(s.config, "report");

  eval::AsrAdapterList asr;
  asr.emplace_back(s.prov.asr->name(), s.prov.asr.get());

  std::string work = Get<std::string>(rj, "work_dir", "eval_work");
  std::vector<std::unique_ptr<eval::ExternalMetricAdapter>> owned;
  owned.push_back(std::make_unique<eval::ExternalMetricAdapter>(
      "pesq", Get<std::string>(rj, "pesq_binary", ""), work));
  owned.push_back(std::make_unique<eval::ExternalMetricAdapter>(
      "warpq_normalized", Get<std::string>(rj, "warpq_binary", ""), work));
  eval::MetricAdapterList metrics;
  for (const auto& m : owned) metrics.push_back(m.get());

  eval::EvalReport report;
  report.metadata["profile"] = s.profile_name;
  report.metadata["asr_decoding"] = "greedy";
  report.metadata["loudness_target_lufs"] = "-24";

  json codecs = rj.contains("codecs") ? rj.at("codecs") : json::array();
  std::vector<codec::Codec> models;  // keep alive while rows are built
  std::vector<std::unique_ptr<eval::TrainedCodec>> wrappers;
  for (const auto& cj : codecs) {
    std::string path = cj.at("checkpoint").get<std::string>();
    std::string variant = Get<std::string>(cj, "variant", "S2");
    Checkpoint c = RequireCheckpoint(path, "evaluate");
    models.push_back(codec::Codec::Init(s.profile, s.seed));
    models.back().LoadFrom(c);
  }
  for (size_t i = 0; i < models.size(); ++i) {
    wrappers.push_back(
        std::make_unique<eval::TrainedCodec>(&models[i], &s.prov));
    std::string variant =
        Get<std::string>(codecs.at(i), "variant", "S2");
    report.rows.push_back(eval::EvaluateCodec(
        *wrappers.back(), variant, corpus.test_items, asr, metrics));
  }
  eval::IdentityCodec identity;
  report.rows.push_back(eval::EvaluateCodec(identity, "-",
                                            corpus.test_items, asr, metrics));
  report.Sort();

  std::string json_path = Get<std::string>(rj, "json", "report.json");
  std::string table_path = Get<std::string>(rj, "table", "report.txt");
  {
    std::ofstream out(json_path, std::ios::trunc);
    Check(out.good(), ErrorKind::kIo, "cannot write ", json_path);
    out << report.ToJson() << "\n";
  }
  std::string table = report.ToTable();
  {
    std::ofstream out(table_path, std::ios::trunc);
    Check(out.good(), ErrorKind::kIo, "cannot write ", table_path);
    out << table;
  }
  std::cout << table << "\nreport written to " << json_path << " and "
            << table_path << "\n";
  return 0;
}

int RunCompare(Session& s, const std::string& x_path,
               const std::string& xhat_path, const std::string& out_path) {
  audio::Wave x = audio::LoadAudio(x_path, s.profile.sample_rate);
  audio::Wave xhat = audio::LoadAudio(xhat_path, s.profile.sample_rate);
  spect::CompareResult res = spect::SpectrogramCompare(x, xhat, out_path);
  std::cout << "wrote " << res.path << " (" << res.top.rows()
            << " frames per panel)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"very-low-bitrate speech codec toolkit"};
  app.require_subcommand(1);

  std::string config_path, profile_flag;
  uint64_t seed_flag = 0;
  bool seed_set = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--profile", profile_flag, "model profile: tiny or paper");
  app.add_option("--seed", seed_flag, "random seed")
      ->each([&](const std::string&) { seed_set = true; });

  std::string variant_flag, ckpt_flag;
  std::string in_a, in_b, out_c;

  CLI::App* c_s1 = app.add_subcommand("train-stage1",
                                      "train encoders, quantizers and "
                                      "feature decoders");
  CLI::App* c_s2 = app.add_subcommand("train-stage2",
                                      "train the vocoder adversarially");
  CLI::App* c_s3 = app.add_subcommand("train-stage3",
                                      "fine-tune with a language-model or "
                                      "distillation loss");
  c_s3->add_option("--variant", variant_flag, "asr, ttr or sd");
  CLI::App* c_ttr = app.add_subcommand("pretrain-ttr",
                                       "pretrain the timed-text regularizer");
  CLI::App* c_enc = app.add_subcommand("encode", "wav to bitstream");
  c_enc->add_option("input", in_a, "input wav")->required();
  c_enc->add_option("output", in_b, "output bitstream")->required();
  c_enc->add_option("--checkpoint", ckpt_flag, "codec checkpoint");
  CLI::App* c_dec = app.add_subcommand("decode", "bitstream to wav");
  c_dec->add_option("input", in_a, "input bitstream")->required();
  c_dec->add_option("output", in_b, "output wav")->required();
  c_dec->add_option("--checkpoint", ckpt_flag, "codec checkpoint");
  CLI::App* c_eval = app.add_subcommand("evaluate",
                                        "objective metrics over the test "
                                        "split");
  CLI::App* c_cmp = app.add_subcommand("compare-spectrogram",
                                       "two-panel spectrogram image");
  c_cmp->add_option("input", in_a, "input wav")->required();
  c_cmp->add_option("decoded", in_b, "decoded wav")->required();
  c_cmp->add_option("output", out_c, "output png")->required();
  CLI::App* c_imp = app.add_subcommand("import-alignments",
                                       "TextGrid to tab-separated intervals");
  c_imp->add_option("input", in_a, "TextGrid file")->required();
  c_imp->add_option("output", in_b, "output tsv")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    Session s;
    s.config = LoadConfig(config_path);
    if (!profile_flag.empty()) s.config["profile"] = profile_flag;
    if (seed_set) s.config["seed"] = seed_flag;
    s.Finish();

    if (c_s1->parsed()) return RunTrainStage(s, 1, "");
    if (c_s2->parsed()) return RunTrainStage(s, 2, "");
    if (c_s3->parsed()) return RunTrainStage(s, 3, variant_flag);
    if (c_ttr->parsed()) return RunPretrainTtr(s);
    if (c_enc->parsed()) return RunEncode(s, in_a, in_b, ckpt_flag);
    if (c_dec->parsed()) return RunDecode(s, in_a, in_b, ckpt_flag);
    if (c_eval->parsed()) return RunEvaluate(s);
    if (c_cmp->parsed()) return RunCompare(s, in_a, in_b, out_c);
    if (c_imp->parsed()) {
      data::ImportTextGrid(in_a, in_b);
      std::cout << "wrote " << in_b << "\n";
      return 0;
    }
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: kind=" << ErrorKindName(e.kind())
              << " message=" << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: kind=internal message=" << e.what() << "\n";
    return 1;
  }
}
