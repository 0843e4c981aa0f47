// synthetic.cpp

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

#include "lmlc/synthetic.h"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "lmlc/frontend.h"
#include "lmlc/rng.h"

namespace lmlc {
namespace synthetic {

SynthUtterance MakeSineUtterance(const std::vector<int>& tokens,
                                 const SineCorpusConfig& cfg) {
  Check(!tokens.empty(), ErrorKind::kDomain, "empty token sequence");
  int64_t burst = static_cast<int64_t>(std::lround(cfg.burst_s * cfg.sample_rate));
  Check(burst >= 16, ErrorKind::kDomain, "burst too short");
  int64_t fade = std::min<int64_t>(
      static_cast<int64_t>(std::lround(0.005 * cfg.sample_rate)), burst / 4);

  SynthUtterance u;
  u.tokens = tokens;
  u.clip.sample_rate = cfg.sample_rate;
  u.clip.samples.assign(tokens.size() * burst, 0.0);
  for (size_t i = 0; i < tokens.size(); ++i) {
    int t = tokens[i];
    double f = frontend::SineTokenAsr::TokenFrequency(t, cfg.vocab(),
                                                      cfg.sample_rate);
    int64_t start = static_cast<int64_t>(i) * burst;
    for (int64_t j = 0; j < burst; ++j) {
      double s = cfg.amplitude *
                 std::sin(2.0 * M_PI * f * j / cfg.sample_rate);
      if (j < fade)
        s *= 0.5 * (1.0 - std::cos(M_PI * j / fade));
      else if (j >= burst - fade)
        s *= 0.5 * (1.0 - std::cos(M_PI * (burst - 1 - j) / fade));
      u.clip.samples[start + j] = s;
    }
    data::SubwordAlignment a;
    a.token = "w" + std::to_string(t);
    a.start_s = i * cfg.burst_s;
    a.end_s = (i + 1) * cfg.burst_s;
    u.alignments.push_back(a);
    if (!u.text.empty()) u.text += " ";
    u.text += a.token;
  }
  return u;
}

std::vector<SynthUtterance> MakeSineCorpus(uint64_t seed, int n,
                                           const SineCorpusConfig& cfg) {
  Check(n >= 1, ErrorKind::kDomain, "need at least one utterance");
  Check(cfg.min_tokens >= 1 && cfg.max_tokens >= cfg.min_tokens,
        ErrorKind::kDomain, "bad token count range");
  Rng rng(seed);
  std::vector<SynthUtterance> out;
  out.reserve(n);
  for (int i = 0; i < n; ++i) {
    int count = cfg.min_tokens +
                static_cast<int>(
                    rng.UniformInt(cfg.max_tokens - cfg.min_tokens + 1));
    std::vector<int> tokens(count);
    for (int& t : tokens)
      t = 2 + static_cast<int>(rng.UniformInt(cfg.n_word_tokens));
    out.push_back(MakeSineUtterance(tokens, cfg));
  }
  return out;
}

std::vector<data::Utterance> WriteSineCorpus(
    const std::string& dir, const std::vector<SynthUtterance>& corpus) {
  namespace fs = std::filesystem;
  fs::create_directories(fs::path(dir) / "audio");
  fs::create_directories(fs::path(dir) / "align");

  std::vector<data::Utterance> rows;
  for (size_t i = 0; i < corpus.size(); ++i) {
    const SynthUtterance& u = corpus[i];
    char line_id[16];
    std::snprintf(line_id, sizeof(line_id), "line%04zu", i);

    data::Utterance row;
    row.id = "utt" + std::to_string(i);
    row.audio_path = (fs::path(dir) / "audio" / (row.id + ".wav")).string();
    row.alignment_path = (fs::path(dir) / "align" / (row.id + ".tsv")).string();
    row.text = u.text;
    row.source_text_id = line_id;
    row.order_index = static_cast<int>(i);

    audio::WriteWav(row.audio_path, u.clip);
    data::WriteAlignments(row.alignment_path, u.alignments);
    rows.push_back(row);
  }
  data::WriteManifest((fs::path(dir) / "manifest.jsonl").string(), rows);
  return rows;
}

}  // namespace synthetic
}  // namespace lmlc
