// eval.h

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

#ifndef LMLC_EVAL_H_
#define LMLC_EVAL_H_

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "lmlc/audio.h"
#include "lmlc/codec.h"
#include "lmlc/frontend.h"

namespace lmlc {
namespace eval {

// Lowercase, strip punctuation, collapse whitespace; numerals kept.
std::string NormalizeText(const std::string& text);
std::vector<std::string> SplitWords(const std::string& text);

struct EditCounts {
  int64_t substitutions = 0;
  int64_t deletions = 0;
  int64_t insertions = 0;
  int64_t total() const { return substitutions + deletions + insertions; }
};

// Minimal edit distance between word lists, with an operation breakdown.
EditCounts EditDistance(const std::vector<std::string>& ref,
                        const std::vector<std::string>& hyp);

// 100 * edits / |ref|.  The reference must be non-empty.
double Wer(const std::vector<std::string>& ref,
           const std::vector<std::string>& hyp);

// Corpus-level pooling: total errors over total reference words, so the
// result is independent of utterance order.
struct WerPool {
  int64_t errors = 0;
  int64_t ref_words = 0;
  void Add(const std::vector<std::string>& ref,
           const std::vector<std::string>& hyp);
  double Percent() const;
};

// Anything that can round-trip audio for evaluation.
class CodecLike {
 public:
  virtual ~CodecLike() = default;
  virtual audio::Wave Roundtrip(const audio::Wave& clip) const = 0;
  virtual double bitrate() const = 0;  // bps; infinity for pass-through
};

class IdentityCodec : public CodecLike {
 public:
  audio::Wave Roundtrip(const audio::Wave& clip) const override {
    return clip;
  }
  double bitrate() const override;
};

class TrainedCodec : public CodecLike {
 public:
  TrainedCodec(const codec::Codec* model, const frontend::Providers* prov)
      : model_(model), prov_(prov) {}
  audio::Wave Roundtrip(const audio::Wave& clip) const override;
  double bitrate() const override { return model_->profile.bitrate(); }

 private:
  const codec::Codec* model_;
  const frontend::Providers* prov_;
};

// Pairwise quality metric supplied by an external tool.  Never reimplemented
// here; when the tool is missing the report marks the column unavailable.
class MetricAdapter {
 public:
  virtual ~MetricAdapter() = default;
  virtual std::string name() const = 0;
  virtual bool available() const = 0;
  virtual double Compare(const audio::Wave& ref,
                         const audio::Wave& degraded) const = 0;
};

// Shells out to `binary ref.wav degraded.wav`; the tool must print a single
// number on stdout.
class ExternalMetricAdapter : public MetricAdapter {
 public:
  ExternalMetricAdapter(std::string name, std::string binary,
                        std::string work_dir);
  std::string name() const override { return name_; }
  bool available() const override;
  double Compare(const audio::Wave& ref,
                 const audio::Wave& degraded) const override;

 private:
  std::string name_, binary_, work_dir_;
};

struct MetricValue {
  bool available = false;
  double value = 0.0;
};

struct EvalItem {
  std::string id;
  audio::Wave clip;
  std::string text;  // ground truth transcript
};

struct EvalRow {
  double bitrate = 0.0;  // bps; infinity marks the unencoded reference
  std::string variant;   // ASR, TTR, SD, S2, or "-" for the reference
  std::map<std::string, MetricValue> wer;      // keyed by ASR adapter name
  std::map<std::string, MetricValue> metrics;  // keyed by metric name
  std::vector<std::string> failures;           // per-utterance notes
};

struct EvalReport {
  std::vector<EvalRow> rows;
  std::map<std::string, std::string> metadata;

  // Bitrate ascending, ASR < TTR < SD < S2 within a bitrate, and the
  // unencoded reference last.
  void Sort();
  std::string ToJson() const;
  std::string ToTable() const;
};

using AsrAdapterList =
    std::vector<std::pair<std::string, const frontend::AsrAdapter*>>;
using MetricAdapterList = std::vector<const MetricAdapter*>;

// Runs one codec over the test set: round-trip, normalize to target
// loudness, transcribe with every ASR adapter, pool WER over the corpus,
// and run pairwise quality adapters.  Adapter failures on an utterance are
// recorded on the row instead of aborting the run.
EvalRow EvaluateCodec(const CodecLike& codec, const std::string& variant,
                      const std::vector<EvalItem>& test_set,
                      const AsrAdapterList& asr_adapters,
                      const MetricAdapterList& metric_adapters,
                      double target_lufs = -24.0);

}  // namespace eval
}  // namespace lmlc

#endif  // LMLC_EVAL_H_
