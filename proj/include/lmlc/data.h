// data.h

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

#ifndef LMLC_DATA_H_
#define LMLC_DATA_H_

#include <string>
#include <vector>

#include "lmlc/audio.h"

namespace lmlc {
namespace data {

struct SubwordAlignment {
  std::string token;
  double start_s = 0.0;
  double end_s = 0.0;
};

struct Utterance {
  std::string id;
  std::string audio_path;
  std::string text;
  std::string alignment_path;
  std::string source_text_id;
  int order_index = 0;
};

// An utterance with its audio and alignments loaded.
struct UtteranceAudio {
  Utterance meta;
  audio::Wave clip;
  std::vector<SubwordAlignment> alignments;
};

struct TrainingSegment {
  audio::Wave clip;
  std::vector<SubwordAlignment> alignments;
  std::string source_text_id;
  std::string start_utterance_id;
  std::string text;
  double duration_s = 0.0;
  bool oversize = false;  // single utterance longer than max_s, kept as-is
};

struct Splits {
  std::vector<Utterance> train, val, test;
};

// Tab-separated intervals: token, start seconds, end seconds.  Tokens are
// lowercased; intervals must be time-ordered and non-overlapping.
std::vector<SubwordAlignment> ParseAlignments(const std::string& path);
void WriteAlignments(const std::string& path,
                     const std::vector<SubwordAlignment>& alignments);

// Converts the first interval tier of a TextGrid file to the tab format.
// Empty-text intervals are dropped.
void ImportTextGrid(const std::string& textgrid_path,
                    const std::string& out_path);

// JSON-lines manifest, one utterance per line.
std::vector<Utterance> ReadManifest(const std::string& path);
void WriteManifest(const std::string& path,
                   const std::vector<Utterance>& utterances);

// Partition by source-text prefix.  An id matching both a test and a val
// prefix is an error; unmatched ids go to train.
Splits SplitCorpus(const std::vector<Utterance>& utterances,
                   const std::vector<std::string>& test_prefixes,
                   const std::vector<std::string>& val_prefixes);

// Greedy concatenation of consecutive same-source utterances until the
// segment duration reaches [min_s, max_s].  Alignments are shifted to
// segment time.  A single utterance longer than max_s becomes an oversize
// segment; a trailing segment may be shorter than min_s.
std::vector<TrainingSegment> BuildSegments(
    const std::vector<UtteranceAudio>& utterances, double min_s, double max_s);

}  // namespace data
}  // namespace lmlc

#endif  // LMLC_DATA_H_
