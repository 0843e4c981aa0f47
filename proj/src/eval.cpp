// eval.cpp

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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "lmlc/bitstream.h"
#include "lmlc/eval.h"

namespace lmlc {
namespace eval {

double IdentityCodec::bitrate() const {
  return std::numeric_limits<double>::infinity();
}

audio::Wave TrainedCodec::Roundtrip(const audio::Wave& clip) const {
  Check(model_ && prov_ && prov_->feature && prov_->pitch,
        ErrorKind::kState, "codec evaluation needs a model and providers");
  bitstream::CodeStream cs =
      model_->EncodeClip(clip, *prov_->feature, *prov_->pitch);
  return model_->DecodeStream(cs);
}

ExternalMetricAdapter::ExternalMetricAdapter(std::string name,
                                             std::string binary,
                                             std::string work_dir)
    : name_(std::move(name)),
      binary_(std::move(binary)),
      work_dir_(std::move(work_dir)) {}

bool ExternalMetricAdapter::available() const {
  if (binary_.empty()) return false;
  std::error_code ec;
  std::filesystem::file_status st = std::filesystem::status(binary_, ec);
  if (ec || !std::filesystem::is_regular_file(st)) return false;
  return (st.permissions() & std::filesystem::perms::owner_exec) !=
         std::filesystem::perms::none;
}

double ExternalMetricAdapter::Compare(const audio::Wave& ref,
                                      const audio::Wave& degraded) const {
  Check(available(), ErrorKind::kState, "metric tool ", binary_,
        " is not available");
  std::filesystem::create_directories(work_dir_);
  std::string ref_path = work_dir_ + "/" + name_ + "_ref.wav";
  std::string deg_path = work_dir_ + "/" + name_ + "_deg.wav";
  audio::WriteWav(ref_path, ref);
  audio::WriteWav(deg_path, degraded);
  std::string cmd = binary_ + " " + ref_path + " " + deg_path;
  FILE* pipe = popen(cmd.c_str(), "r");
  Check(pipe != nullptr, ErrorKind::kIo, "cannot run ", cmd);
  std::string out;
  char buf[256];
  while (fgets(buf, sizeof buf, pipe) != nullptr) out += buf;
  int rc = pclose(pipe);
  Check(rc == 0, ErrorKind::kIo, "metric tool ", binary_, " exited with ",
        rc);
  try {
    return std::stod(out);
  } catch (const std::exception&) {
    Raise(ErrorKind::kFormat, "metric tool ", binary_,
          " printed no number: '", out, "'");
  }
}

namespace {

int VariantOrder(const std::string& v) {
  if (v == "ASR") return 0;
  if (v == "TTR") return 1;
  if (v == "SD") return 2;
  if (v == "S2") return 3;
  return 4;
}

std::string FormatBitrate(double bps) {
  if (std::isinf(bps)) return "inf";
  std::ostringstream os;
  os << bps;
  return os.str();
}

std::string FormatMetric(const MetricValue& mv, int decimals) {
  if (!mv.available) return "unavailable";
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(decimals);
  os << mv.value;
  return os.str();
}

}  // namespace

void EvalReport::Sort() {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const EvalRow& a, const EvalRow& b) {
                     bool ia = std::isinf(a.bitrate);
                     bool ib = std::isinf(b.bitrate);
                     if (ia != ib) return ib;  // finite rows first
                     if (a.bitrate != b.bitrate) return a.bitrate < b.bitrate;
                     return VariantOrder(a.variant) < VariantOrder(b.variant);
                   });
}

std::string EvalReport::ToJson() const {
  nlohmann::json j;
  j["metadata"] = metadata;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json jr;
    if (std::isinf(r.bitrate)) {
      jr["bitrate"] = "inf";
    } else {
      jr["bitrate"] = r.bitrate;
    }
    jr["variant"] = r.variant;
    for (const auto& [name, mv] : r.wer) {
      jr["wer"][name] =
          mv.available ? nlohmann::json(mv.value) : nlohmann::json("unavailable");
    }
    for (const auto& [name, mv] : r.metrics) {
      jr["metrics"][name] =
          mv.available ? nlohmann::json(mv.value) : nlohmann::json("unavailable");
    }
    jr["failures"] = r.failures;
    j["rows"].push_back(jr);
  }
  return j.dump(2);
}

std::string EvalReport::ToTable() const {
  std::vector<std::string> wer_names, metric_names;
  for (const auto& r : rows) {
    for (const auto& [name, mv] : r.wer)
      if (std::find(wer_names.begin(), wer_names.end(), name) ==
          wer_names.end())
        wer_names.push_back(name);
    for (const auto& [name, mv] : r.metrics)
      if (std::find(metric_names.begin(), metric_names.end(), name) ==
          metric_names.end())
        metric_names.push_back(name);
  }

  std::vector<std::vector<std::string>> grid;
  std::vector<std::string> header = {"Rate (bps)", "LM loss"};
  for (const auto& n : wer_names) header.push_back("WER% " + n);
  for (const auto& n : metric_names) header.push_back(n);
  grid.push_back(header);
  for (const auto& r : rows) {
    std::vector<std::string> line = {FormatBitrate(r.bitrate), r.variant};
    for (const auto& n : wer_names) {
      auto it = r.wer.find(n);
      line.push_back(it == r.wer.end() ? "unavailable"
                                       : FormatMetric(it->second, 2));
    }
    for (const auto& n : metric_names) {
      auto it = r.metrics.find(n);
      line.push_back(it == r.metrics.end() ? "unavailable"
                                           : FormatMetric(it->second, 3));
    }
    grid.push_back(line);
  }

  std::vector<size_t> widths(header.size(), 0);
  for (const auto& line : grid)
    for (size_t c = 0; c < line.size(); ++c)
      widths[c] = std::max(widths[c], line[c].size());
  std::ostringstream os;
  for (size_t li = 0; li < grid.size(); ++li) {
    for (size_t c = 0; c < grid[li].size(); ++c) {
      os << grid[li][c]
         << std::string(widths[c] - grid[li][c].size() + 2, ' ');
    }
    os << "\n";
    if (li == 0) {
      size_t total = 0;
      for (size_t w : widths) total += w + 2;
      os << std::string(total, '-') << "\n";
    }
  }
  return os.str();
}

EvalRow EvaluateCodec(const CodecLike& codec, const std::string& variant,
                      const std::vector<EvalItem>& test_set,
                      const AsrAdapterList& asr_adapters,
                      const MetricAdapterList& metric_adapters,
                      double target_lufs) {
  Check(!test_set.empty(), ErrorKind::kDomain, "empty test set");
  EvalRow row;
  row.bitrate = codec.bitrate();
  row.variant = variant;

  std::map<std::string, WerPool> pools;
  std::map<std::string, std::vector<double>> scores;
  for (const auto& item : test_set) {
    std::vector<std::string> ref = SplitWords(item.text);
    if (ref.empty()) {
      row.failures.push_back(item.id + ": empty reference text");
      continue;
    }
    audio::Wave normalized;
    try {
      audio::Wave decoded = codec.Roundtrip(item.clip);
      normalized = audio::NormalizeLoudness(decoded, target_lufs);
    } catch (const Error& e) {
      row.failures.push_back(item.id + ": " + e.what());
      continue;
    }
    for (const auto& [name, asr] : asr_adapters) {
      try {
        frontend::TokenSequence ts = AsrGreedyTranscribe(*asr, normalized);
        pools[name].Add(ref, SplitWords(asr->TokensToText(ts.tokens)));
      } catch (const Error& e) {
        row.failures.push_back(item.id + "/" + name + ": " + e.what());
      }
    }
    for (const MetricAdapter* m : metric_adapters) {
      if (!m->available()) continue;
      try {
        scores[m->name()].push_back(m->Compare(item.clip, normalized));
      } catch (const Error& e) {
        row.failures.push_back(item.id + "/" + m->name() + ": " + e.what());
      }
    }
  }

  for (const auto& [name, asr] : asr_adapters) {
    auto it = pools.find(name);
    MetricValue mv;
    if (it != pools.end() && it->second.ref_words > 0) {
      mv.available = true;
      mv.value = it->second.Percent();
    }
    row.wer[name] = mv;
  }
  for (const MetricAdapter* m : metric_adapters) {
    auto it = scores.find(m->name());
    MetricValue mv;
    if (it != scores.end() && !it->second.empty()) {
      double s = 0.0;
      for (double v : it->second) s += v;
      mv.available = true;
      mv.value = s / static_cast<double>(it->second.size());
    }
    row.metrics[m->name()] = mv;
  }
  return row;
}

}  // namespace eval
}  // namespace lmlc
