// data.cpp

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

#include "lmlc/data.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace lmlc {
namespace data {

namespace {

std::string Lowercase(std::string s) {
  for (char& c : s)
    c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

bool StartsWith(const std::string& s, const std::string& prefix) {
  return s.size() >= prefix.size() &&
         s.compare(0, prefix.size(), prefix) == 0;
}

}  // namespace

std::vector<SubwordAlignment> ParseAlignments(const std::string& path) {
  std::ifstream is(path);
  Check(is.good(), ErrorKind::kIo, "cannot open: ", path);
  std::vector<SubwordAlignment> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ls(line);
    SubwordAlignment a;
    std::string start_str, end_str;
    Check(static_cast<bool>(std::getline(ls, a.token, '\t')) &&
              static_cast<bool>(std::getline(ls, start_str, '\t')) &&
              static_cast<bool>(std::getline(ls, end_str)),
          ErrorKind::kFormat, path, ":", line_no,
          ": expected <token>\\t<start>\\t<end>");
    try {
      a.start_s = std::stod(start_str);
      a.end_s = std::stod(end_str);
    } catch (const std::exception&) {
      Raise(ErrorKind::kFormat, path, ":", line_no, ": bad number");
    }
    Check(a.start_s >= 0.0 && a.end_s > a.start_s, ErrorKind::kFormat, path,
          ":", line_no, ": interval must satisfy 0 <= start < end");
    a.token = Lowercase(a.token);
    Check(!a.token.empty(), ErrorKind::kFormat, path, ":", line_no,
          ": empty token");
    if (!out.empty()) {
      Check(a.start_s >= out.back().end_s, ErrorKind::kFormat, path, ":",
            line_no, ": intervals overlap or are out of order");
    }
    out.push_back(std::move(a));
  }
  return out;
}

void WriteAlignments(const std::string& path,
                     const std::vector<SubwordAlignment>& alignments) {
  std::ofstream os(path);
  Check(os.good(), ErrorKind::kIo, "cannot open for write: ", path);
  os.setf(std::ios::fixed);
  os.precision(4);
  for (const auto& a : alignments)
    os << a.token << "\t" << a.start_s << "\t" << a.end_s << "\n";
  os.flush();
  Check(os.good(), ErrorKind::kIo, "write failed: ", path);
}

void ImportTextGrid(const std::string& textgrid_path,
                    const std::string& out_path) {
  std::ifstream is(textgrid_path);
  Check(is.good(), ErrorKind::kIo, "cannot open: ", textgrid_path);
  std::string line;
  bool in_interval_tier = false;
  bool past_first_tier = false;
  double xmin = -1.0, xmax = -1.0;
  std::vector<SubwordAlignment> intervals;

  auto trim = [](std::string s) {
    size_t b = s.find_first_not_of(" \t\r");
    size_t e = s.find_last_not_of(" \t\r");
    if (b == std::string::npos) return std::string();
    return s.substr(b, e - b + 1);
  };
  auto value_after = [&trim](const std::string& s) {
    size_t eq = s.find('=');
    return eq == std::string::npos ? std::string() : trim(s.substr(eq + 1));
  };

  while (std::getline(is, line)) {
    std::string t = trim(line);
    if (t.find("class") != std::string::npos &&
        t.find("IntervalTier") != std::string::npos) {
      if (in_interval_tier) {
        past_first_tier = true;
      } else {
        in_interval_tier = true;
      }
      continue;
    }
    if (!in_interval_tier || past_first_tier) continue;
    if (StartsWith(t, "xmin")) {
      xmin = std::stod(value_after(t));
    } else if (StartsWith(t, "xmax")) {
      xmax = std::stod(value_after(t));
    } else if (StartsWith(t, "text")) {
      std::string v = value_after(t);
      if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        v = v.substr(1, v.size() - 2);
      v = trim(v);
      if (!v.empty() && xmin >= 0.0 && xmax > xmin)
        intervals.push_back({Lowercase(v), xmin, xmax});
      xmin = xmax = -1.0;
    }
  }
  Check(in_interval_tier, ErrorKind::kFormat,
        "no IntervalTier found in: ", textgrid_path);

  WriteAlignments(out_path, intervals);
}

std::vector<Utterance> ReadManifest(const std::string& path) {
  std::ifstream is(path);
  Check(is.good(), ErrorKind::kIo, "cannot open: ", path);
  std::vector<Utterance> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty()) continue;
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const std::exception& e) {
      Raise(ErrorKind::kFormat, path, ":", line_no, ": bad JSON: ", e.what());
    }
    Utterance u;
    try {
      u.id = j.at("id").get<std::string>();
      u.audio_path = j.at("audio_path").get<std::string>();
      u.text = j.at("text").get<std::string>();
      u.alignment_path = j.at("alignment_path").get<std::string>();
      u.source_text_id = j.at("source_text_id").get<std::string>();
      u.order_index = j.at("order_index").get<int>();
    } catch (const std::exception& e) {
      Raise(ErrorKind::kFormat, path, ":", line_no, ": missing field: ",
            e.what());
    }
    out.push_back(std::move(u));
  }
  return out;
}

void WriteManifest(const std::string& path,
                   const std::vector<Utterance>& utterances) {
  std::ofstream os(path);
  Check(os.good(), ErrorKind::kIo, "cannot open for write: ", path);
  for (const auto& u : utterances) {
    nlohmann::json j{{"id", u.id},
                     {"audio_path", u.audio_path},
                     {"text", u.text},
                     {"alignment_path", u.alignment_path},
                     {"source_text_id", u.source_text_id},
                     {"order_index", u.order_index}};
    os << j.dump() << "\n";
  }
  os.flush();
  Check(os.good(), ErrorKind::kIo, "write failed: ", path);
}

Splits SplitCorpus(const std::vector<Utterance>& utterances,
                   const std::vector<std::string>& test_prefixes,
                   const std::vector<std::string>& val_prefixes) {
  Splits s;
  for (const auto& u : utterances) {
    bool in_test = std::any_of(
        test_prefixes.begin(), test_prefixes.end(),
        [&u](const std::string& p) { return StartsWith(u.source_text_id, p); });
    bool in_val = std::any_of(
        val_prefixes.begin(), val_prefixes.end(),
        [&u](const std::string& p) { return StartsWith(u.source_text_id, p); });
    Check(!(in_test && in_val), ErrorKind::kDomain, "utterance ", u.id,
          " matches both test and val prefixes");
    if (in_test) {
      s.test.push_back(u);
    } else if (in_val) {
      s.val.push_back(u);
    } else {
      s.train.push_back(u);
    }
  }
  return s;
}

std::vector<TrainingSegment> BuildSegments(
    const std::vector<UtteranceAudio>& utterances, double min_s,
    double max_s) {
  Check(min_s > 0.0 && max_s > min_s, ErrorKind::kDomain,
        "bad segment bounds");
  std::vector<TrainingSegment> out;
  size_t i = 0;
  while (i < utterances.size()) {
    const auto& first = utterances[i];
    Check(!first.clip.samples.empty() && first.clip.sample_rate > 0,
          ErrorKind::kDomain, "utterance ", first.meta.id, " has no audio");
    TrainingSegment seg;
    seg.clip.sample_rate = first.clip.sample_rate;
    seg.source_text_id = first.meta.source_text_id;
    seg.start_utterance_id = first.meta.id;

    size_t j = i;
    while (j < utterances.size()) {
      const auto& u = utterances[j];
      if (u.meta.source_text_id != seg.source_text_id) break;
      Check(u.clip.sample_rate == seg.clip.sample_rate, ErrorKind::kDomain,
            "mixed sample rates inside source text ", seg.source_text_id);
      double u_dur =
          static_cast<double>(u.clip.samples.size()) / u.clip.sample_rate;
      double cur_dur = static_cast<double>(seg.clip.samples.size()) /
                       seg.clip.sample_rate;
      if (j > i && (cur_dur >= min_s || cur_dur + u_dur > max_s)) break;

      double offset_s = cur_dur;
      seg.clip.samples.insert(seg.clip.samples.end(), u.clip.samples.begin(),
                              u.clip.samples.end());
      for (const auto& a : u.alignments) {
        seg.alignments.push_back(
            {a.token, a.start_s + offset_s, a.end_s + offset_s});
      }
      if (!seg.text.empty()) seg.text += " ";
      seg.text += u.meta.text;
      ++j;
    }

    seg.duration_s = static_cast<double>(seg.clip.samples.size()) /
                     seg.clip.sample_rate;
    if (j == i + 1 && seg.duration_s > max_s) {
      seg.oversize = true;
      LogWarn(StrCat("utterance ", first.meta.id, " runs ", seg.duration_s,
                     " s, past the ", max_s, " s segment cap; kept as-is"));
    }
    out.push_back(std::move(seg));
    i = j;
  }
  return out;
}

}  // namespace data
}  // namespace lmlc
