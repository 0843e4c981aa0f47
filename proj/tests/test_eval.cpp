// test_eval.cpp

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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"
#include "lmlc/eval.h"
#include "lmlc/png_io.h"
#include "lmlc/rng.h"
#include "lmlc/spectrogram_compare.h"
#include "lmlc/synthetic.h"

using namespace lmlc;

namespace {

std::string TempDir(const char* stem) {
  auto dir = std::filesystem::temp_directory_path() / "lmlc_eval_test" / stem;
  std::filesystem::create_directories(dir);
  return dir.string();
}

// Classic single-number Levenshtein, no backtrace, for cross-checking.
int OracleEditDistance(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

audio::Wave Sine(double freq, double seconds, int rate, double amp = 0.4) {
  audio::Wave w;
  w.sample_rate = rate;
  int64_t n = static_cast<int64_t>(std::llround(seconds * rate));
  w.samples.resize(n);
  for (int64_t i = 0; i < n; ++i)
    w.samples[i] = amp * std::sin(2.0 * std::numbers::pi * freq * i / rate);
  return w;
}

}  // namespace

TEST_CASE("text normalization lowercases and strips punctuation") {
  CHECK(eval::NormalizeText("Hello, World!") == "hello world");
  CHECK(eval::NormalizeText("  a   b\tc ") == "a b c");
  CHECK(eval::NormalizeText("don't") == "dont");
  CHECK(eval::NormalizeText("YEAR 1984.") == "year 1984");
  CHECK(eval::NormalizeText("") == "");
  CHECK(eval::NormalizeText("?!.,;") == "");
}

TEST_CASE("word splitting follows normalization") {
  auto words = eval::SplitWords("The cat, the CAT!");
  REQUIRE(words.size() == 4);
  CHECK(words[0] == "the");
  CHECK(words[1] == "cat");
  CHECK(words[2] == "the");
  CHECK(words[3] == "cat");
  CHECK(eval::SplitWords("...").empty());
}

TEST_CASE("canonical error rates come out exact") {
  // Identical five words: 0 percent.
  CHECK(eval::Wer(eval::SplitWords("a b c d e"),
                  eval::SplitWords("a b c d e")) == 0.0);
  // One substitution in five: 20 percent.
  CHECK(eval::Wer(eval::SplitWords("a b c d e"),
                  eval::SplitWords("a b x d e")) == 20.0);
  // One deletion and one insertion against four: 50 percent.
  CHECK(eval::Wer(eval::SplitWords("a b c d"),
                  eval::SplitWords("a c d e")) == 50.0);
}

TEST_CASE("empty references are rejected") {
  CHECK_THROWS_AS(eval::Wer({}, eval::SplitWords("a b")), Error);
}

TEST_CASE("edit counts agree with a classic distance over random pairs") {
  std::mt19937 gen(131);
  std::uniform_int_distribution<int> len(0, 10), voc(0, 4);
  const char* words[] = {"aa", "bb", "cc", "dd", "ee"};
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<std::string> ref, hyp;
    int nr = len(gen), nh = len(gen);
    for (int i = 0; i < nr; ++i) ref.push_back(words[voc(gen)]);
    for (int i = 0; i < nh; ++i) hyp.push_back(words[voc(gen)]);
    eval::EditCounts c = eval::EditDistance(ref, hyp);
    int want = OracleEditDistance(ref, hyp);
    REQUIRE(c.total() == want);
    // The split must be a consistent alignment: deletions minus insertions
    // account exactly for the length difference.
    CHECK(c.deletions - c.insertions ==
          static_cast<int>(ref.size()) - static_cast<int>(hyp.size()));
    CHECK(c.substitutions >= 0);
  }
}

TEST_CASE("the pool divides total errors by total reference words") {
  eval::WerPool pool;
  pool.Add(eval::SplitWords("a b c d e"), eval::SplitWords("a b c d e"));
  pool.Add(eval::SplitWords("a b c d e"), eval::SplitWords("x b c d e"));
  CHECK(pool.Percent() == 10.0);

  eval::WerPool empty;
  CHECK_THROWS_AS(empty.Percent(), Error);
}

TEST_CASE("pooling is invariant to utterance order") {
  std::mt19937 gen(132);
  std::uniform_int_distribution<int> len(1, 8), voc(0, 3);
  const char* words[] = {"w1", "w2", "w3", "w4"};
  std::vector<std::pair<std::vector<std::string>, std::vector<std::string>>>
      pairs;
  for (int i = 0; i < 20; ++i) {
    std::vector<std::string> ref, hyp;
    int nr = len(gen), nh = len(gen);
    for (int k = 0; k < nr; ++k) ref.push_back(words[voc(gen)]);
    for (int k = 0; k < nh; ++k) hyp.push_back(words[voc(gen)]);
    pairs.push_back({ref, hyp});
  }
  eval::WerPool forward, backward;
  for (const auto& [r, h] : pairs) forward.Add(r, h);
  for (auto it = pairs.rbegin(); it != pairs.rend(); ++it)
    backward.Add(it->first, it->second);
  CHECK(forward.Percent() == backward.Percent());
}

TEST_CASE("a pass-through codec with a perfect recognizer scores zero") {
  synthetic::SineCorpusConfig scc;
  frontend::SineTokenAsr asr(scc.vocab(), scc.sample_rate, scc.burst_s);
  auto corpus = synthetic::MakeSineCorpus(133, 4, scc);

  std::vector<eval::EvalItem> items;
  for (size_t i = 0; i < corpus.size(); ++i)
    items.push_back({"utt" + std::to_string(i), corpus[i].clip,
                     corpus[i].text});

  eval::IdentityCodec identity;
  eval::AsrAdapterList adapters = {{asr.name(), &asr}};
  eval::EvalRow row = eval::EvaluateCodec(identity, "-", items, adapters, {});
  REQUIRE(row.wer.count(asr.name()) == 1);
  REQUIRE(row.wer.at(asr.name()).available);
  CHECK(row.wer.at(asr.name()).value == 0.0);
  CHECK(row.failures.empty());
  CHECK(std::isinf(row.bitrate));
}

TEST_CASE("missing metric binaries mark the column unavailable") {
  synthetic::SineCorpusConfig scc;
  frontend::SineTokenAsr asr(scc.vocab(), scc.sample_rate, scc.burst_s);
  auto corpus = synthetic::MakeSineCorpus(134, 2, scc);
  std::vector<eval::EvalItem> items;
  for (size_t i = 0; i < corpus.size(); ++i)
    items.push_back({"utt" + std::to_string(i), corpus[i].clip,
                     corpus[i].text});

  eval::ExternalMetricAdapter pesq("pesq", "/nonexistent/pesq_binary",
                                   TempDir("metric_work"));
  CHECK_FALSE(pesq.available());

  eval::IdentityCodec identity;
  eval::AsrAdapterList adapters = {{asr.name(), &asr}};
  eval::MetricAdapterList metrics = {&pesq};
  eval::EvalRow row =
      eval::EvaluateCodec(identity, "-", items, adapters, metrics);
  REQUIRE(row.metrics.count("pesq") == 1);
  CHECK_FALSE(row.metrics.at("pesq").available);
  CHECK(row.wer.at(asr.name()).available);
}

TEST_CASE("per utterance failures are recorded without aborting") {
  synthetic::SineCorpusConfig scc;
  frontend::SineTokenAsr asr(scc.vocab(), scc.sample_rate, scc.burst_s);
  auto corpus = synthetic::MakeSineCorpus(135, 2, scc);

  std::vector<eval::EvalItem> items;
  items.push_back({"good", corpus[0].clip, corpus[0].text});
  audio::Wave silent;
  silent.sample_rate = scc.sample_rate;
  silent.samples.assign(8000, 0.0);  // loudness undefined -> pipeline error
  items.push_back({"silent", silent, "w2 w3"});
  items.push_back({"empty_ref", corpus[1].clip, "  ...  "});

  eval::IdentityCodec identity;
  eval::AsrAdapterList adapters = {{asr.name(), &asr}};
  eval::EvalRow row = eval::EvaluateCodec(identity, "-", items, adapters, {});
  CHECK(row.failures.size() == 2);
  REQUIRE(row.wer.at(asr.name()).available);  // the good item still pooled
  CHECK(row.wer.at(asr.name()).value == 0.0);
}

TEST_CASE("report rows sort by bitrate with the reference last") {
  eval::EvalReport report;
  auto mk = [](double rate, const std::string& variant) {
    eval::EvalRow r;
    r.bitrate = rate;
    r.variant = variant;
    return r;
  };
  report.rows.push_back(mk(std::numeric_limits<double>::infinity(), "-"));
  report.rows.push_back(mk(212.5, "S2"));
  report.rows.push_back(mk(212.5, "ASR"));
  report.rows.push_back(mk(187.5, "SD"));
  report.rows.push_back(mk(187.5, "TTR"));
  report.rows.push_back(mk(187.5, "ASR"));
  report.Sort();

  REQUIRE(report.rows.size() == 6);
  CHECK(report.rows[0].bitrate == 187.5);
  CHECK(report.rows[0].variant == "ASR");
  CHECK(report.rows[1].variant == "TTR");
  CHECK(report.rows[2].variant == "SD");
  CHECK(report.rows[3].variant == "ASR");
  CHECK(report.rows[3].bitrate == 212.5);
  CHECK(report.rows[4].variant == "S2");
  CHECK(std::isinf(report.rows[5].bitrate));
}

TEST_CASE("reports serialize to json and a readable table") {
  eval::EvalReport report;
  eval::EvalRow row;
  row.bitrate = 187.5;
  row.variant = "ASR";
  row.wer["sine-token"] = {true, 12.5};
  row.metrics["pesq"] = {false, 0.0};
  report.rows.push_back(row);
  eval::EvalRow ref;
  ref.bitrate = std::numeric_limits<double>::infinity();
  ref.variant = "-";
  ref.wer["sine-token"] = {true, 1.0};
  report.rows.push_back(ref);
  report.metadata["profile"] = "tiny";

  nlohmann::json j = nlohmann::json::parse(report.ToJson());
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][0]["bitrate"] == 187.5);
  CHECK(j["rows"][0]["wer"]["sine-token"] == 12.5);
  CHECK(j["rows"][0]["metrics"]["pesq"] == "unavailable");
  CHECK(j["rows"][1]["bitrate"] == "inf");
  CHECK(j["metadata"]["profile"] == "tiny");

  std::string table = report.ToTable();
  CHECK(table.find("Rate (bps)") != std::string::npos);
  CHECK(table.find("187.5") != std::string::npos);
  CHECK(table.find("ASR") != std::string::npos);
  CHECK(table.find("unavailable") != std::string::npos);
}

TEST_CASE("png images survive a write and read cycle") {
  Rng rng(136);
  png::Image img(37, 23);
  for (int y = 0; y < img.height; ++y)
    for (int x = 0; x < img.width; ++x)
      img.Set(x, y, static_cast<uint8_t>(rng.UniformInt(256)),
              static_cast<uint8_t>(rng.UniformInt(256)),
              static_cast<uint8_t>(rng.UniformInt(256)));
  std::string path = TempDir("png") + "/roundtrip.png";
  png::WritePng(path, img);
  png::Image back = png::ReadPng(path);
  REQUIRE(back.width == img.width);
  REQUIRE(back.height == img.height);
  CHECK(back.rgb == img.rgb);
}

TEST_CASE("reading garbage as png raises a format error") {
  std::string path = TempDir("png") + "/garbage.png";
  {
    std::ofstream out(path, std::ios::binary);
    out << "definitely not a png";
  }
  CHECK_THROWS_AS(png::ReadPng(path), Error);
}

TEST_CASE("identical signals produce identical spectrogram panels") {
  audio::Wave w = Sine(440.0, 1.0, 8000);
  std::string path = TempDir("spec") + "/same.png";
  spect::CompareConfig cfg;
  cfg.n_fft = 256;
  cfg.hop = 64;
  spect::CompareResult r = spect::SpectrogramCompare(w, w, path, cfg);
  REQUIRE(r.top.same_shape(r.bottom));
  for (int64_t i = 0; i < r.top.numel(); ++i)
    CHECK(r.top.at(i) == r.bottom.at(i));
  CHECK(std::filesystem::exists(path));
  png::Image img = png::ReadPng(path);
  CHECK(img.width > 100);
  CHECK(img.height > 100);
}

TEST_CASE("different signals separate in the comparison") {
  audio::Wave a = Sine(440.0, 1.0, 8000);
  audio::Wave b = Sine(1200.0, 1.0, 8000, 0.2);
  std::string path = TempDir("spec") + "/diff.png";
  spect::CompareConfig cfg;
  cfg.n_fft = 256;
  cfg.hop = 64;
  spect::CompareResult r = spect::SpectrogramCompare(a, b, path, cfg);
  double diff = 0.0;
  for (int64_t i = 0; i < r.top.numel(); ++i)
    diff += std::abs(r.top.at(i) - r.bottom.at(i));
  CHECK(diff / static_cast<double>(r.top.numel()) > 1.0);
}

TEST_CASE("degenerate compare inputs are rejected") {
  audio::Wave empty;
  empty.sample_rate = 8000;
  audio::Wave ok = Sine(440.0, 1.0, 8000);
  std::string path = TempDir("spec") + "/never.png";
  CHECK_THROWS_AS(spect::SpectrogramCompare(empty, ok, path, {}), Error);

  audio::Wave other_rate = Sine(440.0, 1.0, 16000);
  CHECK_THROWS_AS(spect::SpectrogramCompare(ok, other_rate, path, {}),
                  Error);
}
