// wer.cpp

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

#include <cctype>
#include <sstream>

#include "lmlc/eval.h"

namespace lmlc {
namespace eval {

std::string NormalizeText(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(c)));
    } else if (std::isspace(c)) {
      pending_space = true;
    }
    // punctuation is dropped without breaking the word
  }
  return out;
}

std::vector<std::string> SplitWords(const std::string& text) {
  std::vector<std::string> words;
  std::istringstream in(NormalizeText(text));
  std::string w;
  while (in >> w) words.push_back(w);
  return words;
}

EditCounts EditDistance(const std::vector<std::string>& ref,
                        const std::vector<std::string>& hyp) {
  size_t n = ref.size(), m = hyp.size();
  // cost[i][j]: edits to turn ref[0..i) into hyp[0..j)
  std::vector<std::vector<int64_t>> cost(n + 1,
                                         std::vector<int64_t>(m + 1, 0));
  for (size_t i = 0; i <= n; ++i) cost[i][0] = static_cast<int64_t>(i);
  for (size_t j = 0; j <= m; ++j) cost[0][j] = static_cast<int64_t>(j);
  for (size_t i = 1; i <= n; ++i) {
    for (size_t j = 1; j <= m; ++j) {
      int64_t sub = cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      int64_t del = cost[i - 1][j] + 1;
      int64_t ins = cost[i][j - 1] + 1;
      cost[i][j] = std::min(sub, std::min(del, ins));
    }
  }
  // Walk back to split the total into the three operation kinds.
  EditCounts ec;
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 &&
        cost[i][j] == cost[i - 1][j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1)) {
      if (ref[i - 1] != hyp[j - 1]) ++ec.substitutions;
      --i;
      --j;
    } else if (i > 0 && cost[i][j] == cost[i - 1][j] + 1) {
      ++ec.deletions;
      --i;
    } else {
      ++ec.insertions;
      --j;
    }
  }
  return ec;
}

double Wer(const std::vector<std::string>& ref,
           const std::vector<std::string>& hyp) {
  Check(!ref.empty(), ErrorKind::kDomain,
        "empty reference after normalization");
  return 100.0 * static_cast<double>(EditDistance(ref, hyp).total()) /
         static_cast<double>(ref.size());
}

void WerPool::Add(const std::vector<std::string>& ref,
                  const std::vector<std::string>& hyp) {
  Check(!ref.empty(), ErrorKind::kDomain,
        "empty reference after normalization");
  errors += EditDistance(ref, hyp).total();
  ref_words += static_cast<int64_t>(ref.size());
}

double WerPool::Percent() const {
  Check(ref_words > 0, ErrorKind::kDomain, "no reference words pooled");
  return 100.0 * static_cast<double>(errors) /
         static_cast<double>(ref_words);
}

}  // namespace eval
}  // namespace lmlc
