// lmlc/common.h

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

#ifndef LMLC_COMMON_H_
#define LMLC_COMMON_H_

#include <cstdint>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace lmlc {

// All recoverable failures surface as lmlc::Error with a category tag so the
// CLI can print structured messages and tests can match on kind.
enum class ErrorKind {
  kIo,
  kFormat,
  kShape,
  kDomain,     // precondition on values (empty input, overlap, out of range)
  kState,      // missing checkpoint, wrong stage, unregistered adapter
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

const char* ErrorKindName(ErrorKind kind);

namespace detail {
inline void StrAppend(std::ostringstream&) {}
template <typename T, typename... Rest>
void StrAppend(std::ostringstream& os, const T& v, const Rest&... rest) {
  os << v;
  StrAppend(os, rest...);
}
}  // namespace detail

template <typename... Args>
std::string StrCat(const Args&... args) {
  std::ostringstream os;
  os.precision(17);
  detail::StrAppend(os, args...);
  return os.str();
}

template <typename... Args>
[[noreturn]] void Raise(ErrorKind kind, const Args&... args) {
  throw Error(kind, StrCat(args...));
}

template <typename... Args>
void Check(bool cond, ErrorKind kind, const Args&... args) {
  if (!cond) Raise(kind, args...);
}

void LogInfo(const std::string& msg);
void LogWarn(const std::string& msg);

}  // namespace lmlc

#endif  // LMLC_COMMON_H_
