// Copyright 2026 The spot authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace spot {

enum class Err {
  // usage-class
  Usage,
  QueryTooShort,
  WrongLength,
  // data-class
  EmptyString,
  UnsupportedCharacter,
  EmptyCorpus,
  ImageTooSmall,
  InsufficientData,
  DimensionMismatch,
  ShapeMismatch,
  KindMismatch,
  InsufficientPairs,
  OutOfBounds,
  UnknownBigram,
  NoKnownBigrams,
  MissingPageMap,
  MissingData,
  VersionMismatch,
  Io,
  // internal-class
  NumericalFailure,
  Internal,
};

/// Single exception type for the whole pipeline. The code determines the
/// process exit code at the CLI boundary (2 usage, 3 data, 4 internal).
class SpotError : public std::runtime_error {
 public:
  SpotError(Err code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}

  Err code() const { return code_; }

  int exit_code() const {
    switch (code_) {
      case Err::Usage:
      case Err::QueryTooShort:
      case Err::WrongLength:
        return 2;
      case Err::NumericalFailure:
      case Err::Internal:
        return 4;
      default:
        return 3;
    }
  }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& msg) {
  throw SpotError(code, msg);
}

}  // namespace spot
