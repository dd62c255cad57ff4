// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace slamprune {

enum class ErrorKind {
  kDimension,
  kPrune,
  kTapeConsumed,
  kNoTape,
  kDegenerateLoss,
  kNumeric,
  kLength,
  kTooShortInput,
  kSchedule,
  kTrainingDiverged,
  kData,
  kEmptyCorpus,
  kUndefinedWer,
  kEmptyEvaluation,
  kPairing,
  kIncompleteGrid,
  kConfig,
  kMissingArtifact,
  kIo,
};

std::string_view error_kind_name(ErrorKind kind);

/// Single exception type for the library; `kind()` is the machine-readable
/// category the CLI maps to exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace slamprune
