// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/errors.hpp"

namespace slamprune {

std::string_view error_kind_name(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kPrune: return "prune";
    case ErrorKind::kTapeConsumed: return "tape-consumed";
    case ErrorKind::kNoTape: return "no-tape";
    case ErrorKind::kDegenerateLoss: return "degenerate-loss";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kLength: return "length";
    case ErrorKind::kTooShortInput: return "too-short-input";
    case ErrorKind::kSchedule: return "schedule";
    case ErrorKind::kTrainingDiverged: return "training-diverged";
    case ErrorKind::kData: return "data";
    case ErrorKind::kEmptyCorpus: return "empty-corpus";
    case ErrorKind::kUndefinedWer: return "undefined-wer";
    case ErrorKind::kEmptyEvaluation: return "empty-evaluation";
    case ErrorKind::kPairing: return "pairing";
    case ErrorKind::kIncompleteGrid: return "incomplete-grid";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kMissingArtifact: return "missing-artifact";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace slamprune
