// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Sweep results on disk (cells.json): cells with per-utterance scores plus
// the parameter accounting of each scale. Also builds cells from a table of
// published WERs so the analyses can be checked against known numbers.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "slamprune/analysis.hpp"

namespace slamprune {

struct SweepResults {
  std::map<std::string, ScaleAccounting> accounting;
  std::vector<ExperimentCell> cells;

  AccountingFn accounting_fn() const;
};

std::string results_to_json(const SweepResults& results);
SweepResults results_from_json(const std::string& text);

/// Fixture layout:
///   {"scales": [{"name", "shape", "lora_overhead"}],
///    "wer_percent": [[scale, language, layers_kept, base, lora], ...]}
/// `shape` names an analytic encoder shape ("whisper-small", ...); WERs are
/// in percent. Produces one cell per (row, base|lora) with no utterances.
SweepResults results_from_fixture(const std::string& fixture_json);

}  // namespace slamprune
