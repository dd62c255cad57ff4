// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Post-sweep analyses over ExperimentCells: compensation deltas, sweet
// spots, safe pruning zone, utterance-level degradation, word-level error
// change and the severe-error / full-recovery filter. WER differences are
// reported in percentage points.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slamprune/sweep.hpp"

namespace slamprune {

/// Looks up the unique successful cell at a coordinate.
const ExperimentCell* find_cell(const std::vector<ExperimentCell>& cells,
                                const std::string& scale, const std::string& language,
                                std::size_t layers_kept, bool lora);

/// Full depth per scale: the largest layers_kept present.
std::map<std::string, std::size_t> full_depths(const std::vector<ExperimentCell>& cells);

struct CompensationDelta {
  std::string scale;
  std::string language;
  double full_delta = 0.0;    // WER(full) - WER(full, +LoRA)
  double pruned_delta = 0.0;  // same at L - anchor_removed
};

/// One row per (scale, language) in first-appearance order. A missing
/// coordinate raises kIncompleteGrid.
std::vector<CompensationDelta> compensation_delta(const std::vector<ExperimentCell>& cells,
                                                  std::size_t anchor_removed = 2);

struct DegradationReport {
  std::size_t utterances = 0;
  std::size_t degraded = 0;
  double pct_degraded = 0.0;
  double pct_preserved_or_improved = 0.0;
};

/// An utterance is degraded when its WER strictly increases from baseline
/// to variant. Utterance-id sets must match (kPairing otherwise).
DegradationReport utterance_degradation(const ExperimentCell& baseline,
                                        const ExperimentCell& variant);

struct WordErrorChange {
  std::optional<double> substitutions, insertions, deletions, total;  // percent
};

/// Percent change of summed counts from base to lora; a category with a
/// zero base count is left undefined.
WordErrorChange word_error_change(const ExperimentCell& base, const ExperimentCell& lora);

struct RecoveryExample {
  std::string utterance_id;
  std::string reference;
  std::string base_hypothesis;
  std::string lora_hypothesis;
  double base_wer = 0.0;
  double lora_wer = 0.0;
};

/// Utterances with base WER > severe_threshold and LoRA WER exactly zero.
std::vector<RecoveryExample> severe_recovery_filter(const ExperimentCell& base,
                                                    const ExperimentCell& lora,
                                                    double severe_threshold = 0.8);

struct ScaleAccounting {
  std::int64_t full_params = 0;
  std::int64_t layer_params = 0;
  std::int64_t lora_overhead = 0;
};
using AccountingFn = std::function<ScaleAccounting(const std::string& scale)>;

struct SweetSpot {
  std::string scale;
  std::optional<std::size_t> layers_kept;  // empty: nothing qualifies
  std::int64_t params = 0;
  std::int64_t net_delta = 0;
  std::map<std::string, double> wers;  // language -> WER fraction
};

/// Deepest pruned+LoRA configuration whose WER is <= the unpruned baseline
/// on every language of its scale.
std::vector<SweetSpot> sweet_spot(const std::vector<ExperimentCell>& cells,
                                  const AccountingFn& accounting);

struct SafeZone {
  std::string scale;
  std::string language;
  /// Smallest depth such that it and every deeper-kept depth stay within
  /// the threshold of the full baseline (no LoRA).
  std::size_t min_layers_kept = 0;
  std::size_t layers_removable = 0;
};

std::vector<SafeZone> safe_zone(const std::vector<ExperimentCell>& cells,
                                double threshold_points = 4.0);

// ---- report files --------------------------------------------------------

struct AnalysisOptions {
  std::size_t anchor_removed = 2;
  double severe_threshold = 0.8;
  double safe_zone_points = 4.0;
};

/// Writes table2_wer.csv .. table6_worderrors.csv and table8_examples.txt
/// (plus safe_zone.csv) into `dir`. Analyses that need per-utterance data
/// are skipped for cells that carry none.
void write_reports(const std::filesystem::path& dir, const std::vector<ExperimentCell>& cells,
                   const AccountingFn& accounting, const AnalysisOptions& options);

}  // namespace slamprune
