// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Pruning x LoRA experiment grid: cell coordinates, derived seeds and a
// worker pool that evaluates cells independently.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "slamprune/wer.hpp"

namespace slamprune {

struct CellSpec {
  std::string scale;
  std::string tier;
  std::string language;
  std::size_t layers_kept = 0;
  bool lora = false;
};

struct ExperimentCell {
  CellSpec spec;
  std::uint64_t seed = 0;
  bool failed = false;
  std::string failure;  // error category and message when failed
  double wer = 0.0;     // fraction; may exceed 1
  AlignmentCounts totals;
  std::vector<UtteranceScore> utterances;
  std::vector<std::string> excluded;
};

/// Hash of (master, scale, tier, depth, lora); independent of which other
/// cells exist.
std::uint64_t cell_seed(std::uint64_t master_seed, const CellSpec& spec);

struct GridScale {
  std::string name;
  std::size_t num_layers = 0;
};
struct GridTier {
  std::string name;
  std::string language;
};

/// Every (scale, tier, depth, lora) coordinate; depths follow
/// depth_schedule(L, step) per scale.
std::vector<CellSpec> grid_specs(const std::vector<GridScale>& scales,
                                 const std::vector<GridTier>& tiers, std::size_t depth_step,
                                 const std::vector<bool>& lora_options);

/// Evaluates one cell; may throw slamprune::Error, which marks the cell failed.
using CellRunner = std::function<ExperimentCell(const CellSpec& spec, std::uint64_t seed)>;

/// Runs every spec on up to `workers` threads. Output order follows `specs`
/// and values do not depend on the worker count.
std::vector<ExperimentCell> run_grid(const std::vector<CellSpec>& specs,
                                     std::uint64_t master_seed, std::size_t workers,
                                     const CellRunner& runner);

}  // namespace slamprune
