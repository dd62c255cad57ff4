// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end desk study: corpora, pretrained encoder/LM, and the per-cell
// train + decode + score routine used by the sweep.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "slamprune/asr.hpp"
#include "slamprune/config.hpp"
#include "slamprune/sweep.hpp"

namespace slamprune {

/// Deterministic child seed for a named purpose.
std::uint64_t derive_seed(std::uint64_t master_seed, const std::string& label);

struct StudyData {
  std::map<std::string, CorpusSplits> tiers;
  std::vector<Utterance> encoder_pretrain;
  std::vector<std::string> lm_text;
};

/// Generates every corpus in memory. Splits are duration-filtered.
StudyData make_study_data(const ExperimentConfig& config);

/// Layout under `dir`: <tier>/{train,dev,test}.tsv, pretrain/train.tsv,
/// lm_text.txt, manifest.json. Raises kIo if a manifest exists and !force.
void write_study_data(const std::filesystem::path& dir, const ExperimentConfig& config,
                      const StudyData& data, bool force);
/// Raises kMissingArtifact when the manifest is absent.
StudyData read_study_data(const std::filesystem::path& dir, const ExperimentConfig& config);

struct StudyModels {
  LmWeights lm;
  std::map<std::string, EncoderWeights> encoders;  // full depth, frozen
};

struct PretrainTraces {
  std::vector<LossRecord> lm;
  std::map<std::string, std::vector<LossRecord>> encoders;
};

StudyModels pretrain_models(const ExperimentConfig& config, const StudyData& data,
                            PretrainTraces* traces = nullptr);

/// models/lm.ckpt and models/encoder_<scale>.ckpt.
void save_models(const std::filesystem::path& dir, const StudyModels& models);
StudyModels load_models(const std::filesystem::path& dir, const ExperimentConfig& config);

struct CellArtifacts {
  std::vector<LossRecord> trace;
  std::vector<Hypothesis> hypotheses;
  ParamList trained;  // projector (+ adapters)
};

AsrBundle cell_bundle(const ExperimentConfig& config, const StudyModels& models,
                      const CellSpec& spec, std::uint64_t seed);

/// Trains a fresh projector (and adapters) for the cell, decodes the tier's
/// test split with beam search and scores it.
ExperimentCell run_cell(const ExperimentConfig& config, const StudyData& data,
                        const StudyModels& models, const CellSpec& spec, std::uint64_t seed,
                        CellArtifacts* artifacts = nullptr);

/// Cells for the configured grid (scales x tiers x depths x LoRA options).
std::vector<CellSpec> study_grid(const ExperimentConfig& config);

/// Parameter accounting of the desk encoders (LoRA overhead at the default
/// rank).
ScaleAccounting desk_accounting(const ExperimentConfig& config, const std::string& scale);

std::string cell_name(const CellSpec& spec);

}  // namespace slamprune
