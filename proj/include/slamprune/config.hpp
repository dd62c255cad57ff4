// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration: a JSON document with a fixed schema. Unknown
// keys, wrong types and out-of-range values raise kConfig with the dotted
// path of the offending field.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "slamprune/analysis.hpp"
#include "slamprune/encoder.hpp"
#include "slamprune/language_model.hpp"
#include "slamprune/optim.hpp"
#include "slamprune/projector.hpp"
#include "slamprune/synth_data.hpp"

namespace slamprune {

struct DataConfig {
  std::uint64_t seed = 7;
  double noise_sigma = 1.0;
  double coarticulation = 0.6;
  std::size_t frames_per_char = 5;
  std::vector<TierSpec> tiers = default_tiers();
  /// Utterances per language generated for encoder pretraining.
  std::size_t encoder_pretrain_per_language = 400;
  /// Transcripts per language for text-only LM pretraining.
  std::size_t lm_text_per_language = 1500;
  std::size_t min_frames = 5;
  std::size_t max_frames = 400;
};

struct ScaleConfig {
  std::string name;
  EncoderConfig encoder;
};

struct GridConfig {
  std::size_t depth_step = 2;
  std::vector<bool> lora_options{false, true};
  std::vector<std::string> scales;  // empty: all
  std::vector<std::string> tiers;   // empty: all
};

struct EvalConfig {
  std::size_t beam_size = 2;
  std::size_t max_len = 0;  // 0: as long as the LM context allows
};

struct ExperimentConfig {
  std::filesystem::path output_dir = "runs/default";
  std::uint64_t master_seed = 1;
  DataConfig data;
  std::vector<ScaleConfig> scales{{"desk8", EncoderConfig{}}};
  TrainRecipe encoder_pretrain;
  ProjectorConfig projector;  // in_dim/out_dim follow encoder/LM widths
  LmConfig lm;                // vocab derived from the language profiles
  LmPretrainOptions lm_pretrain;
  LoraConfig lora_default;
  std::map<std::string, LoraConfig> lora_by_tier;
  TrainRecipe train_default;
  std::map<std::string, TrainRecipe> train_by_tier;
  GridConfig grid;
  EvalConfig eval;
  AnalysisOptions analysis;

  const ScaleConfig& scale(const std::string& name) const;
  const TierSpec& tier(const std::string& name) const;
  LoraConfig lora_for(const std::string& tier) const;
  TrainRecipe train_for(const std::string& tier) const;
  /// Language profiles with the configured noise settings applied.
  std::vector<LanguageProfile> profiles() const;
  LanguageProfile profile(const std::string& name) const;
};

/// Character vocabulary covering every profile alphabet plus space and
/// apostrophe.
Vocab study_vocab(const std::vector<LanguageProfile>& profiles);

ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Canonical JSON of the fully resolved configuration (defaults included).
std::string to_json(const ExperimentConfig& config);
/// git-style hash of to_json(config).
std::string config_hash(const ExperimentConfig& config);

}  // namespace slamprune
