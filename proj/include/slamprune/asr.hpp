// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// The full speech pipeline: frozen (pruned) encoder -> trainable projector ->
// frozen LM with optional LoRA adapters. Training, encoder pretraining and
// beam decoding live here.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "slamprune/beam_search.hpp"
#include "slamprune/encoder.hpp"
#include "slamprune/language_model.hpp"
#include "slamprune/optim.hpp"
#include "slamprune/projector.hpp"
#include "slamprune/synth_data.hpp"

namespace slamprune {

struct AsrBundle {
  EncoderConfig encoder_config;
  EncoderWeights encoder;  // already truncated to prune.keep_layers
  PruneSpec prune;
  ProjectorConfig projector_config;
  ProjectorWeights projector;
  LmConfig lm_config;
  LmWeights lm;
  std::optional<LoraAdapterSet> lora;

  /// Projector tensors, plus adapter tensors when LoRA is enabled.
  ParamList trainable() const;
  /// Encoder and base LM tensors.
  ParamList frozen() const;
};

/// Assembles a bundle for one grid cell: the encoder truncated to
/// `keep_layers`, a freshly initialized projector and, if requested, fresh
/// adapters. The base LM is shared, not copied.
AsrBundle make_bundle(const EncoderConfig& encoder_config,
                      const EncoderWeights& full_encoder, std::size_t keep_layers,
                      const ProjectorConfig& projector_config, const LmConfig& lm_config,
                      const LmWeights& lm, const std::optional<LoraConfig>& lora,
                      std::uint64_t seed);

/// Trains the trainable tensors of `bundle` on `corpus`. Encoder outputs are
/// computed once per utterance since the encoder is frozen and has no
/// dropout. Returns the per-step loss trace.
std::vector<LossRecord> train_asr(AsrBundle& bundle, const std::vector<Utterance>& corpus,
                                  const TrainRecipe& recipe);

/// Teacher-forced loss of one utterance in evaluation mode.
double asr_loss(const AsrBundle& bundle, const Utterance& utterance);

struct Hypothesis {
  std::string utterance_id;
  std::vector<int> tokens;
  std::string text;  // normalized
  double score = 0.0;
  bool truncated = false;
};

Hypothesis beam_decode(const AsrBundle& bundle, const Utterance& utterance,
                       std::size_t beam_size = 2, std::size_t max_len = 0);

struct EncoderPretrainOptions {
  TrainRecipe recipe;
};

/// Pretrains the full encoder on frame-level character classification
/// through a linear head that is discarded afterwards. Returned weights are
/// frozen.
EncoderWeights pretrain_encoder(const EncoderConfig& config, const Vocab& vocab,
                                const std::vector<Utterance>& corpus,
                                const EncoderPretrainOptions& options,
                                std::uint64_t init_seed,
                                std::vector<LossRecord>* trace = nullptr);

/// `step,lr,loss` with a header row.
std::string loss_trace_csv(const std::vector<LossRecord>& trace);

}  // namespace slamprune
