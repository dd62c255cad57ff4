// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Small character-level decoder-only LM. Input sequences are
//   [prefix rows] ++ [BOS] ++ [text tokens]
// with causal attention throughout. Position ids restart at zero for the
// text segment, so text position m and prefix row m share a position id; a
// learned segment embedding tells the two segments apart.

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "slamprune/optim.hpp"
#include "slamprune/params.hpp"
#include "slamprune/tensor.hpp"

namespace slamprune {

class Vocab {
 public:
  static constexpr std::string_view kBos = "<s>";
  static constexpr std::string_view kEos = "</s>";

  Vocab() = default;
  /// `symbols` must contain kBos and kEos; every other entry is one code point.
  explicit Vocab(std::vector<std::string> symbols);
  /// BOS, EOS, then the given characters in sorted order (deduplicated).
  static Vocab from_characters(const std::vector<std::string>& chars);

  int bos() const { return bos_; }
  int eos() const { return eos_; }
  std::size_t size() const { return symbols_.size(); }
  const std::vector<std::string>& symbols() const { return symbols_; }
  bool contains(std::string_view symbol) const;
  int id(std::string_view symbol) const;
  std::vector<int> encode(std::string_view text) const;
  /// Concatenates symbols, skipping BOS/EOS.
  std::string decode(std::span<const int> ids) const;

 private:
  std::vector<std::string> symbols_;
  int bos_ = -1;
  int eos_ = -1;
};

struct LmConfig {
  Vocab vocab;
  std::size_t d_model = 64;
  std::size_t num_layers = 2;
  std::size_t num_heads = 4;
  std::size_t max_seq = 128;
  std::size_t ffn_mult = 4;

  void validate() const;
};

enum class LoraTarget : int { kQ = 0, kK = 1, kV = 2, kO = 3 };
std::string_view lora_target_name(LoraTarget t);
LoraTarget parse_lora_target(std::string_view name);

struct LoraConfig {
  std::size_t rank = 16;
  double alpha = 32.0;
  double dropout_p = 0.1;
  std::vector<LoraTarget> targets{LoraTarget::kQ, LoraTarget::kK, LoraTarget::kV,
                                  LoraTarget::kO};

  double scale() const { return alpha / static_cast<double>(rank); }
  void validate() const;
};

struct LoraAdapter {
  nn::Tensor a;  // [rank x d_in], random init
  nn::Tensor b;  // [d_out x rank], zero init
};

struct LoraAdapterSet {
  LoraConfig config;
  std::vector<std::array<std::optional<LoraAdapter>, 4>> layers;

  const LoraAdapter* find(std::size_t layer, LoraTarget target) const;
  ParamList named() const;
  std::size_t param_count() const;
  static LoraAdapterSet from_named(const LoraConfig& config,
                                   std::size_t num_layers,
                                   const ParamList& params);
};

LoraAdapterSet init_lora(const LmConfig& lm, const LoraConfig& config,
                         std::uint64_t seed);

/// x W^T + scale * (dropout(x) A^T) B^T. With B == 0 the result equals the
/// base projection exactly.
nn::Tensor lora_forward(const nn::Tensor& w, const LoraAdapter* adapter,
                        const nn::Tensor& x, double scale, double dropout_p,
                        bool train, nn::Rng* rng);

struct LmBlock {
  nn::Tensor ln1_g, ln1_b;
  nn::Tensor wq, wk, wv, wo;
  nn::Tensor ln2_g, ln2_b;
  nn::Tensor fc1_w, fc1_b, fc2_w, fc2_b;
};

struct LmWeights {
  nn::Tensor tok_emb;  // [V x d]
  nn::Tensor pos_emb;  // [max_seq x d]
  nn::Tensor seg_emb;  // [2 x d]: prefix, text
  std::vector<LmBlock> blocks;
  nn::Tensor lnf_g, lnf_b;
  nn::Tensor head_w;  // [V x d]

  ParamList named() const;
  static LmWeights from_named(const ParamList& params);
};

LmWeights init_lm(const LmConfig& config, std::uint64_t seed);

/// One forward configuration of the LM: frozen weights plus optional adapters.
struct LmRun {
  const LmConfig& config;
  const LmWeights& weights;
  const LoraAdapterSet* lora = nullptr;
  bool train = false;
  nn::Rng* rng = nullptr;
};

/// Logits for every row of [prefix ++ BOS ++ text_inputs]; text_inputs must
/// not include BOS.
nn::Tensor lm_logits(const LmRun& run, const nn::Tensor& prefix,
                     std::span<const int> text_inputs);

struct AsrForward {
  nn::Tensor logits;         // every sequence row
  std::vector<int> targets;  // label per row (0 where masked)
  std::vector<bool> mask;    // true only on rows predicting a target token
  std::size_t prefix_len = 0;
  nn::Tensor loss;

  /// Rows S .. S+n: the positions that predict target tokens and EOS.
  nn::Tensor target_logits() const;
};

/// Teacher-forced pass over prefix ++ BOS ++ targets; loss covers the target
/// tokens and the closing EOS only.
AsrForward forward_asr(const LmRun& run, const nn::Tensor& speech_prefix,
                       std::span<const int> target_tokens);

/// Log-probabilities of the next token after prefix ++ BOS ++ generated.
std::vector<double> next_token_log_probs(const LmRun& run,
                                         const nn::Tensor& prefix,
                                         std::span<const int> generated);

/// A single all-zero prefix row: the unconditional (text-only) context.
nn::Tensor null_prefix(const LmConfig& config);

struct LmPretrainOptions {
  TrainRecipe recipe;
  /// Fraction of prefix characters replaced by a random symbol.
  double corruption = 0.25;
  /// Fraction of examples trained with the null prefix.
  double unconditional_frac = 0.25;
};

struct LmPretrainReport {
  std::vector<LossRecord> trace;
};

/// Text-only pretraining: next-token prediction over transcripts, either
/// unconditionally or conditioned on a corrupted copy of the same text
/// embedded with the LM's own token table. Returned weights are frozen.
LmWeights pretrain_lm(const LmConfig& config, const std::vector<std::string>& texts,
                      const LmPretrainOptions& options, std::uint64_t init_seed,
                      LmPretrainReport* report = nullptr);

/// Natural-log likelihood of text followed by EOS under the null prefix.
double text_log_likelihood(const LmConfig& config, const LmWeights& weights,
                           std::string_view text);
double perplexity(const LmConfig& config, const LmWeights& weights,
                  const std::vector<std::string>& texts);

}  // namespace slamprune
