// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Deterministic synthetic "languages": word sequences drawn from a seeded
// bigram grammar over a per-language lexicon, rendered as feature frames
// (one fixed template vector per character, repeated frames_per_char times,
// plus Gaussian noise).

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "slamprune/tensor.hpp"
#include "slamprune/text.hpp"

namespace slamprune {

inline constexpr std::size_t kFeatureDim = 80;

struct LanguageProfile {
  std::string name;
  std::vector<std::string> alphabet;  // one code point per entry
  std::vector<std::string> lexicon;
  std::size_t frames_per_char = 5;
  double noise_sigma = 1.0;
  /// Weight of the neighbouring characters' templates mixed into each frame.
  double coarticulation = 0.0;
  std::size_t min_words = 2;
  std::size_t max_words = 4;
  /// Number of admissible successors per word in the bigram grammar.
  std::size_t branching = 4;
  std::uint64_t grammar_seed = 0;

  NormalizationProfile normalization() const;
  void validate() const;
};

/// The three built-in languages: "da" (carries æ/ø/å), "nl", "en". Their
/// lexicons are disjoint apart from a small shared function-word set.
std::vector<LanguageProfile> builtin_profiles();
LanguageProfile builtin_profile(std::string_view name);

struct TierSpec {
  std::string name;     // low | medium | high
  std::string profile;  // language profile name
  std::size_t train = 1;
  std::size_t dev = 1;
  std::size_t test = 1;
};

/// 250 / 3,200 / 6,000 training utterances, roughly the 4.18 : 54.15 : 100
/// hour ratio of the reference corpus.
std::vector<TierSpec> default_tiers();

struct Utterance {
  std::string id;
  std::string language;
  std::string transcript;
  nn::Tensor frames;  // [T x 80], values representable as float32
  std::size_t frames_per_char = 5;

  std::size_t duration() const { return frames.rows(); }
};

struct CorpusSplits {
  std::vector<Utterance> train, dev, test;
};

/// Fixed template vector for one character (independent of any alphabet).
std::vector<double> char_template(std::string_view ch, std::size_t dim = kFeatureDim);

/// Transcript sampler: words from the profile's bigram grammar.
std::string sample_transcript(const LanguageProfile& profile, nn::Rng& rng);

Utterance render_utterance(const LanguageProfile& profile, std::string id,
                           std::string transcript, nn::Rng& rng);

CorpusSplits generate_corpus(const LanguageProfile& profile, const TierSpec& tier,
                             std::uint64_t seed);

/// Keeps utterances with min_frames <= T <= max_frames.
std::vector<Utterance> duration_filter(const std::vector<Utterance>& utterances,
                                       std::size_t min_frames, std::size_t max_frames);

/// Character index (into `transcript` code points) of every frame.
std::vector<std::size_t> frame_char_positions(const Utterance& u);

// ---- on-disk format --------------------------------------------------------
// <split>.tsv: id<TAB>language<TAB>transcript<TAB>frames_file per line;
// frames: uint32 T, uint32 80 (little-endian) then T*80 float32 LE.

void write_frames(const std::filesystem::path& path, const nn::Tensor& frames);
nn::Tensor read_frames(const std::filesystem::path& path);
void write_split(const std::filesystem::path& dir, const std::string& split,
                 const std::vector<Utterance>& utterances);
std::vector<Utterance> read_split(const std::filesystem::path& dir,
                                  const std::string& split,
                                  std::size_t frames_per_char);

}  // namespace slamprune
