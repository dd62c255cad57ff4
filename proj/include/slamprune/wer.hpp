// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Word-level Levenshtein alignment and corpus WER.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace slamprune {

struct AlignmentCounts {
  std::size_t substitutions = 0;
  std::size_t insertions = 0;
  std::size_t deletions = 0;
  std::size_t hits = 0;
  std::size_t ref_words = 0;

  std::size_t errors() const { return substitutions + insertions + deletions; }
  double wer() const;
  AlignmentCounts& operator+=(const AlignmentCounts& other);
};

/// Unit-cost alignment. Backtrace prefers match, then substitution, then
/// deletion, then insertion. An empty reference raises kUndefinedWer.
AlignmentCounts align(const std::vector<std::string>& ref,
                      const std::vector<std::string>& hyp);

struct UtteranceScore {
  std::string id;
  std::string reference;
  std::string hypothesis;
  AlignmentCounts counts;
  double wer() const { return counts.wer(); }
};

struct CorpusScore {
  std::vector<UtteranceScore> utterances;
  std::vector<std::string> excluded;  // ids with an empty reference
  AlignmentCounts totals;

  /// Pooled: total errors over total reference words.
  double wer() const { return totals.wer(); }
};

struct TextPair {
  std::string id;
  std::string reference;
  std::string hypothesis;
};

/// Texts are compared as given (callers normalize first). Raises
/// kEmptyEvaluation when no pair has a non-empty reference.
CorpusScore corpus_wer(const std::vector<TextPair>& pairs);

/// `utterance_id<TAB>text` per line.
std::map<std::string, std::string> read_transcripts(const std::filesystem::path& path);
void write_transcripts(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, std::string>>& rows);

}  // namespace slamprune
