// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/wer.hpp"

#include <sstream>

#include "slamprune/errors.hpp"
#include "slamprune/io.hpp"
#include "slamprune/text.hpp"

namespace slamprune {

double AlignmentCounts::wer() const {
  if (ref_words == 0) fail(ErrorKind::kUndefinedWer, "WER with zero reference words");
  return static_cast<double>(errors()) / static_cast<double>(ref_words);
}

AlignmentCounts& AlignmentCounts::operator+=(const AlignmentCounts& o) {
  substitutions += o.substitutions;
  insertions += o.insertions;
  deletions += o.deletions;
  hits += o.hits;
  ref_words += o.ref_words;
  return *this;
}

AlignmentCounts align(const std::vector<std::string>& ref,
                      const std::vector<std::string>& hyp) {
  if (ref.empty()) fail(ErrorKind::kUndefinedWer, "empty reference");
  const std::size_t n = ref.size();
  const std::size_t m = hyp.size();
  const std::size_t w = m + 1;
  std::vector<std::size_t> cost((n + 1) * w);
  for (std::size_t i = 0; i <= n; ++i) cost[i * w] = i;
  for (std::size_t j = 0; j <= m; ++j) cost[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t diag = cost[(i - 1) * w + j - 1] + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      const std::size_t del = cost[(i - 1) * w + j] + 1;
      const std::size_t ins = cost[i * w + j - 1] + 1;
      cost[i * w + j] = std::min({diag, del, ins});
    }
  }
  AlignmentCounts c;
  c.ref_words = n;
  std::size_t i = n, j = m;
  while (i > 0 || j > 0) {
    const std::size_t here = cost[i * w + j];
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (same && here == cost[(i - 1) * w + j - 1]) {
        ++c.hits, --i, --j;
        continue;
      }
      if (!same && here == cost[(i - 1) * w + j - 1] + 1) {
        ++c.substitutions, --i, --j;
        continue;
      }
    }
    if (i > 0 && here == cost[(i - 1) * w + j] + 1) {
      ++c.deletions, --i;
      continue;
    }
    ++c.insertions, --j;
  }
  return c;
}

CorpusScore corpus_wer(const std::vector<TextPair>& pairs) {
  CorpusScore out;
  for (const auto& p : pairs) {
    const auto ref = split_words(p.reference);
    if (ref.empty()) {
      out.excluded.push_back(p.id);
      continue;
    }
    UtteranceScore u{p.id, p.reference, p.hypothesis, align(ref, split_words(p.hypothesis))};
    out.totals += u.counts;
    out.utterances.push_back(std::move(u));
  }
  if (out.utterances.empty()) {
    fail(ErrorKind::kEmptyEvaluation, "no scorable utterances");
  }
  return out;
}

std::map<std::string, std::string> read_transcripts(const std::filesystem::path& path) {
  std::istringstream in(io::read_file(path));
  std::map<std::string, std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      out[line] = "";
    } else {
      out[line.substr(0, tab)] = line.substr(tab + 1);
    }
  }
  return out;
}

void write_transcripts(const std::filesystem::path& path,
                       const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string text;
  for (const auto& [id, t] : rows) text += id + "\t" + t + "\n";
  io::write_file_atomic(path, text);
}

}  // namespace slamprune
