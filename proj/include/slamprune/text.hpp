// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace slamprune {

/// Decodes UTF-8; malformed bytes map to U+FFFD.
std::u32string utf8_decode(std::string_view s);
std::string utf8_encode(std::u32string_view s);
std::string utf8_encode(char32_t c);
/// Splits into one string per code point.
std::vector<std::string> utf8_chars(std::string_view s);

/// Letters a profile declares as part of its alphabet beyond what the default
/// letter classification already covers.
struct NormalizationProfile {
  std::u32string extra_letters;
};

/// Lowercases, strips punctuation (keeping apostrophes between two word
/// characters), preserves letters such as æ/ø/å, collapses whitespace.
std::string normalize(std::string_view text,
                      const NormalizationProfile& profile = {});

std::vector<std::string> split_words(std::string_view text);
std::string join_words(const std::vector<std::string>& words);

}  // namespace slamprune
