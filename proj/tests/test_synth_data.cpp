// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <set>

#include "slamprune/io.hpp"
#include "slamprune/synth_data.hpp"
#include "slamprune/text.hpp"
#include "test_util.hpp"

namespace slamprune {
namespace {

TEST(Profiles, LexiconsUseAlphabetAndBarelyOverlap) {
  const auto profiles = builtin_profiles();
  ASSERT_EQ(profiles.size(), 3u);
  for (const auto& p : profiles) {
    const std::set<std::string> alpha(p.alphabet.begin(), p.alphabet.end());
    for (const auto& w : p.lexicon) {
      for (const auto& ch : utf8_chars(w)) EXPECT_TRUE(alpha.count(ch) || ch == "'") << p.name << " " << w;
      EXPECT_EQ(normalize(w, p.normalization()), w);
    }
  }
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    for (std::size_t j = i + 1; j < profiles.size(); ++j) {
      const std::set<std::string> a(profiles[i].lexicon.begin(), profiles[i].lexicon.end());
      std::size_t shared = 0;
      for (const auto& w : profiles[j].lexicon) shared += a.count(w);
      EXPECT_LE(static_cast<double>(shared), 0.1 * static_cast<double>(a.size()));
    }
  }
  const auto da = builtin_profile("da");
  bool nordic = false;
  for (const auto& w : da.lexicon) nordic |= w.find("\xC3\xA6") != std::string::npos ||
                                            w.find("\xC3\xB8") != std::string::npos ||
                                            w.find("\xC3\xA5") != std::string::npos;
  EXPECT_TRUE(nordic);
  EXPECT_THROW(builtin_profile("xx"), Error);
}

TEST(Corpus, DeterministicAndDisjointSplits) {
  const auto p = builtin_profile("nl");
  const TierSpec t{"t", "nl", 30, 5, 7};
  const auto a = generate_corpus(p, t, 42), b = generate_corpus(p, t, 42);
  ASSERT_EQ(a.train.size(), 30u);
  ASSERT_EQ(a.test.size(), 7u);
  for (std::size_t i = 0; i < a.train.size(); ++i) {
    EXPECT_EQ(a.train[i].transcript, b.train[i].transcript);
    EXPECT_TRUE(std::equal(a.train[i].frames.values().begin(), a.train[i].frames.values().end(),
                           b.train[i].frames.values().begin()));
  }
  std::set<std::string> ids;
  for (const auto* split : {&a.train, &a.dev, &a.test}) {
    for (const auto& u : *split) EXPECT_TRUE(ids.insert(u.id).second) << u.id;
  }
  const auto c = generate_corpus(p, t, 43);
  EXPECT_NE(a.train[0].frames.values()[0], c.train[0].frames.values()[0]);
}

TEST(Corpus, FrameCountAndFloat32Values) {
  const auto p = builtin_profile("da");
  for (const auto& u : generate_corpus(p, TierSpec{"t", "da", 20, 1, 1}, 1).train) {
    EXPECT_EQ(u.duration(), p.frames_per_char * utf8_chars(u.transcript).size());
    EXPECT_EQ(u.frames.cols(), kFeatureDim);
    EXPECT_EQ(normalize(u.transcript, p.normalization()), u.transcript);
    for (double v : u.frames.values()) ASSERT_EQ(v, static_cast<double>(static_cast<float>(v)));
    const auto pos = frame_char_positions(u);
    ASSERT_EQ(pos.size(), u.duration());
    EXPECT_EQ(pos.back(), utf8_chars(u.transcript).size() - 1);
  }
}

TEST(Corpus, ZeroNoiseFramesAreTemplates) {
  auto p = builtin_profile("en");
  p.noise_sigma = 0.0;
  p.coarticulation = 0.0;
  nn::Rng rng(3);
  const Utterance u = render_utterance(p, "x", "ab", rng);
  const auto ta = char_template("a"), tb = char_template("b");
  for (std::size_t f = 0; f < u.duration(); ++f) {
    const auto& t = f < p.frames_per_char ? ta : tb;
    for (std::size_t c = 0; c < kFeatureDim; ++c) {
      EXPECT_EQ(u.frames.at(f, c), static_cast<double>(static_cast<float>(t[c])));
    }
  }
}

TEST(Tiers, DefaultRatioFollowsHours) {
  const auto tiers = default_tiers();
  ASSERT_EQ(tiers.size(), 3u);
  const double ratio = static_cast<double>(tiers[1].train) / static_cast<double>(tiers[0].train);
  EXPECT_NEAR(ratio, 54.15 / 4.18, 0.15 * 54.15 / 4.18);
  EXPECT_EQ(tiers[0].profile, "da");
  EXPECT_EQ(tiers[2].profile, "en");
  EXPECT_GT(tiers[2].train, tiers[1].train);
}

TEST(DurationFilter, BoundariesAndRecount) {
  const auto p = builtin_profile("en");
  const auto all = generate_corpus(p, TierSpec{"t", "en", 60, 1, 1}, 9).train;
  std::size_t max_t = 0;
  for (const auto& u : all) max_t = std::max(max_t, u.duration());
  EXPECT_EQ(duration_filter(all, 1, max_t).size(), all.size());
  const auto cut = duration_filter(all, 1, max_t - 1);
  std::size_t expect = 0;
  for (const auto& u : all) expect += u.duration() <= max_t - 1;
  EXPECT_EQ(cut.size(), expect);
  EXPECT_LT(cut.size(), all.size());
  try {
    (void)duration_filter(all, 1, 2);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyCorpus);
  }
}

TEST(SplitFiles, RoundTrip) {
  const auto dir = testing::temp_dir("splits");
  const auto c = generate_corpus(builtin_profile("da"), TierSpec{"t", "da", 5, 1, 1}, 4);
  write_split(dir, "train", c.train);
  const auto back = read_split(dir, "train", 5);
  ASSERT_EQ(back.size(), c.train.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].id, c.train[i].id);
    EXPECT_EQ(back[i].transcript, c.train[i].transcript);
    EXPECT_TRUE(std::equal(back[i].frames.values().begin(), back[i].frames.values().end(),
                           c.train[i].frames.values().begin()));
  }
  try {
    (void)read_frames(dir / "nope.bin");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMissingArtifact);
  }
}

}  // namespace
}  // namespace slamprune
