// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <bit>
#include <set>

#include "slamprune/study.hpp"
#include "slamprune/sweep.hpp"

namespace slamprune {
namespace {

ExperimentCell fake_runner(const CellSpec& spec, std::uint64_t seed) {
  if (spec.layers_kept == 2 && spec.lora) fail(ErrorKind::kTrainingDiverged, "loss is NaN");
  ExperimentCell c;
  c.wer = static_cast<double>(seed % 1000) / 1000.0 + (spec.lora ? 0.0 : 0.5);
  return c;
}

TEST(Grid, DepthsAndCoordinates) {
  const auto specs = grid_specs({{"toy", 8}}, {{"high", "en"}, {"low", "da"}}, 2, {false, true});
  ASSERT_EQ(specs.size(), 16u);
  std::set<std::size_t> depths;
  for (const auto& s : specs) depths.insert(s.layers_kept);
  EXPECT_EQ(depths, (std::set<std::size_t>{2, 4, 6, 8}));
  std::set<std::string> names;
  for (const auto& s : specs) names.insert(cell_name(s));
  EXPECT_EQ(names.size(), specs.size());
}

TEST(Seeds, StableAndCoordinateSpecific) {
  const CellSpec a{"toy", "high", "en", 6, true};
  EXPECT_EQ(cell_seed(1, a), cell_seed(1, a));
  EXPECT_NE(cell_seed(2, a), cell_seed(1, a));
  for (CellSpec b : {CellSpec{"toy", "high", "en", 6, false}, CellSpec{"toy", "high", "en", 4, true},
                     CellSpec{"toy", "low", "en", 6, true}, CellSpec{"big", "high", "en", 6, true}}) {
    EXPECT_NE(cell_seed(1, b), cell_seed(1, a));
  }
  EXPECT_EQ(derive_seed(5, "lm"), derive_seed(5, "lm"));
  EXPECT_NE(derive_seed(5, "lm"), derive_seed(5, "encoder"));
}

TEST(RunGrid, WorkerCountDoesNotChangeResults) {
  const auto specs = grid_specs({{"toy", 8}}, {{"high", "en"}}, 2, {false, true});
  const auto one = run_grid(specs, 11, 1, fake_runner);
  const auto three = run_grid(specs, 11, 3, fake_runner);
  ASSERT_EQ(one.size(), specs.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    EXPECT_EQ(cell_name(one[i].spec), cell_name(specs[i]));
    EXPECT_EQ(one[i].seed, three[i].seed);
    EXPECT_EQ(std::bit_cast<std::uint64_t>(one[i].wer), std::bit_cast<std::uint64_t>(three[i].wer));
    EXPECT_EQ(one[i].failed, three[i].failed);
  }
  // the same cell inside a smaller grid gets the same seed and value
  const auto single = run_grid({specs[3]}, 11, 1, fake_runner);
  EXPECT_EQ(single[0].seed, one[3].seed);
  EXPECT_EQ(single[0].wer, one[3].wer);
  EXPECT_EQ(single[0].wer, fake_runner(specs[3], cell_seed(11, specs[3])).wer);
}

TEST(RunGrid, FailuresAreRecordedNotFatal) {
  const auto specs = grid_specs({{"toy", 4}}, {{"high", "en"}}, 2, {false, true});
  const auto cells = run_grid(specs, 1, 2, fake_runner);
  std::size_t failed = 0;
  for (const auto& c : cells) {
    if (!c.failed) continue;
    ++failed;
    EXPECT_EQ(c.spec.layers_kept, 2u);
    EXPECT_EQ(c.failure.rfind(std::string(error_kind_name(ErrorKind::kTrainingDiverged)) + ": ", 0), 0u)
        << c.failure;
    EXPECT_NE(c.failure.find("loss is NaN"), std::string::npos);
  }
  EXPECT_EQ(failed, 1u);
  const auto internal = run_grid({specs[0]}, 1, 1, [](const CellSpec&, std::uint64_t) -> ExperimentCell {
    throw std::runtime_error("boom");
  });
  EXPECT_TRUE(internal[0].failed);
  EXPECT_EQ(internal[0].failure, "internal: boom");
}

}  // namespace
}  // namespace slamprune
