// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/sweep.hpp"

#include <atomic>
#include <thread>

#include "slamprune/errors.hpp"
#include "slamprune/param_account.hpp"

namespace slamprune {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t master_seed, const CellSpec& spec) {
  const std::string key = spec.scale + "\x1f" + spec.tier + "\x1f" +
                          std::to_string(spec.layers_kept) + "\x1f" + (spec.lora ? "1" : "0");
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : key) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return splitmix(h ^ splitmix(master_seed));
}

std::vector<CellSpec> grid_specs(const std::vector<GridScale>& scales,
                                 const std::vector<GridTier>& tiers, std::size_t depth_step,
                                 const std::vector<bool>& lora_options) {
  std::vector<CellSpec> out;
  for (const auto& s : scales) {
    for (std::int64_t kept : depth_schedule(static_cast<std::int64_t>(s.num_layers),
                                            static_cast<std::int64_t>(depth_step))) {
      for (const auto& t : tiers) {
        for (bool lora : lora_options) {
          out.push_back({s.name, t.name, t.language, static_cast<std::size_t>(kept), lora});
        }
      }
    }
  }
  if (out.empty()) fail(ErrorKind::kConfig, "experiment grid is empty");
  return out;
}

std::vector<ExperimentCell> run_grid(const std::vector<CellSpec>& specs,
                                     std::uint64_t master_seed, std::size_t workers,
                                     const CellRunner& runner) {
  if (specs.empty()) fail(ErrorKind::kConfig, "experiment grid is empty");
  std::vector<ExperimentCell> cells(specs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      const std::uint64_t seed = cell_seed(master_seed, specs[i]);
      try {
        cells[i] = runner(specs[i], seed);
      } catch (const Error& e) {
        cells[i] = ExperimentCell{};
        cells[i].failed = true;
        cells[i].failure = std::string(error_kind_name(e.kind())) + ": " + e.what();
      } catch (const std::exception& e) {
        cells[i] = ExperimentCell{};
        cells[i].failed = true;
        cells[i].failure = std::string("internal: ") + e.what();
      }
      cells[i].spec = specs[i];
      cells[i].seed = seed;
    }
  };
  const std::size_t n = std::max<std::size_t>(1, std::min(workers, specs.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return cells;
}

}  // namespace slamprune
