// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/results.hpp"

#include <json.hpp>

#include "slamprune/errors.hpp"
#include "slamprune/param_account.hpp"

namespace slamprune {

using nlohmann::json;

AccountingFn SweepResults::accounting_fn() const {
  return [acc = accounting](const std::string& scale) {
    auto it = acc.find(scale);
    if (it == acc.end()) fail(ErrorKind::kData, "no parameter accounting for scale " + scale);
    return it->second;
  };
}

namespace {

json counts_json(const AlignmentCounts& c) {
  return {{"S", c.substitutions}, {"I", c.insertions}, {"D", c.deletions},
          {"H", c.hits}, {"N", c.ref_words}};
}

AlignmentCounts counts_from(const json& j) {
  AlignmentCounts c;
  c.substitutions = j.at("S").get<std::size_t>();
  c.insertions = j.at("I").get<std::size_t>();
  c.deletions = j.at("D").get<std::size_t>();
  c.hits = j.at("H").get<std::size_t>();
  c.ref_words = j.at("N").get<std::size_t>();
  return c;
}

EncoderShape shape_by_name(const std::string& name) {
  if (name == "whisper-small") return whisper_small();
  if (name == "whisper-medium") return whisper_medium();
  if (name == "whisper-large-v2") return whisper_large_v2();
  fail(ErrorKind::kConfig, "unknown encoder shape '" + name + "'");
}

}  // namespace

std::string results_to_json(const SweepResults& r) {
  json acc = json::object();
  for (const auto& [k, a] : r.accounting) {
    acc[k] = {{"full_params", a.full_params},
              {"layer_params", a.layer_params},
              {"lora_overhead", a.lora_overhead}};
  }
  json cells = json::array();
  for (const auto& c : r.cells) {
    json utts = json::array();
    for (const auto& u : c.utterances) {
      utts.push_back({{"id", u.id}, {"ref", u.reference}, {"hyp", u.hypothesis},
                      {"counts", counts_json(u.counts)}});
    }
    cells.push_back({{"scale", c.spec.scale},
                     {"tier", c.spec.tier},
                     {"language", c.spec.language},
                     {"layers_kept", c.spec.layers_kept},
                     {"lora", c.spec.lora},
                     {"seed", c.seed},
                     {"failed", c.failed},
                     {"failure", c.failure},
                     {"wer", c.wer},
                     {"totals", counts_json(c.totals)},
                     {"excluded", c.excluded},
                     {"utterances", utts}});
  }
  return json{{"accounting", acc}, {"cells", cells}}.dump(1) + "\n";
}

SweepResults results_from_json(const std::string& text) {
  SweepResults r;
  try {
    const json root = json::parse(text);
    for (auto it = root.at("accounting").begin(); it != root.at("accounting").end(); ++it) {
      r.accounting[it.key()] = {it->at("full_params").get<std::int64_t>(),
                                it->at("layer_params").get<std::int64_t>(),
                                it->at("lora_overhead").get<std::int64_t>()};
    }
    for (const auto& j : root.at("cells")) {
      ExperimentCell c;
      c.spec = {j.at("scale").get<std::string>(), j.at("tier").get<std::string>(),
                j.at("language").get<std::string>(), j.at("layers_kept").get<std::size_t>(),
                j.at("lora").get<bool>()};
      c.seed = j.at("seed").get<std::uint64_t>();
      c.failed = j.at("failed").get<bool>();
      c.failure = j.at("failure").get<std::string>();
      c.wer = j.at("wer").get<double>();
      c.totals = counts_from(j.at("totals"));
      c.excluded = j.at("excluded").get<std::vector<std::string>>();
      for (const auto& u : j.at("utterances")) {
        c.utterances.push_back({u.at("id").get<std::string>(), u.at("ref").get<std::string>(),
                                u.at("hyp").get<std::string>(), counts_from(u.at("counts"))});
      }
      r.cells.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kData, std::string("malformed results file: ") + e.what());
  }
  return r;
}

SweepResults results_from_fixture(const std::string& fixture_json) {
  SweepResults r;
  try {
    const json root = json::parse(fixture_json);
    for (const auto& s : root.at("scales")) {
      const EncoderShape shape = shape_by_name(s.at("shape").get<std::string>());
      r.accounting[s.at("name").get<std::string>()] = {
          encoder_param_count(shape), encoder_layer_param_count(shape),
          s.at("lora_overhead").get<std::int64_t>()};
    }
    for (const auto& row : root.at("wer_percent")) {
      const auto scale = row.at(0).get<std::string>();
      const auto lang = row.at(1).get<std::string>();
      const auto kept = row.at(2).get<std::size_t>();
      for (int lora = 0; lora < 2; ++lora) {
        ExperimentCell c;
        c.spec = {scale, lang, lang, kept, lora == 1};
        c.wer = row.at(3 + lora).get<double>() / 100.0;
        r.cells.push_back(std::move(c));
      }
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::kConfig, std::string("malformed fixture: ") + e.what());
  }
  return r;
}

}  // namespace slamprune
