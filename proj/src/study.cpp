// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/study.hpp"

#include <json.hpp>
#include <sstream>

#include "slamprune/checkpoint.hpp"
#include "slamprune/io.hpp"
#include "slamprune/param_account.hpp"

namespace slamprune {

using nlohmann::json;

std::uint64_t derive_seed(std::uint64_t master_seed, const std::string& label) {
  return cell_seed(master_seed, CellSpec{label, "", "", 0, false});
}

StudyData make_study_data(const ExperimentConfig& config) {
  const auto& dc = config.data;
  auto filter = [&](const std::vector<Utterance>& u) {
    return duration_filter(u, dc.min_frames, dc.max_frames);
  };
  StudyData d;
  for (const auto& tier : dc.tiers) {
    const LanguageProfile p = config.profile(tier.profile);
    CorpusSplits raw = generate_corpus(p, tier, derive_seed(dc.seed, "tier:" + tier.name));
    d.tiers[tier.name] = CorpusSplits{filter(raw.train), filter(raw.dev), filter(raw.test)};
  }
  for (const auto& p : config.profiles()) {
    const TierSpec spec{"pretrain", p.name, dc.encoder_pretrain_per_language, 1, 1};
    CorpusSplits raw = generate_corpus(p, spec, derive_seed(dc.seed, "pretrain:" + p.name));
    for (auto& u : filter(raw.train)) {
      u.id = "pretrain-" + u.id;
      d.encoder_pretrain.push_back(std::move(u));
    }
    nn::Rng rng(derive_seed(dc.seed, "lm:" + p.name));
    for (std::size_t i = 0; i < dc.lm_text_per_language; ++i) {
      d.lm_text.push_back(sample_transcript(p, rng));
    }
  }
  return d;
}

void write_study_data(const std::filesystem::path& dir, const ExperimentConfig& config,
                      const StudyData& data, bool force) {
  const auto manifest_path = dir / "manifest.json";
  if (std::filesystem::exists(manifest_path) && !force) {
    fail(ErrorKind::kIo, "corpus already exists at " + dir.string() + " (use --force)");
  }
  json tiers = json::object();
  for (const auto& tier : config.data.tiers) {
    const auto& s = data.tiers.at(tier.name);
    json files = json::object();
    const std::pair<const char*, const std::vector<Utterance>*> splits[] = {
        {"train", &s.train}, {"dev", &s.dev}, {"test", &s.test}};
    json counts = json::object();
    for (const auto& [name, utts] : splits) {
      write_split(dir / tier.name, name, *utts);
      files[std::string(name) + ".tsv"] =
          io::git_blob_hash(io::read_file(dir / tier.name / (std::string(name) + ".tsv")));
      counts[name] = utts->size();
    }
    tiers[tier.name] = {{"profile", tier.profile},
                        {"requested", {{"train", tier.train}, {"dev", tier.dev}, {"test", tier.test}}},
                        {"kept", counts},
                        {"files", files}};
  }
  write_split(dir / "pretrain", "train", data.encoder_pretrain);
  std::string text;
  for (const auto& t : data.lm_text) text += t + "\n";
  io::write_file_atomic(dir / "lm_text.txt", text);
  json manifest = {
      {"data_seed", config.data.seed},
      {"config_hash", config_hash(config)},
      {"tiers", tiers},
      {"encoder_pretrain", data.encoder_pretrain.size()},
      {"lm_text", data.lm_text.size()},
      {"lm_text_hash", io::git_blob_hash(text)},
      {"pretrain_hash", io::git_blob_hash(io::read_file(dir / "pretrain" / "train.tsv"))},
  };
  io::write_file_atomic(manifest_path, manifest.dump(2) + "\n");
}

StudyData read_study_data(const std::filesystem::path& dir, const ExperimentConfig& config) {
  if (!std::filesystem::exists(dir / "manifest.json")) {
    fail(ErrorKind::kMissingArtifact, "no corpus manifest in " + dir.string() + " (run gen-data)");
  }
  const std::size_t fpc = config.data.frames_per_char;
  StudyData d;
  for (const auto& tier : config.data.tiers) {
    d.tiers[tier.name] = CorpusSplits{read_split(dir / tier.name, "train", fpc),
                                      read_split(dir / tier.name, "dev", fpc),
                                      read_split(dir / tier.name, "test", fpc)};
  }
  d.encoder_pretrain = read_split(dir / "pretrain", "train", fpc);
  std::istringstream in(io::read_file(dir / "lm_text.txt"));
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) d.lm_text.push_back(line);
  }
  return d;
}

StudyModels pretrain_models(const ExperimentConfig& config, const StudyData& data,
                            PretrainTraces* traces) {
  StudyModels m;
  LmPretrainOptions lo = config.lm_pretrain;
  lo.recipe.seed = derive_seed(config.master_seed, "lm-order");
  LmPretrainReport report;
  m.lm = pretrain_lm(config.lm, data.lm_text, lo, derive_seed(config.master_seed, "lm-init"),
                     &report);
  if (traces) traces->lm = std::move(report.trace);
  for (const auto& s : config.scales) {
    EncoderPretrainOptions eo{config.encoder_pretrain};
    eo.recipe.seed = derive_seed(config.master_seed, "encoder-order:" + s.name);
    std::vector<LossRecord> trace;
    m.encoders[s.name] =
        pretrain_encoder(s.encoder, config.lm.vocab, data.encoder_pretrain, eo,
                         derive_seed(config.master_seed, "encoder-init:" + s.name), &trace);
    if (traces) traces->encoders[s.name] = std::move(trace);
  }
  return m;
}

void save_models(const std::filesystem::path& dir, const StudyModels& models) {
  save_checkpoint(dir / "lm.ckpt", Checkpoint{R"({"kind":"lm"})", models.lm.named()});
  for (const auto& [name, enc] : models.encoders) {
    save_checkpoint(dir / ("encoder_" + name + ".ckpt"),
                    Checkpoint{R"({"kind":"encoder","scale":")" + name + "\"}", enc.named()});
  }
}

StudyModels load_models(const std::filesystem::path& dir, const ExperimentConfig& config) {
  StudyModels m;
  m.lm = LmWeights::from_named(load_checkpoint(dir / "lm.ckpt").tensors);
  if (m.lm.tok_emb.rows() != config.lm.vocab.size() ||
      m.lm.tok_emb.cols() != config.lm.d_model || m.lm.blocks.size() != config.lm.num_layers) {
    fail(ErrorKind::kConfig, "lm.ckpt does not match the lm section of the config");
  }
  for (const auto& s : config.scales) {
    EncoderWeights w =
        EncoderWeights::from_named(load_checkpoint(dir / ("encoder_" + s.name + ".ckpt")).tensors);
    if (w.blocks.size() != s.encoder.num_layers || w.in_w.rows() != s.encoder.d_model) {
      fail(ErrorKind::kConfig, "encoder_" + s.name + ".ckpt does not match its scale config");
    }
    m.encoders[s.name] = std::move(w);
  }
  return m;
}

AsrBundle cell_bundle(const ExperimentConfig& config, const StudyModels& models,
                      const CellSpec& spec, std::uint64_t seed) {
  const ScaleConfig& scale = config.scale(spec.scale);
  ProjectorConfig pc = config.projector;
  pc.in_dim = scale.encoder.d_model;
  pc.out_dim = config.lm.d_model;
  std::optional<LoraConfig> lora;
  if (spec.lora) lora = config.lora_for(spec.tier);
  return make_bundle(scale.encoder, models.encoders.at(spec.scale), spec.layers_kept, pc,
                     config.lm, models.lm, lora, seed);
}

ExperimentCell run_cell(const ExperimentConfig& config, const StudyData& data,
                        const StudyModels& models, const CellSpec& spec, std::uint64_t seed,
                        CellArtifacts* artifacts) {
  AsrBundle bundle = cell_bundle(config, models, spec, seed);
  TrainRecipe recipe = config.train_for(spec.tier);
  recipe.seed = seed;
  const CorpusSplits& splits = data.tiers.at(spec.tier);
  auto trace = train_asr(bundle, splits.train, recipe);

  const NormalizationProfile np = config.profile(config.tier(spec.tier).profile).normalization();
  std::vector<TextPair> pairs;
  std::vector<Hypothesis> hyps;
  for (const auto& u : splits.test) {
    Hypothesis h = beam_decode(bundle, u, config.eval.beam_size, config.eval.max_len);
    pairs.push_back({u.id, normalize(u.transcript, np), normalize(h.text, np)});
    hyps.push_back(std::move(h));
  }
  CorpusScore score = corpus_wer(pairs);
  ExperimentCell cell;
  cell.spec = spec;
  cell.seed = seed;
  cell.wer = score.wer();
  cell.totals = score.totals;
  cell.utterances = std::move(score.utterances);
  cell.excluded = std::move(score.excluded);
  if (artifacts) {
    artifacts->trace = std::move(trace);
    artifacts->hypotheses = std::move(hyps);
    artifacts->trained = bundle.trainable();
  }
  return cell;
}

std::vector<CellSpec> study_grid(const ExperimentConfig& config) {
  std::vector<GridScale> scales;
  for (const auto& s : config.scales) {
    if (config.grid.scales.empty() ||
        std::find(config.grid.scales.begin(), config.grid.scales.end(), s.name) !=
            config.grid.scales.end()) {
      scales.push_back({s.name, s.encoder.num_layers});
    }
  }
  std::vector<GridTier> tiers;
  for (const auto& t : config.data.tiers) {
    if (config.grid.tiers.empty() ||
        std::find(config.grid.tiers.begin(), config.grid.tiers.end(), t.name) !=
            config.grid.tiers.end()) {
      tiers.push_back({t.name, t.profile});
    }
  }
  return grid_specs(scales, tiers, config.grid.depth_step, config.grid.lora_options);
}

ScaleAccounting desk_accounting(const ExperimentConfig& config, const std::string& scale) {
  const EncoderConfig& e = config.scale(scale).encoder;
  const auto layer = static_cast<std::int64_t>(encoder_block_params(e));
  const auto d = static_cast<std::int64_t>(e.d_model);
  const auto full = static_cast<std::int64_t>(e.feature_dim) * d + d +
                    static_cast<std::int64_t>(e.num_layers) * layer + 2 * d;
  return {full, layer, lora_param_count(lm_shape(config.lm), config.lora_default)};
}

std::string cell_name(const CellSpec& spec) {
  return spec.scale + "_" + spec.tier + "_k" + std::to_string(spec.layers_kept) + "_" +
         (spec.lora ? "lora" : "base");
}

}  // namespace slamprune
