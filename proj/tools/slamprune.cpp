// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// slamprune: command-line driver for the pruning + LoRA desk study.
// Exit codes: 0 ok, 2 configuration error, 3 missing artifact, 1 otherwise.

#include <CLI11.hpp>
#include <json.hpp>

#include <bit>
#include <cstdio>
#include <cstdlib>
#include <iostream>

#include "slamprune/checkpoint.hpp"
#include "slamprune/io.hpp"
#include "slamprune/param_account.hpp"
#include "slamprune/results.hpp"
#include "slamprune/study.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace slamprune;

namespace {

struct Layout {
  fs::path root;
  fs::path data() const { return root / "data"; }
  fs::path models() const { return root / "models"; }
  fs::path cells() const { return root / "cells"; }
  fs::path results() const { return root / "results"; }
  fs::path reports() const { return root / "reports"; }
};

ExperimentConfig load(const std::string& path) {
  ExperimentConfig c = load_config(path);
  if (const char* env = std::getenv("SLAMPRUNE_SEED")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0') {
      fail(ErrorKind::kConfig, "SLAMPRUNE_SEED: expected an unsigned integer");
    }
    c.master_seed = v;
  }
  return c;
}

std::string hash_file(const fs::path& p) { return io::git_blob_hash(io::read_file(p)); }

std::string bits_hex(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(std::bit_cast<std::uint64_t>(v)));
  return buf;
}

json input_hashes(const Layout& l, const std::string& scale) {
  return {{"data/manifest.json", hash_file(l.data() / "manifest.json")},
          {"models/lm.ckpt", hash_file(l.models() / "lm.ckpt")},
          {"models/encoder_" + scale + ".ckpt",
           hash_file(l.models() / ("encoder_" + scale + ".ckpt"))}};
}

json spec_json(const CellSpec& s) {
  return {{"scale", s.scale}, {"tier", s.tier}, {"language", s.language},
          {"layers_kept", s.layers_kept}, {"lora", s.lora}};
}

CellSpec spec_from(const json& j) {
  return {j.at("scale").get<std::string>(), j.at("tier").get<std::string>(),
          j.at("language").get<std::string>(), j.at("layers_kept").get<std::size_t>(),
          j.at("lora").get<bool>()};
}

CellSpec make_spec(const ExperimentConfig& c, const std::string& scale, const std::string& tier,
                   std::size_t keep, bool lora) {
  const auto& s = c.scale(scale);
  if (keep < 1 || keep > s.encoder.num_layers) {
    fail(ErrorKind::kConfig, "--keep must lie in [1, " + std::to_string(s.encoder.num_layers) + "]");
  }
  return {scale, tier, c.tier(tier).profile, keep, lora};
}

void write_cell_outputs(const Layout& l, const ExperimentConfig& c, const ExperimentCell& cell,
                        const CellArtifacts& art) {
  const fs::path dir = l.cells() / cell_name(cell.spec);
  save_checkpoint(dir / "trained.ckpt", Checkpoint{spec_json(cell.spec).dump(), art.trained});
  io::write_file_atomic(dir / "loss.csv", loss_trace_csv(art.trace));
  std::vector<std::pair<std::string, std::string>> hyp;
  for (const auto& u : cell.utterances) hyp.emplace_back(u.id, u.hypothesis);
  write_transcripts(dir / "hyp.tsv", hyp);
  json manifest = {{"cell", spec_json(cell.spec)},
                   {"seed", cell.seed},
                   {"master_seed", c.master_seed},
                   {"config_hash", config_hash(c)},
                   {"config", json::parse(to_json(c))},
                   {"inputs", input_hashes(l, cell.spec.scale)},
                   {"outputs", {{"trained.ckpt", hash_file(dir / "trained.ckpt")},
                                {"hyp.tsv", hash_file(dir / "hyp.tsv")}}},
                   {"wer", cell.wer},
                   {"wer_bits", bits_hex(cell.wer)}};
  io::write_file_atomic(dir / "manifest.json", manifest.dump(2) + "\n");
}

int cmd_gen_data(const std::string& config_path, bool force) {
  const ExperimentConfig c = load(config_path);
  const Layout l{c.output_dir};
  const StudyData d = make_study_data(c);
  write_study_data(l.data(), c, d, force);
  std::cout << "wrote corpus to " << l.data().string() << "\n";
  for (const auto& t : c.data.tiers) {
    const auto& s = d.tiers.at(t.name);
    std::cout << "  " << t.name << " (" << t.profile << "): train " << s.train.size() << ", dev "
              << s.dev.size() << ", test " << s.test.size() << "\n";
  }
  return 0;
}

int cmd_pretrain(const std::string& config_path) {
  const ExperimentConfig c = load(config_path);
  const Layout l{c.output_dir};
  const StudyData d = read_study_data(l.data(), c);
  PretrainTraces traces;
  const StudyModels m = pretrain_models(c, d, &traces);
  save_models(l.models(), m);
  io::write_file_atomic(l.models() / "lm_loss.csv", loss_trace_csv(traces.lm));
  for (const auto& [name, t] : traces.encoders) {
    io::write_file_atomic(l.models() / ("encoder_" + name + "_loss.csv"), loss_trace_csv(t));
  }
  json manifest = {{"config_hash", config_hash(c)},
                   {"master_seed", c.master_seed},
                   {"inputs", {{"data/manifest.json", hash_file(l.data() / "manifest.json")}}},
                   {"lm_perplexity_train_text", perplexity(c.lm, m.lm, d.lm_text)}};
  io::write_file_atomic(l.models() / "manifest.json", manifest.dump(2) + "\n");
  std::cout << "wrote models to " << l.models().string() << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, const std::string& scale, const std::string& tier,
              std::size_t keep, bool lora) {
  const ExperimentConfig c = load(config_path);
  const Layout l{c.output_dir};
  const CellSpec spec = make_spec(c, scale, tier, keep, lora);
  const StudyModels m = load_models(l.models(), c);
  const StudyData d = read_study_data(l.data(), c);
  CellArtifacts art;
  const ExperimentCell cell = run_cell(c, d, m, spec, cell_seed(c.master_seed, spec), &art);
  write_cell_outputs(l, c, cell, art);
  std::printf("%s: test WER %.4f (S %zu I %zu D %zu N %zu)\n", cell_name(spec).c_str(), cell.wer,
              cell.totals.substitutions, cell.totals.insertions, cell.totals.deletions,
              cell.totals.ref_words);
  return 0;
}

int cmd_eval_files(const std::string& ref_path, const std::string& hyp_path,
                   const std::string& language) {
  if (io::read_file(hyp_path).find_first_not_of(" \t\r\n") == std::string::npos) {
    fail(ErrorKind::kMissingArtifact, "hypothesis file is empty: " + hyp_path);
  }
  const auto refs = read_transcripts(ref_path);
  const auto hyps = read_transcripts(hyp_path);
  NormalizationProfile np;
  if (!language.empty()) np = builtin_profile(language).normalization();
  std::vector<TextPair> pairs;
  for (const auto& [id, ref] : refs) {
    auto it = hyps.find(id);
    pairs.push_back({id, normalize(ref, np), it == hyps.end() ? "" : normalize(it->second, np)});
  }
  const CorpusScore s = corpus_wer(pairs);
  std::printf("utterances %zu excluded %zu\nWER %.4f\nS %zu I %zu D %zu H %zu N %zu\n",
              s.utterances.size(), s.excluded.size(), s.wer(), s.totals.substitutions,
              s.totals.insertions, s.totals.deletions, s.totals.hits, s.totals.ref_words);
  return 0;
}

int cmd_eval_cell(const std::string& config_path, const std::string& name) {
  const ExperimentConfig c = load(config_path);
  const Layout l{c.output_dir};
  const fs::path dir = l.cells() / name;
  const Checkpoint ck = load_checkpoint(dir / "trained.ckpt");
  const CellSpec spec = spec_from(json::parse(ck.meta));
  const StudyModels m = load_models(l.models(), c);
  AsrBundle b = cell_bundle(c, m, spec, 0);
  b.projector = ProjectorWeights::from_named(ck.with_prefix("projector."));
  if (spec.lora) {
    b.lora = LoraAdapterSet::from_named(c.lora_for(spec.tier), c.lm.num_layers,
                                        ck.with_prefix("lora."));
  }
  const auto test = read_split(l.data() / spec.tier, "test", c.data.frames_per_char);
  const NormalizationProfile np = c.profile(spec.language).normalization();
  std::vector<TextPair> pairs;
  std::vector<std::pair<std::string, std::string>> hyp_rows, ref_rows;
  for (const auto& u : test) {
    const Hypothesis h = beam_decode(b, u, c.eval.beam_size, c.eval.max_len);
    pairs.push_back({u.id, normalize(u.transcript, np), normalize(h.text, np)});
    hyp_rows.emplace_back(u.id, pairs.back().hypothesis);
    ref_rows.emplace_back(u.id, pairs.back().reference);
  }
  write_transcripts(dir / "eval_hyp.tsv", hyp_rows);
  write_transcripts(dir / "eval_ref.tsv", ref_rows);
  const CorpusScore s = corpus_wer(pairs);
  std::printf("%s: test WER %.4f (S %zu I %zu D %zu N %zu)\n", name.c_str(), s.wer(),
              s.totals.substitutions, s.totals.insertions, s.totals.deletions,
              s.totals.ref_words);
  return 0;
}

int cmd_sweep(const std::string& config_path, std::size_t workers, const std::string& inject,
              const std::string& rerun) {
  const ExperimentConfig c = load(config_path);
  const Layout l{c.output_dir};
  if (!inject.empty()) {
    const SweepResults r = results_from_fixture(io::read_file(inject));
    io::write_file_atomic(l.results() / "cells.json", results_to_json(r));
    std::cout << "injected " << r.cells.size() << " cells into "
              << (l.results() / "cells.json").string() << "\n";
    return 0;
  }
  const StudyModels m = load_models(l.models(), c);
  const StudyData d = read_study_data(l.data(), c);
  if (!rerun.empty()) {
    const json man = json::parse(io::read_file(rerun));
    if (man.at("config_hash").get<std::string>() != config_hash(c)) {
      fail(ErrorKind::kConfig, "manifest was produced under a different configuration");
    }
    const CellSpec spec = spec_from(man.at("cell"));
    const std::uint64_t seed = man.at("seed").get<std::uint64_t>();
    const ExperimentCell cell = run_cell(c, d, m, spec, seed);
    const std::string want = man.at("wer_bits").get<std::string>();
    const bool same = bits_hex(cell.wer) == want;
    std::printf("%s: WER %.17g bits %s (%s)\n", cell_name(spec).c_str(), cell.wer,
                bits_hex(cell.wer).c_str(), same ? "identical" : "DIFFERENT");
    return same ? 0 : 1;
  }
  std::vector<CellArtifacts> arts;
  const auto specs = study_grid(c);
  arts.resize(specs.size());
  std::vector<ExperimentCell> cells = run_grid(
      specs, c.master_seed, workers, [&](const CellSpec& spec, std::uint64_t seed) {
        const std::size_t i =
            static_cast<std::size_t>(std::find_if(specs.begin(), specs.end(),
                                                  [&](const CellSpec& s) {
                                                    return cell_name(s) == cell_name(spec);
                                                  }) -
                                     specs.begin());
        return run_cell(c, d, m, spec, seed, &arts[i]);
      });
  SweepResults r;
  for (const auto& s : c.scales) r.accounting[s.name] = desk_accounting(c, s.name);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].failed) {
      std::printf("%-28s FAILED %s\n", cell_name(cells[i].spec).c_str(), cells[i].failure.c_str());
    } else {
      write_cell_outputs(l, c, cells[i], arts[i]);
      std::printf("%-28s WER %.4f\n", cell_name(cells[i].spec).c_str(), cells[i].wer);
    }
  }
  r.cells = std::move(cells);
  io::write_file_atomic(l.results() / "cells.json", results_to_json(r));
  return 0;
}

int cmd_analyze(const std::string& config_path, const std::string& results_path,
                const std::string& out_dir) {
  fs::path results = results_path;
  fs::path out = out_dir;
  AnalysisOptions opts;
  if (!config_path.empty()) {
    const ExperimentConfig c = load(config_path);
    const Layout l{c.output_dir};
    if (results.empty()) results = l.results() / "cells.json";
    if (out.empty()) out = l.reports();
    opts = c.analysis;
  }
  if (results.empty() || out.empty()) {
    fail(ErrorKind::kConfig, "analyze needs --config or both --results and --out");
  }
  const SweepResults r = results_from_json(io::read_file(results));
  write_reports(out, r.cells, r.accounting_fn(), opts);
  std::cout << "wrote reports to " << out.string() << "\n";
  return 0;
}

int cmd_params(const std::string& out_dir) {
  std::string all;
  for (const auto& shape : whisper_shapes()) {
    const auto rows = reduction_table(shape, depth_schedule(shape.num_layers));
    const std::string csv = reduction_csv(shape, rows);
    all += all.empty() ? csv : csv.substr(csv.find('\n') + 1);
  }
  std::string t3 = "scale,layers_kept,lora_overhead,params,net_delta\n";
  const std::pair<EncoderShape, std::int64_t> claims[] = {
      {whisper_small(), 1'500'000}, {whisper_medium(), 1'800'000}, {whisper_large_v2(), 1'500'000}};
  for (const auto& [shape, overhead] : claims) {
    const std::int64_t kept = shape.num_layers - 2;
    const std::int64_t delta = net_delta(shape, kept, overhead);
    t3 += shape.name + "," + std::to_string(kept) + "," + std::to_string(overhead) + "," +
          std::to_string(encoder_param_count(shape) + delta) + "," + std::to_string(delta) + "\n";
  }
  std::string lora = "lm,rank,alpha,targets,params\n";
  for (std::size_t r : {8, 16}) {
    LoraConfig lc;
    lc.rank = r;
    lc.alpha = 2.0 * static_cast<double>(r);
    lora += "qwen2.5-3b," + std::to_string(r) + "," + std::to_string(2 * r) + ",qkvo," +
            std::to_string(lora_param_count(qwen25_3b_shape(), lc)) + "\n";
  }
  if (out_dir.empty()) {
    std::cout << all << "\n" << t3 << "\n" << lora;
  } else {
    io::write_file_atomic(fs::path(out_dir) / "reduction.csv", all);
    io::write_file_atomic(fs::path(out_dir) / "net_delta.csv", t3);
    io::write_file_atomic(fs::path(out_dir) / "lora_params.csv", lora);
    std::cout << "wrote reduction.csv, net_delta.csv, lora_params.csv to " << out_dir << "\n";
  }
  return 0;
}

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::kConfig: return 2;
    case ErrorKind::kMissingArtifact: return 3;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Encoder pruning + LoRA compensation desk study"};
  app.require_subcommand(1);
  std::string config, scale, tier, inject, rerun, ref, hyp, language, results, out, cell;
  std::size_t keep = 0, workers = 1;
  bool force = false, lora = false;

  auto* gen = app.add_subcommand("gen-data", "generate the synthetic corpora");
  gen->add_option("--config", config, "experiment config (JSON)")->required();
  gen->add_flag("--force", force, "overwrite an existing corpus");

  auto* pre = app.add_subcommand("pretrain", "text-only LM and encoder pretraining");
  pre->add_option("--config", config)->required();

  auto* train = app.add_subcommand("train", "train and score a single grid cell");
  train->add_option("--config", config)->required();
  train->add_option("--scale", scale)->required();
  train->add_option("--tier", tier)->required();
  train->add_option("--keep", keep, "encoder layers kept")->required();
  train->add_flag("--lora", lora, "enable LoRA adapters");

  auto* eval = app.add_subcommand("eval", "decode a trained cell, or score transcript files");
  eval->add_option("--config", config);
  eval->add_option("--cell", cell, "cell directory name under <output>/cells");
  eval->add_option("--ref", ref, "reference transcripts (id<TAB>text)");
  eval->add_option("--hyp", hyp, "hypothesis transcripts (id<TAB>text)");
  eval->add_option("--language", language, "normalization profile for --ref/--hyp");

  auto* sweep = app.add_subcommand("sweep", "run the pruning x LoRA grid");
  sweep->add_option("--config", config)->required();
  sweep->add_option("--workers", workers, "parallel cells")->check(CLI::PositiveNumber);
  sweep->add_option("--inject", inject, "build cells from a WER fixture instead of training");
  sweep->add_option("--rerun", rerun, "re-run one cell from its manifest and compare WER");

  auto* analyze = app.add_subcommand("analyze", "write the analysis tables");
  analyze->add_option("--config", config);
  analyze->add_option("--results", results, "cells.json (default <output>/results)");
  analyze->add_option("--out", out, "report directory (default <output>/reports)");

  auto* params = app.add_subcommand("params", "analytic parameter accounting");
  params->add_option("--out", out, "directory for CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_gen_data(config, force);
    if (*pre) return cmd_pretrain(config);
    if (*train) return cmd_train(config, scale, tier, keep, lora);
    if (*eval) {
      if (!ref.empty() || !hyp.empty()) {
        if (ref.empty() || hyp.empty()) fail(ErrorKind::kConfig, "--ref and --hyp go together");
        return cmd_eval_files(ref, hyp, language);
      }
      if (config.empty() || cell.empty()) {
        fail(ErrorKind::kConfig, "eval needs --config and --cell, or --ref and --hyp");
      }
      return cmd_eval_cell(config, cell);
    }
    if (*sweep) return cmd_sweep(config, workers, inject, rerun);
    if (*analyze) return cmd_analyze(config, results, out);
    if (*params) return cmd_params(out);
  } catch (const Error& e) {
    std::cerr << "error[" << error_kind_name(e.kind()) << "]: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error[internal]: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
