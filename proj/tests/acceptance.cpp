// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate: one PASS/FAIL line per criterion, exit status 0 only when
// every selected criterion passes.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>

#include "slamprune/analysis.hpp"
#include "slamprune/beam_search.hpp"
#include "slamprune/config.hpp"
#include "slamprune/io.hpp"
#include "slamprune/param_account.hpp"
#include "slamprune/results.hpp"
#include "slamprune/study.hpp"
#include "slamprune/text.hpp"
#include "slamprune/wer.hpp"
#include "test_util.hpp"
#include "toy_models.hpp"

namespace fs = std::filesystem;
using namespace slamprune;
using slamprune::testing::random_tensor;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// ---- 1. parameter accounting ------------------------------------------------

Outcome parameter_accounting() {
  struct Header {
    EncoderShape shape;
    double millions, tol;
  };
  const Header headers[] = {{whisper_small(), 88.15, 0.01},
                            {whisper_medium(), 307.24, 0.05},
                            {whisper_large_v2(), 636.83, 0.06}};
  // Red.% column, top to bottom, per scale.
  const std::map<std::string, std::vector<std::pair<int, double>>> red = {
      {"small", {{12, 0.0}, {10, 16.1}, {8, 32.2}, {6, 48.2}, {4, 64.3}, {2, 80.4}}},
      {"medium",
       {{24, 0.0}, {22, 8.2}, {20, 16.4}, {18, 24.6}, {16, 32.8}, {14, 41.0}, {12, 49.2},
        {10, 57.4}, {8, 65.6}, {6, 73.8}, {4, 82.0}, {2, 90.2}}},
      {"large-v2",
       {{32, 0.0}, {30, 6.2}, {28, 12.4}, {26, 18.5}, {24, 24.7}, {22, 30.9}, {20, 37.1},
        {18, 43.3}, {16, 49.4}, {14, 55.6}, {12, 61.8}, {10, 68.0}, {8, 74.2}, {6, 80.3},
        {4, 86.5}, {2, 92.7}}}};
  bool ok = true;
  std::string detail;
  std::size_t entries = 0;
  double worst_pct = 0.0;
  for (const auto& h : headers) {
    const double m = static_cast<double>(encoder_param_count(h.shape)) / 1e6;
    if (std::abs(m - h.millions) > h.tol) ok = false;
    detail += fmt("%s %.3fM; ", h.shape.name.c_str(), m);
    std::vector<std::int64_t> depths;
    for (const auto& [k, pct] : red.at(h.shape.name)) depths.push_back(k);
    const auto rows = reduction_table(h.shape, depths);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double diff = std::abs(rows[i].reduction_pct - red.at(h.shape.name)[i].second);
      worst_pct = std::max(worst_pct, diff);
      if (diff > 0.15) ok = false;
      ++entries;
    }
  }
  return {ok, detail + fmt("%zu Red.%% entries, worst |diff| %.3f pts", entries, worst_pct)};
}

// ---- 2. sweet-spot arithmetic --------------------------------------------------

Outcome sweet_spot_arithmetic() {
  struct Row {
    EncoderShape shape;
    std::int64_t kept, overhead;
    double expect_m, tol;
  };
  // The published deltas carry one decimal and were taken from rounded
  // totals, so one unit of that decimal is allowed (medium: 0.3M).
  const Row rows[] = {{whisper_small(), 10, 1'500'000, -12.7, 0.1},
                      {whisper_medium(), 22, 1'800'000, -23.2, 0.3},
                      {whisper_large_v2(), 30, 1'500'000, -37.8, 0.1}};
  bool ok = true;
  std::string detail;
  for (const auto& r : rows) {
    const double m = static_cast<double>(net_delta(r.shape, r.kept, r.overhead)) / 1e6;
    if (std::abs(m - r.expect_m) > r.tol) ok = false;
    detail += fmt("%s %lldL %+.2fM; ", r.shape.name.c_str(), static_cast<long long>(r.kept), m);
  }
  return {ok, detail};
}

// ---- 3. compensation deltas from injected WERs ------------------------------

Outcome compensation_regression(const fs::path& fixture) {
  const SweepResults r = results_from_fixture(io::read_file(fixture));
  const auto deltas = compensation_delta(r.cells, 2);
  struct Expect {
    const char *scale, *lang;
    double full, pruned;
  };
  const Expect want[] = {{"small", "da", 5.47, 3.26},    {"small", "nl", 2.58, 4.18},
                         {"small", "en", 3.97, 5.17},    {"medium", "da", 0.12, 1.82},
                         {"medium", "nl", 1.82, 2.38},   {"medium", "en", 2.20, 2.07},
                         {"large-v2", "da", 2.02, 2.55}, {"large-v2", "nl", 1.73, 2.17},
                         {"large-v2", "en", 1.78, 2.71}};
  if (deltas.size() != 9) return {false, fmt("expected 9 conditions, got %zu", deltas.size())};
  std::size_t matched = 0, pruned_larger = 0;
  for (const auto& w : want) {
    for (const auto& d : deltas) {
      if (d.scale != w.scale || d.language != w.lang) continue;
      if (std::abs(d.full_delta - w.full) <= 0.005 + 1e-9) ++matched;
      if (std::abs(d.pruned_delta - w.pruned) <= 0.005 + 1e-9) ++matched;
      if (d.pruned_delta > d.full_delta) ++pruned_larger;
    }
  }
  return {matched == 18 && pruned_larger == 7,
          fmt("%zu/18 entries match to 0.01, pruned > full in %zu of 9", matched, pruned_larger)};
}

// ---- 4. alignment vs cost-only DP --------------------------------------------------

std::size_t levenshtein(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (a[i - 1] != b[j - 1])});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

Outcome wer_oracle() {
  std::mt19937_64 rng(2024);
  const std::vector<std::string> words{"a", "b", "c", "d", "e", "of", "sight"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1), len_ref(1, 12),
      len_hyp(0, 12);
  std::size_t bad_cost = 0, bad_sum = 0;
  for (int i = 0; i < 500; ++i) {
    std::vector<std::string> ref(len_ref(rng)), hyp(len_hyp(rng));
    for (auto& w : ref) w = words[pick(rng)];
    for (auto& w : hyp) w = words[pick(rng)];
    const AlignmentCounts c = align(ref, hyp);
    if (c.errors() != levenshtein(ref, hyp)) ++bad_cost;
    if (c.hits + c.substitutions + c.deletions != ref.size() || c.ref_words != ref.size()) ++bad_sum;
  }
  return {bad_cost == 0 && bad_sum == 0,
          fmt("500 cases, %zu cost mismatches, %zu H+S+D!=N", bad_cost, bad_sum)};
}

// ---- 5. gradients, frozen weights, zero-init LoRA -------------------------------

Outcome gradient_suite() {
  using testing::check_gradients;
  using testing::readout;
  nn::Rng rng(77);
  std::vector<std::pair<std::string, double>> errs;
  // elementary ops
  {
    nn::Tensor x = random_tensor({4, 6}, rng), w = random_tensor({3, 6}, rng),
               b = random_tensor({3}, rng), g = random_tensor({6}, rng),
               lb = random_tensor({6}, rng);
    errs.emplace_back("linear", check_gradients({x, w, b}, [&] {
                        return readout(nn::linear(x, w, b));
                      }).max_rel_error);
    errs.emplace_back("layer_norm", check_gradients({x, g, lb}, [&] {
                        return readout(nn::layer_norm(x, g, lb));
                      }).max_rel_error);
    nn::Tensor q = random_tensor({5, 6}, rng), k = random_tensor({5, 6}, rng),
               v = random_tensor({5, 6}, rng);
    errs.emplace_back("attention", check_gradients({q, k, v}, [&] {
                        return readout(nn::multi_head_attention(q, k, v, 2, true));
                      }).max_rel_error);
    nn::Tensor logits = random_tensor({4, 5}, rng);
    const std::vector<int> t{0, 3, 1, 4};
    const std::vector<bool> m{true, true, false, true};
    errs.emplace_back("cross_entropy", check_gradients({logits}, [&] {
                        return nn::cross_entropy(logits, t, m);
                      }).max_rel_error);
  }
  // encoder block
  {
    const EncoderConfig ec = testing::toy_encoder_config(1);
    EncoderWeights w = init_encoder(ec, 3);
    nn::Tensor frames = random_tensor({6, ec.feature_dim}, rng, false);
    std::vector<nn::Tensor> ps;
    for (const auto& p : w.named()) ps.push_back(p.tensor);
    errs.emplace_back("encoder", check_gradients(ps, [&] {
                        return readout(encode(ec, w, frames, PruneSpec{1}));
                      }).max_rel_error);
  }
  // projector in training mode (fixed dropout mask)
  {
    const ProjectorConfig pc = testing::toy_projector_config();
    ProjectorWeights w = init_projector(pc, 4);
    nn::Tensor enc = random_tensor({11, pc.in_dim}, rng, false);
    std::vector<nn::Tensor> ps;
    for (const auto& p : w.named()) ps.push_back(p.tensor);
    errs.emplace_back("projector", check_gradients(ps, [&] {
                        nn::Rng mask(8);
                        return readout(project(pc, w, enc, true, &mask));
                      }).max_rel_error);
  }
  // LM with LoRA on every attention projection (B randomized so A has signal)
  {
    const LmConfig lc = testing::toy_lm_config();
    LmWeights lm = init_lm(lc, 5);
    LoraAdapterSet lora = init_lora(lc, testing::toy_lora_config(), 6);
    for (auto& p : lora.named()) {
      nn::Tensor t = p.tensor;
      for (double& v : t.mutable_values()) v = std::normal_distribution<double>(0, 0.5)(rng);
      t.set_requires_grad(true);
    }
    nn::Tensor prefix = random_tensor({3, lc.d_model}, rng, false);
    const std::vector<int> text = lc.vocab.encode("ab c");
    std::vector<nn::Tensor> ps;
    for (const auto& p : lora.named()) ps.push_back(p.tensor);
    for (const auto& p : lm.named()) ps.push_back(p.tensor);
    errs.emplace_back("lm+lora", check_gradients(ps, [&] {
                        nn::Rng drop(9);
                        LmRun run{lc, lm, &lora, true, &drop};
                        return forward_asr(run, prefix, text).loss;
                      }).max_rel_error);
  }
  double worst = 0.0;
  std::string detail;
  for (const auto& [name, e] : errs) {
    worst = std::max(worst, e);
    detail += fmt("%s %.1e ", name.c_str(), e);
  }

  // frozen tensors after a 200-step run
  const EncoderConfig ec = testing::toy_encoder_config(4);
  const LmConfig lc = testing::toy_lm_config();
  const EncoderWeights enc = init_encoder(ec, 10);
  const LmWeights lm = init_lm(lc, 11);
  const ParamList enc_named = enc.named(), lm_named = lm.named();
  const auto enc_snap = snapshot(enc_named), lm_snap = snapshot(lm_named);
  AsrBundle b = make_bundle(ec, enc, 2, testing::toy_projector_config(), lc, lm,
                            testing::toy_lora_config(), 12);
  const auto frozen_snap = snapshot(b.frozen());
  const auto trainable_snap = snapshot(b.trainable());
  TrainRecipe r;
  r.lr = 1e-2;
  r.epochs = 10;
  r.batch_size = 1;
  r.seed = 13;
  const auto trace = train_asr(b, testing::toy_corpus(20), r);
  const bool frozen_ok = trace.size() == 200 && bit_identical(b.frozen(), frozen_snap) &&
                         bit_identical(enc_named, enc_snap) && bit_identical(lm_named, lm_snap);
  const bool trained = !bit_identical(b.trainable(), trainable_snap);

  // zero-initialized LoRA leaves logits unchanged
  nn::Rng prng(14);
  nn::Tensor prefix = random_tensor({4, lc.d_model}, prng, false);
  const LoraAdapterSet fresh = init_lora(lc, testing::toy_lora_config(), 15);
  const std::vector<int> text = lc.vocab.encode("hello there");
  const nn::Tensor plain = lm_logits(LmRun{lc, lm}, prefix, text);
  const nn::Tensor adapted = lm_logits(LmRun{lc, lm, &fresh}, prefix, text);
  const bool zero_ok = std::equal(plain.values().begin(), plain.values().end(),
                                  adapted.values().begin());

  detail += fmt("| %zu steps, frozen %s, trainables %s, zero-init LoRA logits %s",
                trace.size(), frozen_ok ? "bit-identical" : "CHANGED",
                trained ? "updated" : "UNCHANGED", zero_ok ? "identical" : "DIFFER");
  return {worst < 1e-4 && frozen_ok && trained && zero_ok, detail};
}

// ---- 6. truncation equivalence ------------------------------------------------------

Outcome truncation() {
  const EncoderConfig ec = testing::toy_encoder_config(8);
  const EncoderWeights w = init_encoder(ec, 21);
  nn::Rng rng(22);
  const nn::Tensor frames = random_tensor({15, ec.feature_dim}, rng, false);
  const EncoderTrace trace = encode_traced(ec, w, frames);
  double worst = 0.0;
  for (std::size_t k : {2, 4, 6, 8}) {
    const nn::Tensor intercept = encoder_final_norm(w, trace.block_outputs[k - 1]);
    const nn::Tensor direct = encode(ec, w, frames, PruneSpec{k});
    EncoderConfig pc = ec;
    pc.num_layers = k;
    const nn::Tensor rebuilt = encode(pc, build_pruned_weights(w, PruneSpec{k}), frames, PruneSpec{k});
    for (std::size_t i = 0; i < intercept.size(); ++i) {
      worst = std::max(worst, std::abs(intercept.values()[i] - direct.values()[i]));
      worst = std::max(worst, std::abs(intercept.values()[i] - rebuilt.values()[i]));
    }
  }
  return {worst <= 1e-12, fmt("k in {2,4,6,8}, max |diff| %.2e", worst)};
}

// ---- 7. beam-2 on a toy LM ---------------------------------------------------------------

Outcome beam_optimality() {
  // Tokens: 0 and 2 are words, 1 is EOS. Next-token log-probs depend only
  // on the previous token (BOS counts as its own context).
  std::mt19937_64 rng(31);
  std::normal_distribution<double> n(0.0, 2.0);
  std::size_t agree = 0;
  for (int trial = 0; trial < 50; ++trial) {
    double table[4][3];  // context: BOS, token 0, (unused), token 2
    for (auto& row : table) {
      double z = 0.0, mx = -1e300;
      for (double& v : row) mx = std::max(mx, v = n(rng));
      for (double v : row) z += std::exp(v - mx);
      for (double& v : row) v -= mx + std::log(z);
    }
    auto scorer = [&](std::span<const int> prefix) {
      const int ctx = prefix.empty() ? 1 : prefix.back() + 1;
      return std::vector<double>(table[ctx], table[ctx] + 3);
    };
    BeamOptions o;
    o.beam_size = 2;
    o.max_len = 3;
    o.eos = 1;
    const BeamResult got =
        beam_search(scorer, o, [](std::span<const int> t) { return t.empty() ? -1 : t.back(); });
    // exhaustive: every word sequence of length 0..2 closed by EOS
    double best = -1e300;
    std::vector<int> best_seq;
    std::vector<std::vector<int>> seqs{{}};
    for (int a : {0, 2}) {
      seqs.push_back({a});
      for (int b : {0, 2}) seqs.push_back({a, b});
    }
    for (const auto& s : seqs) {
      double score = 0.0;
      std::vector<int> prefix;
      for (int t : s) {
        score += scorer(prefix)[t];
        prefix.push_back(t);
      }
      score += scorer(prefix)[1];
      if (score > best) {
        best = score;
        best_seq = s;
      }
    }
    if (!got.truncated && got.tokens == best_seq && std::abs(got.score - best) < 1e-12) ++agree;
  }
  return {agree == 50, fmt("%zu/50 random logit settings match exhaustive search", agree)};
}

// ---- 8. qualitative reproduction on the synthetic high tier ----------------------------------

Outcome qualitative(const fs::path& config_path) {
  const ExperimentConfig cfg = load_config(config_path);
  const StudyData data = make_study_data(cfg);
  const StudyModels models = pretrain_models(cfg, data);
  const std::string scale = cfg.scales.front().name;
  const std::size_t full = cfg.scales.front().encoder.num_layers;
  const std::string tier = "high";
  const std::string lang = cfg.tier(tier).profile;
  const std::vector<CellSpec> specs{{scale, tier, lang, full, false},
                                    {scale, tier, lang, full - 2, false},
                                    {scale, tier, lang, full - 2, true}};
  const auto cells = run_grid(specs, cfg.master_seed, 1, [&](const CellSpec& s, std::uint64_t seed) {
    return run_cell(cfg, data, models, s, seed);
  });
  for (const auto& c : cells) {
    if (c.failed) return {false, "cell failed: " + c.failure};
  }
  const auto &base = cells[0], &pruned = cells[1], &lora = cells[2];
  const double ds = static_cast<double>(pruned.totals.substitutions) -
                    static_cast<double>(lora.totals.substitutions);
  const double dd = static_cast<double>(pruned.totals.deletions) -
                    static_cast<double>(lora.totals.deletions);
  const double total = static_cast<double>(pruned.totals.errors()) -
                       static_cast<double>(lora.totals.errors());
  const bool a = base.wer < 0.3;
  const bool b = pruned.wer - base.wer > 0.0;
  const bool c = lora.wer <= pruned.wer && total > 0 && (ds + dd) / total > 0.5;
  return {a && b && c,
          fmt("(a) %dL WER %.4f %s; (b) %dL WER %.4f, delta %+.4f %s; (c) %dL+LoRA WER %.4f, "
              "error reduction %.0f with dS+dD share %.2f %s",
              static_cast<int>(full), base.wer, a ? "ok" : "FAIL", static_cast<int>(full - 2),
              pruned.wer, pruned.wer - base.wer, b ? "ok" : "FAIL", static_cast<int>(full - 2),
              lora.wer, total, total > 0 ? (ds + dd) / total : 0.0, c ? "ok" : "FAIL")};
}

// ---- 9. normalization ---------------------------------------------------------------------

Outcome normalization() {
  const NormalizationProfile da = builtin_profile("da").normalization();
  std::size_t failures = 0;
  auto expect = [&](const std::string& in, const std::string& want, const NormalizationProfile& p) {
    if (normalize(in, p) != want) ++failures;
  };
  expect("Heaven, forbid!", "heaven forbid", {});
  expect("Fru SIMONIN's hus \xE2\x80\x94 p\xC3\xA5 \xC3\x86r\xC3\xB8.",
         "fru simonin's hus p\xC3\xA5 \xC3\xA6r\xC3\xB8", da);
  expect("  don't\t'quote'  ", "don't quote", {});
  expect("\xC3\x85 \xC3\x98 \xC3\x86", "\xC3\xA5 \xC3\xB8 \xC3\xA6", da);
  expect("it\xE2\x80\x99s", "it's", {});

  const std::vector<std::string> pieces{"a",  "Z",  "q",  " ",  "  ", "\t", "'",  "\xE2\x80\x99",
                                        ",",  ".",  "!",  "?",  "-",  "\xE2\x80\x94", "\xC3\xA6",
                                        "\xC3\x86", "\xC3\xB8", "\xC3\x98", "\xC3\xA5", "\xC3\x85",
                                        "7",  "\"", ";",  "\xC3\xA9", "(", ")"};
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<std::size_t> pick(0, pieces.size() - 1), len(0, 30);
  std::size_t idem = 0, lower = 0, punct = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    for (std::size_t k = len(rng); k > 0; --k) s += pieces[pick(rng)];
    const std::string once = normalize(s, da);
    if (normalize(once, da) != once) ++idem;
    for (const char* upper : {"A", "Z", "Q", "\xC3\x86", "\xC3\x98", "\xC3\x85"}) {
      if (once.find(upper) != std::string::npos) ++lower;
    }
    for (char ch : std::string(",.!?-\";()")) {
      if (once.find(ch) != std::string::npos) ++punct;
    }
    if (once.find("  ") != std::string::npos || (!once.empty() && (once.front() == ' ' || once.back() == ' '))) {
      ++punct;
    }
    for (std::size_t p = once.find('\''); p != std::string::npos; p = once.find('\'', p + 1)) {
      if (p == 0 || p + 1 == once.size() || once[p - 1] == ' ' || once[p + 1] == ' ') ++punct;
    }
  }
  return {failures == 0 && idem == 0 && lower == 0 && punct == 0,
          fmt("5 worked examples (%zu wrong); 1000 random strings: %zu not idempotent, %zu "
              "uppercase left, %zu punctuation/spacing violations",
              failures, idem, lower, punct)};
}

// ---- 10. determinism across worker counts -------------------------------------------------

Outcome determinism(const fs::path& config_path) {
  const ExperimentConfig cfg = load_config(config_path);
  const StudyData data = make_study_data(cfg);
  const StudyModels models = pretrain_models(cfg, data);
  const auto specs = study_grid(cfg);
  auto runner = [&](const CellSpec& s, std::uint64_t seed) {
    return run_cell(cfg, data, models, s, seed);
  };
  const auto one = run_grid(specs, cfg.master_seed, 1, runner);
  const auto three = run_grid(specs, cfg.master_seed, 3, runner);
  std::size_t same = 0;
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!one[i].failed && !three[i].failed &&
        std::bit_cast<std::uint64_t>(one[i].wer) == std::bit_cast<std::uint64_t>(three[i].wer) &&
        one[i].seed == three[i].seed) {
      ++same;
    }
  }
  // a single cell re-run from its recorded seed, as the manifest replays it
  const ExperimentCell again = run_cell(cfg, data, models, specs.back(), one.back().seed);
  const bool rerun = std::bit_cast<std::uint64_t>(again.wer) ==
                     std::bit_cast<std::uint64_t>(one.back().wer);
  return {same == specs.size() && rerun,
          fmt("%zu/%zu cells bit-identical between 1 and 3 workers; replay of %s %s (WER %.6f)",
              same, specs.size(), cell_name(specs.back()).c_str(),
              rerun ? "identical" : "DIFFERENT", again.wer)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slamprune acceptance gate"};
  const fs::path src = SLAMPRUNE_SOURCE_DIR;
  std::string study = (src / "configs/acceptance.json").string();
  std::string smoke = (src / "configs/smoke.json").string();
  std::string fixture = (src / "tests/fixtures/published_wer.json").string();
  std::vector<int> only;
  app.add_option("--study-config", study, "config for criterion 8");
  app.add_option("--smoke-config", smoke, "config for criterion 10");
  app.add_option("--fixture", fixture, "published WER fixture for criterion 3");
  app.add_option("--only", only, "run only these criteria")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"parameter accounting", parameter_accounting},
      {"sweet-spot net delta arithmetic", sweet_spot_arithmetic},
      {"compensation delta regression", [&] { return compensation_regression(fixture); }},
      {"WER oracle equivalence", wer_oracle},
      {"gradient suite", gradient_suite},
      {"truncation equivalence", truncation},
      {"beam-2 optimality on toy LM", beam_optimality},
      {"qualitative reproduction", [&] { return qualitative(study); }},
      {"normalization conformance", normalization},
      {"determinism across workers", [&] { return determinism(smoke); }},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i + 1);
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2d: %s  %s [%.1fs]\n    %s\n", id, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), secs, o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
