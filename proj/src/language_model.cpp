// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/language_model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "slamprune/text.hpp"

namespace slamprune {

using nn::Tensor;

// ---- vocabulary ---------------------------------------------------------

Vocab::Vocab(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i] == kBos) bos_ = static_cast<int>(i);
    if (symbols_[i] == kEos) eos_ = static_cast<int>(i);
  }
  if (bos_ < 0 || eos_ < 0) fail(ErrorKind::kConfig, "vocabulary must contain BOS and EOS");
}

Vocab Vocab::from_characters(const std::vector<std::string>& chars) {
  std::set<std::string> uniq(chars.begin(), chars.end());
  std::vector<std::string> symbols{std::string(kBos), std::string(kEos)};
  for (const auto& c : uniq) {
    if (c == kBos || c == kEos) continue;
    symbols.push_back(c);
  }
  return Vocab(std::move(symbols));
}

bool Vocab::contains(std::string_view symbol) const {
  return std::find(symbols_.begin(), symbols_.end(), symbol) != symbols_.end();
}

int Vocab::id(std::string_view symbol) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), symbol);
  if (it == symbols_.end()) {
    fail(ErrorKind::kData, "symbol '" + std::string(symbol) + "' not in vocabulary");
  }
  return static_cast<int>(it - symbols_.begin());
}

std::vector<int> Vocab::encode(std::string_view text) const {
  std::vector<int> ids;
  for (const auto& c : utf8_chars(text)) ids.push_back(id(c));
  return ids;
}

std::string Vocab::decode(std::span<const int> ids) const {
  std::string out;
  for (int i : ids) {
    if (i == bos_ || i == eos_) continue;
    out += symbols_.at(static_cast<std::size_t>(i));
  }
  return out;
}

void LmConfig::validate() const {
  if (vocab.size() < 3) fail(ErrorKind::kConfig, "lm vocabulary too small");
  if (d_model < 1 || num_layers < 1 || num_heads < 1 || max_seq < 2 || ffn_mult < 1) {
    fail(ErrorKind::kConfig, "lm dimensions must be positive");
  }
  if (d_model % num_heads != 0) {
    fail(ErrorKind::kConfig, "lm.d_model must be divisible by num_heads");
  }
}

// ---- LoRA ---------------------------------------------------------------

std::string_view lora_target_name(LoraTarget t) {
  switch (t) {
    case LoraTarget::kQ: return "q";
    case LoraTarget::kK: return "k";
    case LoraTarget::kV: return "v";
    case LoraTarget::kO: return "o";
  }
  return "?";
}

LoraTarget parse_lora_target(std::string_view name) {
  if (name == "q" || name == "Q") return LoraTarget::kQ;
  if (name == "k" || name == "K") return LoraTarget::kK;
  if (name == "v" || name == "V") return LoraTarget::kV;
  if (name == "o" || name == "O") return LoraTarget::kO;
  fail(ErrorKind::kConfig, "unknown LoRA target '" + std::string(name) + "'");
}

void LoraConfig::validate() const {
  if (rank < 1) fail(ErrorKind::kConfig, "lora.rank must be >= 1");
  if (!(alpha > 0.0)) fail(ErrorKind::kConfig, "lora.alpha must be > 0");
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) {
    fail(ErrorKind::kConfig, "lora.dropout_p must lie in [0, 1)");
  }
  if (targets.empty()) fail(ErrorKind::kConfig, "lora.targets must not be empty");
  if (!std::isfinite(scale())) fail(ErrorKind::kConfig, "lora scale alpha/rank not finite");
}

const LoraAdapter* LoraAdapterSet::find(std::size_t layer, LoraTarget target) const {
  if (layer >= layers.size()) return nullptr;
  const auto& slot = layers[layer][static_cast<int>(target)];
  return slot ? &*slot : nullptr;
}

ParamList LoraAdapterSet::named() const {
  ParamList out;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    for (int t = 0; t < 4; ++t) {
      const auto& slot = layers[l][t];
      if (!slot) continue;
      const std::string p = "layers." + std::to_string(l) + "." +
                            std::string(lora_target_name(static_cast<LoraTarget>(t))) + ".";
      out.push_back({p + "a", slot->a});
      out.push_back({p + "b", slot->b});
    }
  }
  return out;
}

std::size_t LoraAdapterSet::param_count() const { return slamprune::param_count(named()); }

LoraAdapterSet LoraAdapterSet::from_named(const LoraConfig& config,
                                          std::size_t num_layers,
                                          const ParamList& params) {
  std::map<std::string, Tensor> m;
  for (const auto& p : params) m[p.name] = p.tensor;
  LoraAdapterSet set;
  set.config = config;
  set.layers.resize(num_layers);
  for (std::size_t l = 0; l < num_layers; ++l) {
    for (LoraTarget t : config.targets) {
      const std::string p = "layers." + std::to_string(l) + "." +
                            std::string(lora_target_name(t)) + ".";
      if (!m.count(p + "a") || !m.count(p + "b")) {
        fail(ErrorKind::kIo, "adapter checkpoint lacks " + p + "{a,b}");
      }
      set.layers[l][static_cast<int>(t)] = LoraAdapter{m[p + "a"], m[p + "b"]};
    }
  }
  return set;
}

LoraAdapterSet init_lora(const LmConfig& lm, const LoraConfig& config,
                         std::uint64_t seed) {
  config.validate();
  nn::Rng rng(seed);
  LoraAdapterSet set;
  set.config = config;
  set.layers.resize(lm.num_layers);
  const std::size_t d = lm.d_model;
  for (std::size_t l = 0; l < lm.num_layers; ++l) {
    for (LoraTarget t : config.targets) {
      auto& slot = set.layers[l][static_cast<int>(t)];
      if (slot) continue;
      slot = LoraAdapter{nn::glorot_uniform(config.rank, d, rng),
                         Tensor::zeros({d, config.rank}, true)};
    }
  }
  return set;
}

Tensor lora_forward(const Tensor& w, const LoraAdapter* adapter, const Tensor& x,
                    double scale, double dropout_p, bool train, nn::Rng* rng) {
  Tensor base = nn::linear(x, w);
  if (adapter == nullptr) return base;
  const Tensor& a = adapter->a;
  const Tensor& b = adapter->b;
  if (a.dim() != 2 || b.dim() != 2 || a.rows() != b.cols() || a.cols() != w.cols() ||
      b.rows() != w.rows()) {
    fail(ErrorKind::kDimension, "lora_forward: adapter shapes do not match weight");
  }
  Tensor low = nn::linear(nn::dropout(x, dropout_p, train, rng), a);
  return nn::add(base, nn::scale(nn::linear(low, b), scale));
}

// ---- weights ------------------------------------------------------------

ParamList LmWeights::named() const {
  ParamList out{{"tok_emb", tok_emb}, {"pos_emb", pos_emb}, {"seg_emb", seg_emb}};
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    const LmBlock& b = blocks[i];
    append_prefixed(out, "blocks." + std::to_string(i) + ".",
                    {{"ln1.g", b.ln1_g},
                     {"ln1.b", b.ln1_b},
                     {"attn.wq", b.wq},
                     {"attn.wk", b.wk},
                     {"attn.wv", b.wv},
                     {"attn.wo", b.wo},
                     {"ln2.g", b.ln2_g},
                     {"ln2.b", b.ln2_b},
                     {"fc1.w", b.fc1_w},
                     {"fc1.b", b.fc1_b},
                     {"fc2.w", b.fc2_w},
                     {"fc2.b", b.fc2_b}});
  }
  out.push_back({"lnf.g", lnf_g});
  out.push_back({"lnf.b", lnf_b});
  out.push_back({"head.w", head_w});
  return out;
}

LmWeights LmWeights::from_named(const ParamList& params) {
  std::map<std::string, Tensor> m;
  for (const auto& p : params) m[p.name] = p.tensor;
  auto get = [&](const std::string& n) {
    auto it = m.find(n);
    if (it == m.end()) fail(ErrorKind::kIo, "lm checkpoint lacks tensor " + n);
    return it->second;
  };
  LmWeights w;
  w.tok_emb = get("tok_emb");
  w.pos_emb = get("pos_emb");
  w.seg_emb = get("seg_emb");
  for (std::size_t i = 0; m.count("blocks." + std::to_string(i) + ".ln1.g"); ++i) {
    const std::string p = "blocks." + std::to_string(i) + ".";
    w.blocks.push_back({get(p + "ln1.g"), get(p + "ln1.b"), get(p + "attn.wq"),
                        get(p + "attn.wk"), get(p + "attn.wv"), get(p + "attn.wo"),
                        get(p + "ln2.g"), get(p + "ln2.b"), get(p + "fc1.w"),
                        get(p + "fc1.b"), get(p + "fc2.w"), get(p + "fc2.b")});
  }
  w.lnf_g = get("lnf.g");
  w.lnf_b = get("lnf.b");
  w.head_w = get("head.w");
  return w;
}

LmWeights init_lm(const LmConfig& config, std::uint64_t seed) {
  config.validate();
  nn::Rng rng(seed);
  const std::size_t d = config.d_model, f = config.ffn_mult * d;
  const std::size_t v = config.vocab.size();
  std::normal_distribution<double> unit(0.0, 1.0);
  auto normal = [&](std::size_t rows) {
    std::vector<double> vals(rows * d);
    for (double& x : vals) x = unit(rng);
    return Tensor::from({rows, d}, std::move(vals), true);
  };
  auto zeros = [](std::size_t n) { return Tensor::zeros({n}, true); };
  auto ones = [](std::size_t n) { return Tensor::full({n}, 1.0, true); };
  LmWeights w;
  w.tok_emb = normal(v);
  w.pos_emb = normal(config.max_seq);
  w.seg_emb = normal(2);
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    w.blocks.push_back({ones(d), zeros(d), nn::glorot_uniform(d, d, rng),
                        nn::glorot_uniform(d, d, rng), nn::glorot_uniform(d, d, rng),
                        nn::glorot_uniform(d, d, rng), ones(d), zeros(d),
                        nn::glorot_uniform(f, d, rng), zeros(f),
                        nn::glorot_uniform(d, f, rng), zeros(d)});
  }
  w.lnf_g = ones(d);
  w.lnf_b = zeros(d);
  w.head_w = nn::glorot_uniform(v, d, rng);
  return w;
}

// ---- forward ------------------------------------------------------------

Tensor null_prefix(const LmConfig& config) {
  return Tensor::zeros({1, config.d_model});
}

Tensor lm_logits(const LmRun& run, const Tensor& prefix,
                 std::span<const int> text_inputs) {
  const LmConfig& cfg = run.config;
  const LmWeights& w = run.weights;
  if (prefix.dim() != 2 || prefix.cols() != cfg.d_model || prefix.rows() < 1) {
    fail(ErrorKind::kDimension, "lm: prefix must be [S x " + std::to_string(cfg.d_model) +
                                    "] with S >= 1");
  }
  const std::size_t s = prefix.rows();
  const std::size_t n = text_inputs.size() + 1;  // BOS
  if (s + n > cfg.max_seq) {
    fail(ErrorKind::kLength, "lm: sequence of " + std::to_string(s + n) +
                                 " exceeds max_seq " + std::to_string(cfg.max_seq));
  }
  std::vector<int> pos_prefix(s), pos_text(n), tokens(n);
  std::iota(pos_prefix.begin(), pos_prefix.end(), 0);
  std::iota(pos_text.begin(), pos_text.end(), 0);
  tokens[0] = cfg.vocab.bos();
  std::copy(text_inputs.begin(), text_inputs.end(), tokens.begin() + 1);

  const std::vector<int> seg0{0}, seg1{1};
  Tensor pre = nn::add_row(nn::add(prefix, nn::gather_rows(w.pos_emb, pos_prefix)),
                           nn::gather_rows(w.seg_emb, seg0));
  Tensor txt = nn::add_row(
      nn::add(nn::gather_rows(w.tok_emb, tokens), nn::gather_rows(w.pos_emb, pos_text)),
      nn::gather_rows(w.seg_emb, seg1));
  const std::array<Tensor, 2> parts{pre, txt};
  Tensor x = nn::concat_rows(parts);

  const double lscale = run.lora ? run.lora->config.scale() : 0.0;
  const double lp = run.lora ? run.lora->config.dropout_p : 0.0;
  for (std::size_t l = 0; l < w.blocks.size(); ++l) {
    const LmBlock& b = w.blocks[l];
    auto adapter = [&](LoraTarget t) {
      return run.lora ? run.lora->find(l, t) : nullptr;
    };
    Tensor h = nn::layer_norm(x, b.ln1_g, b.ln1_b);
    Tensor q = lora_forward(b.wq, adapter(LoraTarget::kQ), h, lscale, lp, run.train, run.rng);
    Tensor k = lora_forward(b.wk, adapter(LoraTarget::kK), h, lscale, lp, run.train, run.rng);
    Tensor v = lora_forward(b.wv, adapter(LoraTarget::kV), h, lscale, lp, run.train, run.rng);
    Tensor a = nn::multi_head_attention(q, k, v, cfg.num_heads, /*causal=*/true);
    x = nn::add(x, lora_forward(b.wo, adapter(LoraTarget::kO), a, lscale, lp, run.train,
                                run.rng));
    Tensor h2 = nn::layer_norm(x, b.ln2_g, b.ln2_b);
    x = nn::add(x, nn::linear(nn::relu(nn::linear(h2, b.fc1_w, b.fc1_b)), b.fc2_w, b.fc2_b));
  }
  x = nn::layer_norm(x, w.lnf_g, w.lnf_b);
  return nn::linear(x, w.head_w);
}

Tensor AsrForward::target_logits() const {
  return nn::slice_rows(logits, prefix_len, logits.rows() - prefix_len);
}

AsrForward forward_asr(const LmRun& run, const Tensor& speech_prefix,
                       std::span<const int> target_tokens) {
  AsrForward out;
  out.logits = lm_logits(run, speech_prefix, target_tokens);
  out.prefix_len = speech_prefix.rows();
  const std::size_t rows = out.logits.rows();
  out.targets.assign(rows, 0);
  out.mask.assign(rows, false);
  for (std::size_t i = 0; i <= target_tokens.size(); ++i) {
    const std::size_t r = out.prefix_len + i;
    out.targets[r] = i < target_tokens.size() ? target_tokens[i] : run.config.vocab.eos();
    out.mask[r] = true;
  }
  out.loss = nn::cross_entropy(out.logits, out.targets, out.mask);
  return out;
}

std::vector<double> next_token_log_probs(const LmRun& run, const Tensor& prefix,
                                         std::span<const int> generated) {
  Tensor logits = lm_logits(run, prefix, generated);
  const std::size_t v = logits.cols();
  const auto all = logits.values();
  return nn::log_softmax(all.subspan((logits.rows() - 1) * v, v));
}

// ---- pretraining --------------------------------------------------------

LmWeights pretrain_lm(const LmConfig& config, const std::vector<std::string>& texts,
                      const LmPretrainOptions& options, std::uint64_t init_seed,
                      LmPretrainReport* report) {
  if (texts.empty()) fail(ErrorKind::kData, "pretrain_lm: empty text corpus");
  LmWeights w = init_lm(config, init_seed);
  std::vector<std::vector<int>> encoded;
  encoded.reserve(texts.size());
  for (const auto& t : texts) encoded.push_back(config.vocab.encode(t));

  // Symbols eligible as corruption replacements: everything but BOS/EOS.
  std::vector<int> plain;
  for (std::size_t i = 0; i < config.vocab.size(); ++i) {
    const int id = static_cast<int>(i);
    if (id != config.vocab.bos() && id != config.vocab.eos()) plain.push_back(id);
  }
  const ParamList params = w.named();
  auto trace = run_training(
      params, encoded.size(), options.recipe, [&](std::size_t ex, nn::Rng& rng) {
        const auto& ids = encoded[ex];
        std::uniform_real_distribution<double> u(0.0, 1.0);
        std::uniform_int_distribution<std::size_t> pick(0, plain.size() - 1);
        LmRun run{config, w, nullptr, true, &rng};
        if (ids.empty() || u(rng) < options.unconditional_frac) {
          return forward_asr(run, null_prefix(config), ids).loss;
        }
        std::vector<int> noisy = ids;
        for (int& c : noisy) {
          if (u(rng) < options.corruption) c = plain[pick(rng)];
        }
        return forward_asr(run, nn::gather_rows(w.tok_emb, noisy), ids).loss;
      });
  if (report) report->trace = std::move(trace);
  set_trainable(params, false);
  return w;
}

double text_log_likelihood(const LmConfig& config, const LmWeights& weights,
                           std::string_view text) {
  const std::vector<int> ids = config.vocab.encode(text);
  LmRun run{config, weights};
  AsrForward f = forward_asr(run, null_prefix(config), ids);
  const std::size_t v = f.logits.cols();
  double ll = 0.0;
  for (std::size_t r = 0; r < f.mask.size(); ++r) {
    if (!f.mask[r]) continue;
    const auto lp = nn::log_softmax(f.logits.values().subspan(r * v, v));
    ll += lp[f.targets[r]];
  }
  return ll;
}

double perplexity(const LmConfig& config, const LmWeights& weights,
                  const std::vector<std::string>& texts) {
  double nll = 0.0;
  std::size_t tokens = 0;
  for (const auto& t : texts) {
    nll -= text_log_likelihood(config, weights, t);
    tokens += utf8_chars(t).size() + 1;
  }
  if (tokens == 0) fail(ErrorKind::kData, "perplexity: no tokens");
  return std::exp(nll / static_cast<double>(tokens));
}

}  // namespace slamprune
