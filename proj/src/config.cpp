// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/config.hpp"

#include <json.hpp>
#include <set>

#include "slamprune/errors.hpp"
#include "slamprune/io.hpp"

namespace slamprune {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Strict object reader: every key must be consumed before finish().
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(ErrorKind::kConfig, where() + ": expected an object");
  }
  const json* get(const std::string& key) {
    seen_.insert(key);
    auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  std::string path(const std::string& key) const { return join(path_, key); }

  void size(const std::string& key, std::size_t& out, std::size_t min = 0) {
    if (const json* v = get(key)) {
      if (!v->is_number_unsigned()) {
        fail(ErrorKind::kConfig, path(key) + ": expected a non-negative integer");
      }
      const auto x = v->get<std::uint64_t>();
      if (x < min) {
        fail(ErrorKind::kConfig, path(key) + ": must be >= " + std::to_string(min));
      }
      out = static_cast<std::size_t>(x);
    }
  }
  void u64(const std::string& key, std::uint64_t& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_unsigned()) {
        fail(ErrorKind::kConfig, path(key) + ": expected a non-negative integer");
      }
      out = v->get<std::uint64_t>();
    }
  }
  void real(const std::string& key, double& out) {
    if (const json* v = get(key)) {
      if (!v->is_number()) fail(ErrorKind::kConfig, path(key) + ": expected a number");
      out = v->get<double>();
    }
  }
  void text(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) fail(ErrorKind::kConfig, path(key) + ": expected a string");
      out = v->get<std::string>();
    }
  }
  void strings(const std::string& key, std::vector<std::string>& out) {
    if (const json* v = get(key)) {
      if (!v->is_array()) fail(ErrorKind::kConfig, path(key) + ": expected an array");
      out.clear();
      for (std::size_t i = 0; i < v->size(); ++i) {
        if (!(*v)[i].is_string()) {
          fail(ErrorKind::kConfig, path(key) + "[" + std::to_string(i) + "]: expected a string");
        }
        out.push_back((*v)[i].get<std::string>());
      }
    }
  }
  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) {
        fail(ErrorKind::kConfig, path(it.key()) + ": unknown key");
      }
    }
  }

 private:
  std::string where() const { return path_.empty() ? "<root>" : path_; }
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

template <typename Fn>
void checked(const std::string& path, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kConfig) throw;
    const std::string msg = e.what();
    if (msg.rfind(path, 0) == 0) throw;
    fail(ErrorKind::kConfig, (path.empty() ? "<root>" : path) + ": " + msg);
  }
}

TrainRecipe parse_recipe(const json& j, const std::string& path, TrainRecipe r) {
  Fields f(j, path);
  f.real("lr", r.lr);
  f.real("weight_decay", r.weight_decay);
  f.real("clip_norm", r.clip_norm);
  f.real("warmup_frac", r.warmup_frac);
  f.size("epochs", r.epochs, 1);
  f.size("batch_size", r.batch_size, 1);
  f.u64("seed", r.seed);
  f.real("beta1", r.beta1);
  f.real("beta2", r.beta2);
  f.real("adam_eps", r.adam_eps);
  f.finish();
  checked(path, [&] { r.validate(); });
  return r;
}

LoraConfig parse_lora(const json& j, const std::string& path, LoraConfig c) {
  Fields f(j, path);
  f.size("rank", c.rank, 1);
  f.real("alpha", c.alpha);
  f.real("dropout_p", c.dropout_p);
  std::vector<std::string> names;
  f.strings("targets", names);
  if (f.get("targets")) {
    c.targets.clear();
    for (std::size_t i = 0; i < names.size(); ++i) {
      checked(f.path("targets") + "[" + std::to_string(i) + "]",
              [&] { c.targets.push_back(parse_lora_target(names[i])); });
    }
  }
  f.finish();
  checked(path, [&] { c.validate(); });
  return c;
}

json recipe_json(const TrainRecipe& r) {
  return {{"lr", r.lr},
          {"weight_decay", r.weight_decay},
          {"clip_norm", r.clip_norm},
          {"warmup_frac", r.warmup_frac},
          {"epochs", r.epochs},
          {"batch_size", r.batch_size},
          {"seed", r.seed},
          {"beta1", r.beta1},
          {"beta2", r.beta2},
          {"adam_eps", r.adam_eps}};
}

json lora_json(const LoraConfig& c) {
  json targets = json::array();
  for (LoraTarget t : c.targets) targets.push_back(std::string(lora_target_name(t)));
  return {{"rank", c.rank}, {"alpha", c.alpha}, {"dropout_p", c.dropout_p}, {"targets", targets}};
}

}  // namespace

const ScaleConfig& ExperimentConfig::scale(const std::string& name) const {
  for (const auto& s : scales) {
    if (s.name == name) return s;
  }
  fail(ErrorKind::kConfig, "unknown scale '" + name + "'");
}

const TierSpec& ExperimentConfig::tier(const std::string& name) const {
  for (const auto& t : data.tiers) {
    if (t.name == name) return t;
  }
  fail(ErrorKind::kConfig, "unknown tier '" + name + "'");
}

LoraConfig ExperimentConfig::lora_for(const std::string& tier) const {
  auto it = lora_by_tier.find(tier);
  return it == lora_by_tier.end() ? lora_default : it->second;
}

TrainRecipe ExperimentConfig::train_for(const std::string& tier) const {
  auto it = train_by_tier.find(tier);
  return it == train_by_tier.end() ? train_default : it->second;
}

std::vector<LanguageProfile> ExperimentConfig::profiles() const {
  auto ps = builtin_profiles();
  for (auto& p : ps) {
    p.noise_sigma = data.noise_sigma;
    p.coarticulation = data.coarticulation;
    p.frames_per_char = data.frames_per_char;
  }
  return ps;
}

LanguageProfile ExperimentConfig::profile(const std::string& name) const {
  for (auto& p : profiles()) {
    if (p.name == name) return p;
  }
  fail(ErrorKind::kConfig, "unknown language profile '" + name + "'");
}

Vocab study_vocab(const std::vector<LanguageProfile>& profiles) {
  std::vector<std::string> chars{" ", "'"};
  for (const auto& p : profiles) chars.insert(chars.end(), p.alphabet.begin(), p.alphabet.end());
  return Vocab::from_characters(chars);
}

ExperimentConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    fail(ErrorKind::kConfig, std::string("<root>: invalid JSON: ") + e.what());
  }
  ExperimentConfig c;
  Fields f(root, "");
  std::string out_dir = c.output_dir.string();
  f.text("output_dir", out_dir);
  c.output_dir = out_dir;
  f.u64("master_seed", c.master_seed);

  if (const json* d = f.get("data")) {
    Fields g(*d, "data");
    g.u64("seed", c.data.seed);
    g.real("noise_sigma", c.data.noise_sigma);
    if (c.data.noise_sigma < 0.0) fail(ErrorKind::kConfig, "data.noise_sigma: must be >= 0");
    g.real("coarticulation", c.data.coarticulation);
    if (!(c.data.coarticulation >= 0.0 && c.data.coarticulation <= 1.0)) {
      fail(ErrorKind::kConfig, "data.coarticulation: must lie in [0, 1]");
    }
    g.size("frames_per_char", c.data.frames_per_char, 1);
    g.size("encoder_pretrain_per_language", c.data.encoder_pretrain_per_language, 1);
    g.size("lm_text_per_language", c.data.lm_text_per_language, 1);
    g.size("min_frames", c.data.min_frames);
    g.size("max_frames", c.data.max_frames, 1);
    if (c.data.min_frames >= c.data.max_frames) {
      fail(ErrorKind::kConfig, "data.min_frames: must be < data.max_frames");
    }
    if (const json* tiers = g.get("tiers")) {
      if (!tiers->is_array() || tiers->empty()) {
        fail(ErrorKind::kConfig, "data.tiers: expected a non-empty array");
      }
      c.data.tiers.clear();
      for (std::size_t i = 0; i < tiers->size(); ++i) {
        const std::string p = "data.tiers[" + std::to_string(i) + "]";
        Fields t((*tiers)[i], p);
        TierSpec spec;
        t.text("name", spec.name);
        t.text("profile", spec.profile);
        t.size("train", spec.train, 1);
        t.size("dev", spec.dev, 1);
        t.size("test", spec.test, 1);
        t.finish();
        if (spec.name.empty()) fail(ErrorKind::kConfig, p + ".name: required");
        checked(p + ".profile", [&] { builtin_profile(spec.profile); });
        c.data.tiers.push_back(spec);
      }
    }
    g.finish();
  }

  if (const json* s = f.get("scales")) {
    if (!s->is_array() || s->empty()) fail(ErrorKind::kConfig, "scales: expected a non-empty array");
    c.scales.clear();
    for (std::size_t i = 0; i < s->size(); ++i) {
      const std::string p = "scales[" + std::to_string(i) + "]";
      Fields g((*s)[i], p);
      ScaleConfig sc;
      g.text("name", sc.name);
      g.size("num_layers", sc.encoder.num_layers, 1);
      g.size("d_model", sc.encoder.d_model, 1);
      g.size("num_heads", sc.encoder.num_heads, 1);
      g.size("ffn_mult", sc.encoder.ffn_mult, 1);
      g.finish();
      if (sc.name.empty()) fail(ErrorKind::kConfig, p + ".name: required");
      checked(p, [&] { sc.encoder.validate(); });
      c.scales.push_back(sc);
    }
  }

  if (const json* r = f.get("encoder_pretrain")) {
    c.encoder_pretrain = parse_recipe(*r, "encoder_pretrain", c.encoder_pretrain);
  }

  if (const json* p = f.get("projector")) {
    Fields g(*p, "projector");
    g.size("concat_factor", c.projector.concat_factor, 1);
    g.size("hidden_dim", c.projector.hidden_dim, 1);
    g.real("dropout_p", c.projector.dropout_p);
    g.finish();
    if (!(c.projector.dropout_p >= 0.0 && c.projector.dropout_p < 1.0)) {
      fail(ErrorKind::kConfig, "projector.dropout_p: must lie in [0, 1)");
    }
  }

  if (const json* l = f.get("lm")) {
    Fields g(*l, "lm");
    g.size("d_model", c.lm.d_model, 1);
    g.size("num_layers", c.lm.num_layers, 1);
    g.size("num_heads", c.lm.num_heads, 1);
    g.size("max_seq", c.lm.max_seq, 2);
    g.size("ffn_mult", c.lm.ffn_mult, 1);
    if (const json* pre = g.get("pretrain")) {
      Fields h(*pre, "lm.pretrain");
      h.real("corruption", c.lm_pretrain.corruption);
      h.real("unconditional_frac", c.lm_pretrain.unconditional_frac);
      if (const json* r = h.get("recipe")) {
        c.lm_pretrain.recipe = parse_recipe(*r, "lm.pretrain.recipe", c.lm_pretrain.recipe);
      }
      h.finish();
      for (auto [name, v] : {std::pair{"corruption", c.lm_pretrain.corruption},
                             std::pair{"unconditional_frac", c.lm_pretrain.unconditional_frac}}) {
        if (!(v >= 0.0 && v <= 1.0)) {
          fail(ErrorKind::kConfig, std::string("lm.pretrain.") + name + ": must lie in [0, 1]");
        }
      }
    }
    g.finish();
  }

  if (const json* l = f.get("lora")) {
    Fields g(*l, "lora");
    if (const json* d = g.get("default")) c.lora_default = parse_lora(*d, "lora.default", c.lora_default);
    if (const json* t = g.get("tiers")) {
      if (!t->is_object()) fail(ErrorKind::kConfig, "lora.tiers: expected an object");
      for (auto it = t->begin(); it != t->end(); ++it) {
        c.lora_by_tier[it.key()] = parse_lora(*it, "lora.tiers." + it.key(), c.lora_default);
      }
    }
    g.finish();
  }

  if (const json* t = f.get("train")) {
    Fields g(*t, "train");
    if (const json* d = g.get("default")) {
      c.train_default = parse_recipe(*d, "train.default", c.train_default);
    }
    if (const json* tiers = g.get("tiers")) {
      if (!tiers->is_object()) fail(ErrorKind::kConfig, "train.tiers: expected an object");
      for (auto it = tiers->begin(); it != tiers->end(); ++it) {
        c.train_by_tier[it.key()] = parse_recipe(*it, "train.tiers." + it.key(), c.train_default);
      }
    }
    g.finish();
  }

  if (const json* gr = f.get("grid")) {
    Fields g(*gr, "grid");
    g.size("depth_step", c.grid.depth_step, 1);
    if (const json* lo = g.get("lora_options")) {
      if (!lo->is_array() || lo->empty()) {
        fail(ErrorKind::kConfig, "grid.lora_options: expected a non-empty array of booleans");
      }
      c.grid.lora_options.clear();
      for (std::size_t i = 0; i < lo->size(); ++i) {
        if (!(*lo)[i].is_boolean()) {
          fail(ErrorKind::kConfig, "grid.lora_options[" + std::to_string(i) + "]: expected a boolean");
        }
        c.grid.lora_options.push_back((*lo)[i].get<bool>());
      }
    }
    g.strings("scales", c.grid.scales);
    g.strings("tiers", c.grid.tiers);
    g.finish();
  }

  if (const json* e = f.get("eval")) {
    Fields g(*e, "eval");
    g.size("beam_size", c.eval.beam_size, 1);
    g.size("max_len", c.eval.max_len);
    g.finish();
  }

  if (const json* a = f.get("analysis")) {
    Fields g(*a, "analysis");
    g.size("anchor_removed", c.analysis.anchor_removed, 1);
    g.real("severe_threshold", c.analysis.severe_threshold);
    g.real("safe_zone_points", c.analysis.safe_zone_points);
    g.finish();
  }
  f.finish();

  // Cross references.
  for (const auto& [tier, _] : c.lora_by_tier) {
    checked("lora.tiers." + tier, [&] { c.tier(tier); });
  }
  for (const auto& [tier, _] : c.train_by_tier) {
    checked("train.tiers." + tier, [&] { c.tier(tier); });
  }
  for (std::size_t i = 0; i < c.grid.scales.size(); ++i) {
    checked("grid.scales[" + std::to_string(i) + "]", [&] { c.scale(c.grid.scales[i]); });
  }
  for (std::size_t i = 0; i < c.grid.tiers.size(); ++i) {
    checked("grid.tiers[" + std::to_string(i) + "]", [&] { c.tier(c.grid.tiers[i]); });
  }
  c.lm.vocab = study_vocab(c.profiles());
  checked("lm", [&] { c.lm.validate(); });
  c.projector.out_dim = c.lm.d_model;
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    fail(ErrorKind::kConfig, "config file not found: " + path.string());
  }
  return parse_config(io::read_file(path));
}

std::string to_json(const ExperimentConfig& c) {
  json tiers = json::array();
  for (const auto& t : c.data.tiers) {
    tiers.push_back({{"name", t.name}, {"profile", t.profile}, {"train", t.train},
                     {"dev", t.dev}, {"test", t.test}});
  }
  json scales = json::array();
  for (const auto& s : c.scales) {
    scales.push_back({{"name", s.name}, {"num_layers", s.encoder.num_layers},
                      {"d_model", s.encoder.d_model}, {"num_heads", s.encoder.num_heads},
                      {"ffn_mult", s.encoder.ffn_mult}});
  }
  json lora_tiers = json::object();
  for (const auto& [k, v] : c.lora_by_tier) lora_tiers[k] = lora_json(v);
  json train_tiers = json::object();
  for (const auto& [k, v] : c.train_by_tier) train_tiers[k] = recipe_json(v);
  json root = {
      {"output_dir", c.output_dir.string()},
      {"master_seed", c.master_seed},
      {"data",
       {{"seed", c.data.seed},
        {"noise_sigma", c.data.noise_sigma},
        {"coarticulation", c.data.coarticulation},
        {"frames_per_char", c.data.frames_per_char},
        {"encoder_pretrain_per_language", c.data.encoder_pretrain_per_language},
        {"lm_text_per_language", c.data.lm_text_per_language},
        {"min_frames", c.data.min_frames},
        {"max_frames", c.data.max_frames},
        {"tiers", tiers}}},
      {"scales", scales},
      {"encoder_pretrain", recipe_json(c.encoder_pretrain)},
      {"projector",
       {{"concat_factor", c.projector.concat_factor},
        {"hidden_dim", c.projector.hidden_dim},
        {"dropout_p", c.projector.dropout_p}}},
      {"lm",
       {{"d_model", c.lm.d_model},
        {"num_layers", c.lm.num_layers},
        {"num_heads", c.lm.num_heads},
        {"max_seq", c.lm.max_seq},
        {"ffn_mult", c.lm.ffn_mult},
        {"pretrain",
         {{"corruption", c.lm_pretrain.corruption},
          {"unconditional_frac", c.lm_pretrain.unconditional_frac},
          {"recipe", recipe_json(c.lm_pretrain.recipe)}}}}},
      {"lora", {{"default", lora_json(c.lora_default)}, {"tiers", lora_tiers}}},
      {"train", {{"default", recipe_json(c.train_default)}, {"tiers", train_tiers}}},
      {"grid",
       {{"depth_step", c.grid.depth_step},
        {"lora_options", c.grid.lora_options},
        {"scales", c.grid.scales},
        {"tiers", c.grid.tiers}}},
      {"eval", {{"beam_size", c.eval.beam_size}, {"max_len", c.eval.max_len}}},
      {"analysis",
       {{"anchor_removed", c.analysis.anchor_removed},
        {"severe_threshold", c.analysis.severe_threshold},
        {"safe_zone_points", c.analysis.safe_zone_points}}},
  };
  return root.dump(2) + "\n";
}

std::string config_hash(const ExperimentConfig& config) {
  return io::git_blob_hash(to_json(config));
}

}  // namespace slamprune
