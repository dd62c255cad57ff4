// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/asr.hpp"

#include <cstdio>

#include "slamprune/text.hpp"

namespace slamprune {

ParamList AsrBundle::trainable() const {
  ParamList out;
  append_prefixed(out, "projector.", projector.named());
  if (lora) append_prefixed(out, "lora.", lora->named());
  return out;
}

ParamList AsrBundle::frozen() const {
  ParamList out;
  append_prefixed(out, "encoder.", encoder.named());
  append_prefixed(out, "lm.", lm.named());
  return out;
}

AsrBundle make_bundle(const EncoderConfig& encoder_config,
                      const EncoderWeights& full_encoder, std::size_t keep_layers,
                      const ProjectorConfig& projector_config, const LmConfig& lm_config,
                      const LmWeights& lm, const std::optional<LoraConfig>& lora,
                      std::uint64_t seed) {
  AsrBundle b;
  b.encoder_config = encoder_config;
  b.prune = PruneSpec{keep_layers};
  b.encoder = build_pruned_weights(full_encoder, b.prune);
  b.projector_config = projector_config;
  b.projector = init_projector(projector_config, seed);
  b.lm_config = lm_config;
  b.lm = lm;
  if (lora) b.lora = init_lora(lm_config, *lora, seed ^ 0x10ba10ba10ba10baull);
  return b;
}

namespace {

LmRun make_run(const AsrBundle& b, bool train, nn::Rng* rng) {
  return LmRun{b.lm_config, b.lm, b.lora ? &*b.lora : nullptr, train, rng};
}

nn::Tensor encode_frozen(const AsrBundle& b, const Utterance& u) {
  return encode(b.encoder_config, b.encoder, u.frames, b.prune);
}

}  // namespace

std::vector<LossRecord> train_asr(AsrBundle& bundle, const std::vector<Utterance>& corpus,
                                  const TrainRecipe& recipe) {
  if (corpus.empty()) fail(ErrorKind::kData, "train_asr: empty corpus");
  std::vector<nn::Tensor> cached;
  std::vector<std::vector<int>> targets;
  cached.reserve(corpus.size());
  targets.reserve(corpus.size());
  for (const auto& u : corpus) {
    cached.push_back(encode_frozen(bundle, u));
    targets.push_back(bundle.lm_config.vocab.encode(u.transcript));
  }
  const ParamList trainable = bundle.trainable();
  set_trainable(trainable, true);
  auto trace = run_training(trainable, corpus.size(), recipe,
                            [&](std::size_t ex, nn::Rng& rng) {
                              nn::Tensor prefix = project(bundle.projector_config,
                                                          bundle.projector, cached[ex],
                                                          true, &rng);
                              return forward_asr(make_run(bundle, true, &rng), prefix,
                                                 targets[ex])
                                  .loss;
                            });
  set_trainable(trainable, false);
  return trace;
}

double asr_loss(const AsrBundle& bundle, const Utterance& utterance) {
  nn::Tensor prefix = project(bundle.projector_config, bundle.projector,
                              encode_frozen(bundle, utterance), false);
  return forward_asr(make_run(bundle, false, nullptr), prefix,
                     bundle.lm_config.vocab.encode(utterance.transcript))
      .loss.item();
}

Hypothesis beam_decode(const AsrBundle& bundle, const Utterance& utterance,
                       std::size_t beam_size, std::size_t max_len) {
  nn::Tensor prefix = project(bundle.projector_config, bundle.projector,
                              encode_frozen(bundle, utterance), false);
  const LmRun run = make_run(bundle, false, nullptr);
  const std::size_t room = bundle.lm_config.max_seq - prefix.rows() - 1;
  BeamOptions opts;
  opts.beam_size = beam_size;
  opts.eos = bundle.lm_config.vocab.eos();
  opts.max_len = std::min(max_len == 0 ? room : max_len, room + 1);
  const int bos = bundle.lm_config.vocab.bos();
  auto scorer = [&](std::span<const int> generated) {
    auto lp = next_token_log_probs(run, prefix, generated);
    lp[bos] = -std::numeric_limits<double>::infinity();
    return lp;
  };
  const BeamResult r = beam_search(scorer, opts);
  Hypothesis h;
  h.utterance_id = utterance.id;
  h.tokens = r.tokens;
  h.text = normalize(bundle.lm_config.vocab.decode(r.tokens));
  h.score = r.score;
  h.truncated = r.truncated;
  return h;
}

EncoderWeights pretrain_encoder(const EncoderConfig& config, const Vocab& vocab,
                                const std::vector<Utterance>& corpus,
                                const EncoderPretrainOptions& options,
                                std::uint64_t init_seed, std::vector<LossRecord>* trace) {
  if (corpus.empty()) fail(ErrorKind::kData, "pretrain_encoder: empty corpus");
  EncoderWeights w = init_encoder(config, init_seed);
  nn::Rng head_rng(init_seed ^ 0x4ead4ead4ead4eadull);
  nn::Tensor head_w = nn::glorot_uniform(vocab.size(), config.d_model, head_rng);
  nn::Tensor head_b = nn::Tensor::zeros({vocab.size()}, true);
  std::vector<std::vector<int>> labels;
  labels.reserve(corpus.size());
  for (const auto& u : corpus) {
    const auto chars = utf8_chars(u.transcript);
    std::vector<int> frame_labels;
    for (std::size_t pos : frame_char_positions(u)) frame_labels.push_back(vocab.id(chars[pos]));
    labels.push_back(std::move(frame_labels));
  }
  ParamList params = w.named();
  set_trainable(params, true);
  params.push_back({"head.w", head_w});
  params.push_back({"head.b", head_b});
  auto t = run_training(params, corpus.size(), options.recipe,
                        [&](std::size_t ex, nn::Rng&) {
                          const auto& u = corpus[ex];
                          nn::Tensor out =
                              encode(config, w, u.frames, PruneSpec{config.num_layers});
                          nn::Tensor logits = nn::linear(out, head_w, head_b);
                          const std::vector<bool> mask(labels[ex].size(), true);
                          return nn::cross_entropy(logits, labels[ex], mask);
                        });
  if (trace) *trace = std::move(t);
  set_trainable(w.named(), false);
  zero_grads(w.named());
  return w;
}

std::string loss_trace_csv(const std::vector<LossRecord>& trace) {
  std::string out = "step,lr,loss\n";
  char buf[96];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof buf, "%zu,%.9g,%.9f\n", r.step, r.lr, r.loss);
    out += buf;
  }
  return out;
}

}  // namespace slamprune
