// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/synth_data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "slamprune/io.hpp"

namespace slamprune {

namespace {

constexpr std::uint64_t kTemplateSeed = 0x5eed7e3a91ull;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

// Functional words shared by every built-in language (kept under 10% of
// each lexicon).
const std::vector<std::string> kSharedWords{"en", "de", "to", "i"};

struct Phonology {
  std::string name;
  std::vector<std::string> onsets;
  std::vector<std::string> vowels;
  std::vector<std::string> codas;
  std::size_t lexicon_size;
  std::uint64_t seed;
  double clitic_rate;  // fraction of words ending in 's (apostrophe inside)
};

std::vector<std::string> make_lexicon(const Phonology& ph, std::set<std::string>& taken) {
  nn::Rng rng(ph.seed);
  std::uniform_int_distribution<int> syllables(1, 3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pick = [&](const std::vector<std::string>& from) {
    std::uniform_int_distribution<std::size_t> d(0, from.size() - 1);
    return from[d(rng)];
  };
  std::vector<std::string> lex = kSharedWords;
  while (lex.size() < ph.lexicon_size) {
    std::string w;
    const int n = syllables(rng);
    for (int s = 0; s < n; ++s) {
      w += pick(ph.onsets) + pick(ph.vowels);
      if (u(rng) < 0.35) w += pick(ph.codas);
    }
    if (ph.clitic_rate > 0.0 && u(rng) < ph.clitic_rate) w += "'s";
    const std::size_t len = utf8_chars(w).size();
    if (len < 2 || len > 8) continue;
    if (taken.count(w)) continue;
    taken.insert(w);
    lex.push_back(w);
  }
  return lex;
}

std::vector<std::string> split_chars(const std::string& letters) { return utf8_chars(letters); }

struct Grammar {
  std::vector<double> start_weights;
  std::vector<std::vector<std::size_t>> successors;
  std::vector<double> successor_weights;
};

Grammar build_grammar(const LanguageProfile& p) {
  nn::Rng rng(p.grammar_seed ^ 0x9e3779b97f4a7c15ull);
  Grammar g;
  const std::size_t n = p.lexicon.size();
  std::uniform_int_distribution<std::size_t> any(0, n - 1);
  std::uniform_real_distribution<double> u(0.5, 1.5);
  g.start_weights.resize(n);
  for (double& w : g.start_weights) w = u(rng);
  g.successors.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::set<std::size_t> seen;
    while (g.successors[i].size() < std::min(p.branching, n)) {
      const std::size_t s = any(rng);
      if (seen.insert(s).second) g.successors[i].push_back(s);
    }
  }
  // Zipf-like preference among the admissible successors.
  for (std::size_t k = 0; k < p.branching; ++k) {
    g.successor_weights.push_back(1.0 / static_cast<double>(k + 1));
  }
  return g;
}

}  // namespace

NormalizationProfile LanguageProfile::normalization() const {
  NormalizationProfile np;
  for (const auto& ch : alphabet) {
    const auto cps = utf8_decode(ch);
    if (cps.size() == 1 && cps[0] > 0x7F) np.extra_letters.push_back(cps[0]);
  }
  return np;
}

void LanguageProfile::validate() const {
  if (lexicon.empty()) fail(ErrorKind::kConfig, "profile " + name + ": empty lexicon");
  if (frames_per_char < 1) fail(ErrorKind::kConfig, "profile " + name + ": frames_per_char must be >= 1");
  if (noise_sigma < 0.0) fail(ErrorKind::kConfig, "profile " + name + ": noise_sigma must be >= 0");
  if (min_words < 1 || max_words < min_words) {
    fail(ErrorKind::kConfig, "profile " + name + ": invalid word-count range");
  }
  const std::set<std::string> letters(alphabet.begin(), alphabet.end());
  for (const auto& w : lexicon) {
    for (const auto& c : utf8_chars(w)) {
      if (c != "'" && !letters.count(c)) {
        fail(ErrorKind::kConfig, "profile " + name + ": word '" + w + "' uses '" + c +
                                     "' outside the alphabet");
      }
    }
  }
}

std::vector<LanguageProfile> builtin_profiles() {
  const std::vector<Phonology> phon{
      {"da",
       split_chars("bdfghjklmnprstv"),
       split_chars("aeiouyæøå"),
       split_chars("dgklmnrst"),
       52, 101, 0.0},
      {"nl",
       split_chars("bdfghjklmnprstvwz"),
       {"a", "e", "i", "o", "u", "aa", "ee", "oo", "ij", "ui"},
       split_chars("knrstl"),
       52, 202, 0.0},
      {"en",
       split_chars("bcdfghklmnprstw"),
       split_chars("aeiouy"),
       split_chars("dklmnrst"),
       52, 303, 0.08},
  };
  std::set<std::string> taken(kSharedWords.begin(), kSharedWords.end());
  std::vector<LanguageProfile> out;
  for (const auto& ph : phon) {
    LanguageProfile p;
    p.name = ph.name;
    p.lexicon = make_lexicon(ph, taken);
    std::set<std::string> letters;
    for (const auto& w : p.lexicon) {
      for (const auto& c : utf8_chars(w)) {
        if (c != "'") letters.insert(c);
      }
    }
    for (const auto& v : ph.vowels) {
      for (const auto& c : utf8_chars(v)) letters.insert(c);
    }
    p.alphabet.assign(letters.begin(), letters.end());
    p.grammar_seed = ph.seed * 7919;
    out.push_back(std::move(p));
  }
  return out;
}

LanguageProfile builtin_profile(std::string_view name) {
  for (auto& p : builtin_profiles()) {
    if (p.name == name) return p;
  }
  fail(ErrorKind::kConfig, "unknown language profile '" + std::string(name) + "'");
}

std::vector<TierSpec> default_tiers() {
  return {{"low", "da", 250, 100, 150},
          {"medium", "nl", 3200, 300, 300},
          {"high", "en", 6000, 300, 300}};
}

std::vector<double> char_template(std::string_view ch, std::size_t dim) {
  nn::Rng rng(fnv1a(ch) ^ kTemplateSeed);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> t(dim);
  for (double& x : t) x = n(rng);
  return t;
}

std::string sample_transcript(const LanguageProfile& profile, nn::Rng& rng) {
  const Grammar g = build_grammar(profile);
  std::uniform_int_distribution<std::size_t> count(profile.min_words, profile.max_words);
  const std::size_t n = count(rng);
  std::discrete_distribution<std::size_t> start(g.start_weights.begin(), g.start_weights.end());
  std::vector<std::string> words;
  std::size_t w = start(rng);
  words.push_back(profile.lexicon[w]);
  for (std::size_t i = 1; i < n; ++i) {
    const auto& succ = g.successors[w];
    std::discrete_distribution<std::size_t> next(g.successor_weights.begin(),
                                                 g.successor_weights.begin() + succ.size());
    w = succ[next(rng)];
    words.push_back(profile.lexicon[w]);
  }
  return join_words(words);
}

Utterance render_utterance(const LanguageProfile& profile, std::string id,
                           std::string transcript, nn::Rng& rng) {
  const auto chars = utf8_chars(transcript);
  const std::size_t fpc = profile.frames_per_char;
  const std::size_t t_len = chars.size() * fpc;
  std::map<std::string, std::vector<double>> cache;
  auto tmpl = [&](const std::string& c) -> const std::vector<double>& {
    auto it = cache.find(c);
    if (it == cache.end()) it = cache.emplace(c, char_template(c)).first;
    return it->second;
  };
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<double> v(t_len * kFeatureDim);
  const double beta = profile.coarticulation;
  for (std::size_t i = 0; i < chars.size(); ++i) {
    const auto& self = tmpl(chars[i]);
    const auto& left = tmpl(i > 0 ? chars[i - 1] : chars[i]);
    const auto& right = tmpl(i + 1 < chars.size() ? chars[i + 1] : chars[i]);
    for (std::size_t f = 0; f < fpc; ++f) {
      double* row = &v[(i * fpc + f) * kFeatureDim];
      for (std::size_t d = 0; d < kFeatureDim; ++d) {
        const double clean =
            (1.0 - beta) * self[d] + 0.5 * beta * (left[d] + right[d]);
        const double x = profile.noise_sigma > 0.0
                             ? clean + profile.noise_sigma * noise(rng)
                             : clean;
        row[d] = static_cast<double>(static_cast<float>(x));
      }
    }
  }
  Utterance u;
  u.id = std::move(id);
  u.language = profile.name;
  u.transcript = std::move(transcript);
  u.frames = nn::Tensor::from({t_len, kFeatureDim}, std::move(v));
  u.frames_per_char = fpc;
  return u;
}

CorpusSplits generate_corpus(const LanguageProfile& profile, const TierSpec& tier,
                             std::uint64_t seed) {
  profile.validate();
  if (tier.train < 1 || tier.dev < 1 || tier.test < 1) {
    fail(ErrorKind::kConfig, "tier " + tier.name + ": split sizes must be >= 1");
  }
  CorpusSplits out;
  const std::pair<const char*, std::size_t> splits[] = {
      {"train", tier.train}, {"dev", tier.dev}, {"test", tier.test}};
  std::uint64_t split_index = 0;
  for (const auto& [split, count] : splits) {
    nn::Rng rng(seed * 0x100000001b3ull + fnv1a(profile.name) + split_index++);
    std::vector<Utterance>& dst = std::string(split) == "train" ? out.train
                                  : std::string(split) == "dev" ? out.dev
                                                                : out.test;
    for (std::size_t i = 0; i < count; ++i) {
      std::string text = sample_transcript(profile, rng);
      std::ostringstream id;
      id << profile.name << "-" << split << "-" << i;
      dst.push_back(render_utterance(profile, id.str(), std::move(text), rng));
    }
  }
  return out;
}

std::vector<Utterance> duration_filter(const std::vector<Utterance>& utterances,
                                       std::size_t min_frames, std::size_t max_frames) {
  if (!(min_frames < max_frames)) {
    fail(ErrorKind::kConfig, "duration_filter: min_frames must be < max_frames");
  }
  std::vector<Utterance> out;
  for (const auto& u : utterances) {
    const std::size_t t = u.duration();
    if (t >= min_frames && t <= max_frames) out.push_back(u);
  }
  if (out.empty()) fail(ErrorKind::kEmptyCorpus, "duration_filter removed every utterance");
  return out;
}

std::vector<std::size_t> frame_char_positions(const Utterance& u) {
  std::vector<std::size_t> pos(u.duration());
  for (std::size_t f = 0; f < pos.size(); ++f) pos[f] = f / u.frames_per_char;
  return pos;
}

void write_frames(const std::filesystem::path& path, const nn::Tensor& frames) {
  std::string bytes;
  io::put_u32(bytes, static_cast<std::uint32_t>(frames.rows()));
  io::put_u32(bytes, static_cast<std::uint32_t>(frames.cols()));
  for (double v : frames.values()) io::put_f32(bytes, static_cast<float>(v));
  io::write_file_atomic(path, bytes);
}

nn::Tensor read_frames(const std::filesystem::path& path) {
  const std::string bytes = io::read_file(path);
  io::Reader r(bytes);
  const std::size_t t = r.u32();
  const std::size_t d = r.u32();
  std::vector<double> v(t * d);
  for (double& x : v) x = r.f32();
  if (!r.done()) fail(ErrorKind::kIo, "trailing bytes in " + path.string());
  return nn::Tensor::from({t, d}, std::move(v));
}

void write_split(const std::filesystem::path& dir, const std::string& split,
                 const std::vector<Utterance>& utterances) {
  std::string tsv;
  for (const auto& u : utterances) {
    const std::string rel = "frames/" + u.id + ".bin";
    write_frames(dir / rel, u.frames);
    tsv += u.id + "\t" + u.language + "\t" + u.transcript + "\t" + rel + "\n";
  }
  io::write_file_atomic(dir / (split + ".tsv"), tsv);
}

std::vector<Utterance> read_split(const std::filesystem::path& dir,
                                  const std::string& split,
                                  std::size_t frames_per_char) {
  std::istringstream in(io::read_file(dir / (split + ".tsv")));
  std::vector<Utterance> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const std::size_t tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 4) fail(ErrorKind::kData, "malformed corpus line: " + line);
    Utterance u;
    u.id = fields[0];
    u.language = fields[1];
    u.transcript = fields[2];
    u.frames = read_frames(dir / fields[3]);
    u.frames_per_char = frames_per_char;
    out.push_back(std::move(u));
  }
  return out;
}

}  // namespace slamprune
