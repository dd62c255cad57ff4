// Copyright 2026 The slamprune Authors
// SPDX-License-Identifier: Apache-2.0

#include "slamprune/analysis.hpp"

#include <algorithm>
#include <cstdio>
#include <set>

#include "slamprune/errors.hpp"
#include "slamprune/io.hpp"

namespace slamprune {

namespace {

using ScaleLang = std::pair<std::string, std::string>;

std::vector<ScaleLang> scale_languages(const std::vector<ExperimentCell>& cells) {
  std::vector<ScaleLang> out;
  for (const auto& c : cells) {
    ScaleLang key{c.spec.scale, c.spec.language};
    if (std::find(out.begin(), out.end(), key) == out.end()) out.push_back(key);
  }
  return out;
}

std::vector<std::string> scales_of(const std::vector<ExperimentCell>& cells) {
  std::vector<std::string> out;
  for (const auto& c : cells) {
    if (std::find(out.begin(), out.end(), c.spec.scale) == out.end()) out.push_back(c.spec.scale);
  }
  return out;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

std::optional<CompensationDelta> try_delta(const std::vector<ExperimentCell>& cells,
                                           const std::string& scale, const std::string& lang,
                                           std::size_t full, std::size_t anchor) {
  if (anchor >= full) return std::nullopt;
  const auto* fb = find_cell(cells, scale, lang, full, false);
  const auto* fl = find_cell(cells, scale, lang, full, true);
  const auto* pb = find_cell(cells, scale, lang, full - anchor, false);
  const auto* pl = find_cell(cells, scale, lang, full - anchor, true);
  if (!fb || !fl || !pb || !pl) return std::nullopt;
  return CompensationDelta{scale, lang, 100.0 * (fb->wer - fl->wer), 100.0 * (pb->wer - pl->wer)};
}

const UtteranceScore* find_utt(const ExperimentCell& c, const std::string& id) {
  for (const auto& u : c.utterances) {
    if (u.id == id) return &u;
  }
  return nullptr;
}

void check_paired(const ExperimentCell& a, const ExperimentCell& b) {
  std::set<std::string> ia, ib;
  for (const auto& u : a.utterances) ia.insert(u.id);
  for (const auto& u : b.utterances) ib.insert(u.id);
  if (ia != ib || ia.size() != a.utterances.size()) {
    fail(ErrorKind::kPairing, "cells do not share the same utterance ids");
  }
}

}  // namespace

const ExperimentCell* find_cell(const std::vector<ExperimentCell>& cells,
                                const std::string& scale, const std::string& language,
                                std::size_t layers_kept, bool lora) {
  for (const auto& c : cells) {
    if (!c.failed && c.spec.scale == scale && c.spec.language == language &&
        c.spec.layers_kept == layers_kept && c.spec.lora == lora) {
      return &c;
    }
  }
  return nullptr;
}

std::map<std::string, std::size_t> full_depths(const std::vector<ExperimentCell>& cells) {
  std::map<std::string, std::size_t> out;
  for (const auto& c : cells) {
    auto& d = out[c.spec.scale];
    d = std::max(d, c.spec.layers_kept);
  }
  return out;
}

std::vector<CompensationDelta> compensation_delta(const std::vector<ExperimentCell>& cells,
                                                  std::size_t anchor_removed) {
  const auto full = full_depths(cells);
  std::vector<CompensationDelta> out;
  for (const auto& [scale, lang] : scale_languages(cells)) {
    auto d = try_delta(cells, scale, lang, full.at(scale), anchor_removed);
    if (!d) {
      fail(ErrorKind::kIncompleteGrid, "compensation_delta: " + scale + "/" + lang +
                                           " lacks a full or pruned base/+LoRA cell");
    }
    out.push_back(*d);
  }
  return out;
}

DegradationReport utterance_degradation(const ExperimentCell& baseline,
                                        const ExperimentCell& variant) {
  check_paired(baseline, variant);
  DegradationReport r;
  r.utterances = baseline.utterances.size();
  for (const auto& u : baseline.utterances) {
    if (find_utt(variant, u.id)->wer() > u.wer()) ++r.degraded;
  }
  if (r.utterances > 0) {
    r.pct_degraded = 100.0 * static_cast<double>(r.degraded) / static_cast<double>(r.utterances);
    r.pct_preserved_or_improved = 100.0 - r.pct_degraded;
  }
  return r;
}

WordErrorChange word_error_change(const ExperimentCell& base, const ExperimentCell& lora) {
  auto change = [](std::size_t b, std::size_t l) -> std::optional<double> {
    if (b == 0) return std::nullopt;
    return 100.0 * (static_cast<double>(l) - static_cast<double>(b)) / static_cast<double>(b);
  };
  const auto& b = base.totals;
  const auto& l = lora.totals;
  return {change(b.substitutions, l.substitutions), change(b.insertions, l.insertions),
          change(b.deletions, l.deletions), change(b.errors(), l.errors())};
}

std::vector<RecoveryExample> severe_recovery_filter(const ExperimentCell& base,
                                                    const ExperimentCell& lora,
                                                    double severe_threshold) {
  check_paired(base, lora);
  std::vector<RecoveryExample> out;
  for (const auto& u : base.utterances) {
    const UtteranceScore* v = find_utt(lora, u.id);
    if (u.wer() > severe_threshold && v->counts.errors() == 0) {
      out.push_back({u.id, u.reference, u.hypothesis, v->hypothesis, u.wer(), v->wer()});
    }
  }
  return out;
}

std::vector<SweetSpot> sweet_spot(const std::vector<ExperimentCell>& cells,
                                  const AccountingFn& accounting) {
  const auto full = full_depths(cells);
  const auto pairs = scale_languages(cells);
  std::vector<SweetSpot> out;
  for (const auto& scale : scales_of(cells)) {
    const std::size_t depth = full.at(scale);
    std::vector<std::string> langs;
    for (const auto& [s, l] : pairs) {
      if (s == scale) langs.push_back(l);
    }
    std::set<std::size_t> depths;
    for (const auto& c : cells) {
      if (c.spec.scale == scale && c.spec.lora && c.spec.layers_kept < depth) {
        depths.insert(c.spec.layers_kept);
      }
    }
    SweetSpot spot;
    spot.scale = scale;
    for (std::size_t kept : depths) {  // ascending: deepest pruning first
      bool ok = true;
      std::map<std::string, double> wers;
      for (const auto& lang : langs) {
        const auto* base = find_cell(cells, scale, lang, depth, false);
        const auto* cand = find_cell(cells, scale, lang, kept, true);
        if (!base || !cand || cand->wer > base->wer) {
          ok = false;
          break;
        }
        wers[lang] = cand->wer;
      }
      if (!ok) continue;
      const ScaleAccounting acc = accounting(scale);
      spot.layers_kept = kept;
      spot.net_delta =
          -static_cast<std::int64_t>(depth - kept) * acc.layer_params + acc.lora_overhead;
      spot.params = acc.full_params + spot.net_delta;
      spot.wers = std::move(wers);
      break;
    }
    out.push_back(std::move(spot));
  }
  return out;
}

std::vector<SafeZone> safe_zone(const std::vector<ExperimentCell>& cells,
                                double threshold_points) {
  const auto full = full_depths(cells);
  std::vector<SafeZone> out;
  for (const auto& [scale, lang] : scale_languages(cells)) {
    const std::size_t depth = full.at(scale);
    const auto* ref = find_cell(cells, scale, lang, depth, false);
    if (!ref) continue;
    std::set<std::size_t, std::greater<>> depths;
    for (const auto& c : cells) {
      if (c.spec.scale == scale && c.spec.language == lang && !c.spec.lora) {
        depths.insert(c.spec.layers_kept);
      }
    }
    SafeZone z{scale, lang, depth, 0};
    for (std::size_t kept : depths) {
      const auto* c = find_cell(cells, scale, lang, kept, false);
      if (!c || 100.0 * (c->wer - ref->wer) > threshold_points) break;
      z.min_layers_kept = kept;
    }
    z.layers_removable = depth - z.min_layers_kept;
    out.push_back(z);
  }
  return out;
}

void write_reports(const std::filesystem::path& dir, const std::vector<ExperimentCell>& cells,
                   const AccountingFn& accounting, const AnalysisOptions& options) {
  const auto full = full_depths(cells);
  const auto pairs = scale_languages(cells);

  std::string t2 = "scale,language,layers_kept,base_wer,lora_wer\n";
  for (const auto& [scale, lang] : pairs) {
    std::set<std::size_t, std::greater<>> depths;
    for (const auto& c : cells) {
      if (c.spec.scale == scale && c.spec.language == lang) depths.insert(c.spec.layers_kept);
    }
    for (std::size_t kept : depths) {
      auto cell_text = [&](bool lora) -> std::string {
        for (const auto& c : cells) {
          if (c.spec.scale == scale && c.spec.language == lang &&
              c.spec.layers_kept == kept && c.spec.lora == lora) {
            return c.failed ? "failed" : fmt("%.2f", 100.0 * c.wer);
          }
        }
        return "";
      };
      t2 += scale + "," + lang + "," + std::to_string(kept) + "," + cell_text(false) + "," +
            cell_text(true) + "\n";
    }
  }
  io::write_file_atomic(dir / "table2_wer.csv", t2);

  std::vector<std::string> langs;
  for (const auto& [s, l] : pairs) {
    if (std::find(langs.begin(), langs.end(), l) == langs.end()) langs.push_back(l);
  }
  std::string t3 = "scale,configuration,layers_kept,lora,params,net_delta";
  for (const auto& l : langs) t3 += ",wer_" + l;
  t3 += "\n";
  const auto spots = sweet_spot(cells, accounting);
  for (const auto& spot : spots) {
    const std::size_t depth = full.at(spot.scale);
    const ScaleAccounting acc = accounting(spot.scale);
    auto row = [&](const std::string& label, std::size_t kept, bool lora, std::int64_t params,
                   std::int64_t delta) {
      t3 += spot.scale + "," + label + "," + std::to_string(kept) + "," + (lora ? "1" : "0") +
            "," + std::to_string(params) + "," + std::to_string(delta);
      for (const auto& l : langs) {
        const auto* c = find_cell(cells, spot.scale, l, kept, lora);
        t3 += "," + (c ? fmt("%.2f", 100.0 * c->wer) : std::string());
      }
      t3 += "\n";
    };
    const std::string L = std::to_string(depth) + "L";
    row(L + " Baseline", depth, false, acc.full_params, 0);
    row(L + " + LoRA", depth, true, acc.full_params + acc.lora_overhead, acc.lora_overhead);
    if (spot.layers_kept) {
      row(std::to_string(*spot.layers_kept) + "L + LoRA (sweet spot)", *spot.layers_kept, true,
          spot.params, spot.net_delta);
    } else {
      t3 += spot.scale + ",none,,,,\n";
    }
  }
  io::write_file_atomic(dir / "table3_sweetspot.csv", t3);

  std::string t4 = "scale,language,base_degraded_pct,lora_degraded_pct,delta_recovery\n";
  std::string t6 = "scale,language,sub_pct,ins_pct,del_pct,tot_pct\n";
  std::string t8;
  for (const auto& [scale, lang] : pairs) {
    const std::size_t depth = full.at(scale);
    if (options.anchor_removed >= depth) continue;
    const std::size_t kept = depth - options.anchor_removed;
    const auto* fb = find_cell(cells, scale, lang, depth, false);
    const auto* pb = find_cell(cells, scale, lang, kept, false);
    const auto* pl = find_cell(cells, scale, lang, kept, true);
    if (!fb || !pb || !pl || pb->utterances.empty()) continue;
    const auto base = utterance_degradation(*fb, *pb);
    const auto lora = utterance_degradation(*fb, *pl);
    t4 += scale + "," + lang + "," + fmt("%.1f", base.pct_degraded) + "," +
          fmt("%.1f", lora.pct_degraded) + "," +
          fmt("%.1f", lora.pct_degraded - base.pct_degraded) + "\n";
    const auto ch = word_error_change(*pb, *pl);
    auto opt = [](const std::optional<double>& v) { return v ? fmt("%+.1f", *v) : std::string(); };
    t6 += scale + "," + lang + "," + opt(ch.substitutions) + "," + opt(ch.insertions) + "," +
          opt(ch.deletions) + "," + opt(ch.total) + "\n";
    for (const auto& ex : severe_recovery_filter(*pb, *pl, options.severe_threshold)) {
      t8 += scale + " " + lang + " " + ex.utterance_id + " (pruned WER " +
            fmt("%.2f", ex.base_wer) + ")\n  reference: " + ex.reference +
            "\n  pruned:    " + ex.base_hypothesis + "\n  +lora:     " + ex.lora_hypothesis +
            "\n";
    }
  }
  io::write_file_atomic(dir / "table4_degradation.csv", t4);
  io::write_file_atomic(dir / "table6_worderrors.csv", t6);
  io::write_file_atomic(dir / "table8_examples.txt", t8);

  std::string t5 = "scale,language,full_delta,pruned_delta,larger\n";
  for (const auto& [scale, lang] : pairs) {
    const auto d = try_delta(cells, scale, lang, full.at(scale), options.anchor_removed);
    if (!d) continue;
    t5 += scale + "," + lang + "," + fmt("%.2f", d->full_delta) + "," +
          fmt("%.2f", d->pruned_delta) + "," +
          (d->pruned_delta > d->full_delta ? "pruned" : "full") + "\n";
  }
  io::write_file_atomic(dir / "table5_deltas.csv", t5);

  std::string sz = "scale,language,threshold_points,min_layers_kept,layers_removable\n";
  for (const auto& z : safe_zone(cells, options.safe_zone_points)) {
    sz += z.scale + "," + z.language + "," + fmt("%.2f", options.safe_zone_points) + "," +
          std::to_string(z.min_layers_kept) + "," + std::to_string(z.layers_removable) + "\n";
  }
  io::write_file_atomic(dir / "safe_zone.csv", sz);
}

}  // namespace slamprune
