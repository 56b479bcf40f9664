// Copyright 2026  The subfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "subfuse/fusion.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "json_io.hpp"
#include "subfuse/error.hpp"
#include "subfuse/extractor.hpp"
#include "subfuse/utf8.hpp"

namespace subfuse {

void FusionConfig::validate() const {
  for (const auto& [name, v] : {std::pair{"theta_same", theta_same},
                                std::pair{"theta_split", theta_split},
                                std::pair{"theta_remove", theta_remove},
                                std::pair{"theta_pad", theta_pad}}) {
    if (!(v >= 0.0 && v <= 1.0)) fail_validation(std::string(name) + " must be in [0, 1]");
  }
  if (!(w_char >= 0.0 && w_syl >= 0.0 && w_lm >= 0.0)) {
    fail_validation("fusion weights must be non-negative");
  }
  if (std::abs(w_char + w_syl + w_lm - 1.0) > 1e-6) {
    fail_validation("fusion weights w_char + w_syl + w_lm must sum to 1");
  }
  if (overlap_slack_ms < 0) fail_validation("overlap_slack_ms must be >= 0");
}

std::string asr_context(std::span<const AsrSegment> asr,
                        const SubtitleSegment& segment, int64_t slack_ms) {
  const int64_t lo = segment.start_ms - slack_ms;
  const int64_t hi = segment.end_ms + slack_ms;
  std::vector<const AsrSegment*> hits;
  for (const AsrSegment& a : asr) {
    if (a.start_ms <= hi && a.end_ms >= lo) hits.push_back(&a);
  }
  std::stable_sort(hits.begin(), hits.end(), [](const AsrSegment* a, const AsrSegment* b) {
    return a->start_ms < b->start_ms;
  });
  std::string out;
  for (const AsrSegment* a : hits) out += strip_utf8(a->text);
  return out;
}

namespace {

struct Cluster {
  size_t rep;                  // candidate index of the representative
  std::vector<size_t> members;  // candidate indices
  int support = 0;
  WindowMatch match;
};

// Candidate indices by descending support, then confidence, then position.
std::vector<size_t> by_strength(const std::vector<Candidate>& cands) {
  std::vector<size_t> order(cands.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    if (cands[a].support != cands[b].support) return cands[a].support > cands[b].support;
    return cands[a].mean_conf > cands[b].mean_conf;
  });
  return order;
}

size_t window_overlap(const WindowMatch& a, const WindowMatch& b) {
  const size_t lo = std::max(a.start, b.start);
  const size_t hi = std::min(a.start + a.length, b.start + b.length);
  return hi > lo ? hi - lo : 0;
}

}  // namespace

std::vector<SubtitleSegment> split_merged(const SubtitleSegment& segment,
                                          std::string_view context,
                                          const FusionConfig& config) {
  const auto& cands = segment.candidates;
  if (cands.size() < 2) return {segment};
  std::vector<std::u32string> cps;
  for (const Candidate& c : cands) cps.push_back(utf8_decode(c.text));

  // Each candidate joins the first stronger representative it resembles.
  std::vector<Cluster> clusters;
  for (size_t idx : by_strength(cands)) {
    auto home = std::find_if(clusters.begin(), clusters.end(), [&](const Cluster& cl) {
      return char_similarity(cps[cl.rep], cps[idx]) >= config.theta_same;
    });
    if (home == clusters.end()) {
      clusters.push_back(Cluster{idx, {idx}, cands[idx].support, {}});
    } else {
      home->members.push_back(idx);
      home->support += cands[idx].support;
    }
  }
  if (clusters.size() < 2) return {segment};

  const std::u32string ctx = utf8_decode(context);
  if (ctx.empty()) return {segment};
  std::vector<Cluster> anchored;
  for (Cluster& cl : clusters) {
    cl.match = best_window_match(cps[cl.rep], ctx);
    if (cl.match.score >= config.theta_split) anchored.push_back(cl);
  }
  if (anchored.size() < 2) return {segment};
  std::stable_sort(anchored.begin(), anchored.end(), [](const Cluster& a, const Cluster& b) {
    return a.match.start < b.match.start;
  });

  // Clusters anchored onto the same stretch of audio are spellings of one
  // subtitle, not consecutive subtitles; fold them into the stronger one.
  std::vector<Cluster> groups;
  for (Cluster& cl : anchored) {
    if (!groups.empty()) {
      Cluster& g = groups.back();
      const size_t shorter = std::min(g.match.length, cl.match.length);
      if (2 * window_overlap(g.match, cl.match) >= shorter) {
        const bool stronger = cl.support > g.support;
        g.members.insert(g.members.end(), cl.members.begin(), cl.members.end());
        if (stronger) {
          g.rep = cl.rep;
          g.match = cl.match;
        }
        g.support += cl.support;
        continue;
      }
    }
    groups.push_back(cl);
  }
  if (groups.size() < 2) return {segment};

  std::map<std::string, size_t> group_of;
  for (size_t gi = 0; gi < groups.size(); ++gi) {
    for (size_t m : groups[gi].members) group_of[cands[m].text] = gi;
  }

  const size_t k = groups.size();
  const int64_t span_start = segment.start_ms;
  const int64_t span_end = segment.end_ms;
  // boundaries[i] is where group i begins, for i in [1, k).
  std::vector<int64_t> boundaries(k, span_start);
  std::vector<int64_t> first_seen(k, -1);
  for (const FrameText& f : segment.frames) {
    auto it = group_of.find(f.text);
    if (it == group_of.end()) continue;
    int64_t& fs = first_seen[it->second];
    if (fs < 0 || f.time_ms < fs) fs = f.time_ms;
  }
  // Frame evidence only helps when display order agrees with audio order.
  const bool frames_usable =
      std::all_of(first_seen.begin(), first_seen.end(), [](int64_t t) { return t >= 0; }) &&
      std::is_sorted(first_seen.begin(), first_seen.end());
  if (frames_usable) {
    // A group begins at the first frame showing it or any later group.
    int64_t running = span_end;
    for (size_t i = k; i-- > 1;) {
      running = std::min(running, first_seen[i]);
      boundaries[i] = running;
    }
  } else {
    int total = 0;
    for (const Cluster& g : groups) total += g.support;
    int cumulative = 0;
    for (size_t i = 1; i < k; ++i) {
      cumulative += groups[i - 1].support;
      boundaries[i] = span_start + (span_end - span_start) * cumulative / std::max(total, 1);
    }
  }
  for (size_t i = 1; i < k; ++i) {
    boundaries[i] = std::clamp(boundaries[i], span_start, span_end);
    boundaries[i] = std::max(boundaries[i], boundaries[i - 1]);
  }

  std::vector<SubtitleSegment> out;
  for (size_t i = 0; i < k; ++i) {
    SubtitleSegment child;
    child.start_ms = i == 0 ? span_start : boundaries[i];
    child.end_ms = i + 1 == k ? span_end : boundaries[i + 1];
    child.text = cands[groups[i].rep].text;
    child.source = SegmentSource::kFused;
    for (size_t c = 0; c < cands.size(); ++c) {
      auto it = group_of.find(cands[c].text);
      if (it != group_of.end() && it->second == i) child.candidates.push_back(cands[c]);
    }
    for (const FrameText& f : segment.frames) {
      const bool last = i + 1 == k;
      if (f.time_ms >= child.start_ms && (f.time_ms < child.end_ms || (last && f.time_ms <= child.end_ms))) {
        child.frames.push_back(f);
      }
    }
    out.push_back(std::move(child));
  }
  return out;
}

SubtitleSegment select_candidate(const SubtitleSegment& segment,
                                 std::string_view context, const DualLm& lms,
                                 const SyllableTable& table,
                                 const FusionConfig& config) {
  const auto& cands = segment.candidates;
  if (cands.empty()) return segment;
  const std::u32string ctx = utf8_decode(context);

  const size_t n = cands.size();
  std::vector<std::u32string> cps(n);
  std::vector<double> lm(n, 0.0);
  std::vector<char> has_lm(n, 0);
  for (size_t i = 0; i < n; ++i) {
    cps[i] = utf8_decode(cands[i].text);
    if (!lms.empty() && !remove_spaces(cps[i]).empty()) {
      lm[i] = lms.score(cps[i]);
      has_lm[i] = 1;
    }
  }
  double lm_min = 0.0, lm_max = 0.0;
  bool any_lm = false;
  for (size_t i = 0; i < n; ++i) {
    if (!has_lm[i]) continue;
    lm_min = any_lm ? std::min(lm_min, lm[i]) : lm[i];
    lm_max = any_lm ? std::max(lm_max, lm[i]) : lm[i];
    any_lm = true;
  }

  std::vector<double> score(n);
  for (size_t i = 0; i < n; ++i) {
    std::u32string_view window = ctx;
    if (!ctx.empty()) {
      const WindowMatch wm = best_window_match(cps[i], ctx);
      window = std::u32string_view(ctx).substr(wm.start, wm.length);
    }
    double lm_norm = 1.0;
    if (any_lm && lm_max > lm_min) {
      lm_norm = has_lm[i] ? (lm[i] - lm_min) / (lm_max - lm_min) : 0.0;
    }
    score[i] = config.w_char * char_similarity(cps[i], window) +
               config.w_syl * syllable_similarity(cps[i], window, table) +
               config.w_lm * lm_norm;
  }

  size_t best = 0;
  for (size_t i = 1; i < n; ++i) {
    const Candidate& a = cands[i];
    const Candidate& b = cands[best];
    if (score[i] != score[best]) {
      if (score[i] > score[best]) best = i;
      continue;
    }
    if (a.support != b.support) {
      if (a.support > b.support) best = i;
      continue;
    }
    if (a.mean_conf != b.mean_conf) {
      if (a.mean_conf > b.mean_conf) best = i;
      continue;
    }
    if (cps[i] < cps[best]) best = i;
  }

  SubtitleSegment out = segment;
  if (cands[best].text != segment.text) {
    out.text = cands[best].text;
    if (out.source == SegmentSource::kVisual) out.source = SegmentSource::kFused;
  }
  return out;
}

Timeline remove_nonsubtitles(const Timeline& timeline,
                             std::span<const AsrSegment> asr,
                             const SyllableTable& table,
                             const FusionConfig& config, const DualLm* lms) {
  Timeline out{timeline.video_id, {}};
  for (const SubtitleSegment& s : timeline.segments) {
    if (s.source == SegmentSource::kAudioPad) {
      out.segments.push_back(s);
      continue;
    }
    const std::u32string text = utf8_decode(s.text);
    if (config.remove_lm_floor && lms != nullptr && !lms->empty() &&
        !remove_spaces(text).empty() && lms->score(text) < *config.remove_lm_floor) {
      continue;
    }
    const std::u32string ctx = utf8_decode(asr_context(asr, s, config.overlap_slack_ms));
    if (ctx.empty()) {
      out.segments.push_back(s);
      continue;
    }
    const WindowMatch wm = best_window_match(text, ctx);
    const std::u32string_view window = std::u32string_view(ctx).substr(wm.start, wm.length);
    const double sim = std::max(char_similarity(text, window),
                                syllable_similarity(text, window, table));
    if (sim >= config.theta_remove) out.segments.push_back(s);
  }
  return out;
}

double containment(std::u32string_view asr_text, std::u32string_view subtitle) {
  if (asr_text.empty()) return 1.0;
  return static_cast<double>(lcs_length(asr_text, subtitle)) /
         static_cast<double>(asr_text.size());
}

std::vector<SubtitleSegment> pad_missing(std::span<const AsrSegment> asr,
                                         const Timeline& visual,
                                         const FusionConfig& config) {
  std::vector<const SubtitleSegment*> shown;
  for (const SubtitleSegment& s : visual.segments) {
    if (s.source != SegmentSource::kAudioPad) shown.push_back(&s);
  }
  std::stable_sort(shown.begin(), shown.end(), [](const auto* a, const auto* b) {
    return a->start_ms < b->start_ms;
  });

  std::vector<SubtitleSegment> pads;
  for (const AsrSegment& a : asr) {
    const bool covered = std::any_of(shown.begin(), shown.end(), [&](const SubtitleSegment* s) {
      const int64_t overlap = std::min(a.end_ms, s->end_ms) - std::max(a.start_ms, s->start_ms);
      return overlap > config.overlap_slack_ms;
    });
    if (covered) continue;

    const std::u32string text = strip(utf8_decode(a.text));
    if (text.empty()) continue;
    auto next = std::find_if(shown.begin(), shown.end(), [&](const SubtitleSegment* s) {
      return s->start_ms >= a.start_ms;
    });
    if (next != shown.end() &&
        containment(text, utf8_decode((*next)->text)) >= config.theta_pad) {
      continue;
    }
    SubtitleSegment pad;
    pad.start_ms = a.start_ms;
    pad.end_ms = a.end_ms;
    pad.text = utf8_encode(text);
    pad.source = SegmentSource::kAudioPad;
    pad.candidates.push_back(Candidate{pad.text, 1, a.conf.value_or(1.0)});
    pads.push_back(std::move(pad));
  }
  return pads;
}

FusionResult fuse(const Timeline& visual, std::span<const AsrSegment> asr,
                  const DualLm& lms, const SyllableTable& table,
                  const FusionConfig& config) {
  config.validate();
  FusionResult result;
  FusionAudit& audit = result.audit;
  audit.video_id = visual.video_id;
  audit.input_segments = visual.segments.size();

  Timeline split{visual.video_id, {}};
  for (const SubtitleSegment& s : visual.segments) {
    if (s.source == SegmentSource::kAudioPad) {
      split.segments.push_back(s);
      continue;
    }
    for (SubtitleSegment& child :
         split_merged(s, asr_context(asr, s, config.overlap_slack_ms), config)) {
      split.segments.push_back(std::move(child));
    }
  }
  audit.post_split_segments = split.segments.size();
  audit.split_added = audit.post_split_segments - audit.input_segments;

  for (SubtitleSegment& s : split.segments) {
    if (s.source == SegmentSource::kAudioPad) continue;
    const std::string before = s.text;
    s = select_candidate(s, asr_context(asr, s, config.overlap_slack_ms), lms, table, config);
    if (s.text != before) ++audit.relabeled;
  }

  Timeline kept = remove_nonsubtitles(split, asr, table, config, &lms);
  audit.removed = split.segments.size() - kept.segments.size();

  std::vector<SubtitleSegment> pads = pad_missing(asr, kept, config);
  audit.padded = pads.size();

  std::vector<SubtitleSegment> merged = std::move(kept.segments);
  for (SubtitleSegment& p : pads) merged.push_back(std::move(p));
  result.timeline = Timeline{visual.video_id, sort_and_clip(std::move(merged))};
  audit.output_segments = result.timeline.segments.size();
  return result;
}

std::string write_audit_batch(std::span<const FusionAudit> audits, bool array_form) {
  auto to_json = [](const FusionAudit& a) {
    return json_io::Json{{"video_id", a.video_id},
                         {"input_segments", a.input_segments},
                         {"post_split_segments", a.post_split_segments},
                         {"split_added", a.split_added},
                         {"relabeled", a.relabeled},
                         {"removed", a.removed},
                         {"padded", a.padded},
                         {"output_segments", a.output_segments}};
  };
  if (!array_form && audits.size() == 1) return json_io::dump(to_json(audits.front()));
  json_io::Json arr = json_io::Json::array();
  for (const FusionAudit& a : audits) arr.push_back(to_json(a));
  return json_io::dump(arr);
}

}  // namespace subfuse
