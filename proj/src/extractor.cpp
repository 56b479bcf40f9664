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

#include "subfuse/extractor.hpp"

#include <algorithm>
#include <map>
#include <tuple>

#include "subfuse/error.hpp"
#include "subfuse/textsim.hpp"
#include "subfuse/utf8.hpp"

namespace subfuse {

void ExtractorParams::validate() const {
  if (!(image_score_threshold >= 0.0 && image_score_threshold <= 1.0)) {
    fail_validation("image_score_threshold must be in [0, 1]");
  }
  if (!(merge_similarity_threshold >= 0.0 && merge_similarity_threshold <= 1.0)) {
    fail_validation("merge_similarity_threshold must be in [0, 1]");
  }
  if (min_track_frames < 0) fail_validation("min_track_frames must be >= 0");
  if (!(keep_threshold >= 0.0 && keep_threshold <= 1.0)) {
    fail_validation("keep_threshold must be in [0, 1]");
  }
  if (frame_width < 0 || frame_height < 0) fail_validation("frame size must be >= 0");
}

double default_image_score(const FrameDetection& d, double /*frame_w*/,
                           double frame_h) {
  const Envelope env = d.quad.envelope();
  const double ratio = env.width() / env.height();
  const double aspect = ratio >= 2.0 ? 1.0 : ratio / 2.0;
  const double vertical = env.center_y() >= 0.6 * frame_h ? 1.0 : 0.2;
  return std::clamp(aspect * vertical * d.conf, 0.0, 1.0);
}

namespace {

struct TextTally {
  int count = 0;
  double conf_sum = 0.0;
  size_t first = 0;
};

// Majority vote over (text, conf) observations in order.
class Ballot {
 public:
  void add(const std::string& text, double conf) {
    auto [it, inserted] = tally_.try_emplace(text);
    if (inserted) {
      it->second.first = order_.size();
      order_.push_back(text);
    }
    ++it->second.count;
    it->second.conf_sum += conf;
  }

  const std::string& winner() const {
    const std::string* best = nullptr;
    const TextTally* bt = nullptr;
    for (const std::string& text : order_) {
      const TextTally& t = tally_.at(text);
      if (best == nullptr || beats(t, *bt)) {
        best = &text;
        bt = &t;
      }
    }
    return *best;
  }

  std::vector<Candidate> candidates() const {
    std::vector<Candidate> out;
    for (const std::string& text : order_) {
      const TextTally& t = tally_.at(text);
      out.push_back(Candidate{text, t.count, t.conf_sum / t.count});
    }
    return out;
  }

  bool empty() const { return order_.empty(); }

 private:
  static bool beats(const TextTally& a, const TextTally& b) {
    if (a.count != b.count) return a.count > b.count;
    const double ma = a.conf_sum / a.count;
    const double mb = b.conf_sum / b.count;
    if (ma != mb) return ma > mb;
    return a.first < b.first;
  }

  std::map<std::string, TextTally> tally_;
  std::vector<std::string> order_;
};

}  // namespace

TrackTextClassifier make_default_text_classifier(int min_track_frames) {
  return [min_track_frames](std::span<const std::string> texts) -> double {
    if (texts.size() < static_cast<size_t>(std::max(min_track_frames, 0)) || texts.empty()) {
      return 0.0;
    }
    Ballot ballot;
    for (const std::string& t : texts) ballot.add(t, 0.0);
    return strip(utf8_decode(ballot.winner())).size() >= 2 ? 1.0 : 0.0;
  };
}

std::vector<FrameGroup> filter_detections(std::span<const FrameGroup> frames,
                                          const DetectionScorer& scorer,
                                          double frame_w, double frame_h,
                                          double threshold) {
  std::vector<FrameGroup> out;
  out.reserve(frames.size());
  for (const FrameGroup& g : frames) {
    FrameGroup kept{g.frame_index, g.time_ms, {}};
    for (const FrameDetection& d : g.detections) {
      if (scorer(d, frame_w, frame_h) >= threshold) kept.detections.push_back(d);
    }
    out.push_back(std::move(kept));
  }
  return out;
}

std::string majority_text(const TextTrack& track) {
  Ballot ballot;
  for (const TrackEntry& e : track.entries) ballot.add(e.detection.text, e.detection.conf);
  return ballot.empty() ? std::string() : ballot.winner();
}

std::vector<SubtitleSegment> merge_track_text(const TextTrack& track,
                                              double merge_similarity_threshold) {
  std::vector<SubtitleSegment> out;
  Ballot ballot;
  SubtitleSegment current;
  std::u32string rep;

  auto flush = [&] {
    if (ballot.empty()) return;
    current.text = ballot.winner();
    current.candidates = ballot.candidates();
    current.source = SegmentSource::kVisual;
    out.push_back(std::move(current));
    current = SubtitleSegment{};
    ballot = Ballot{};
  };

  for (const TrackEntry& e : track.entries) {
    const std::u32string text = utf8_decode(e.detection.text);
    if (!ballot.empty() && char_similarity(rep, text) < merge_similarity_threshold) {
      flush();
    }
    if (ballot.empty()) current.start_ms = e.detection.time_ms;
    current.end_ms = e.detection.time_ms;
    current.frames.push_back(FrameText{e.detection.time_ms, e.detection.text});
    ballot.add(e.detection.text, e.detection.conf);
    rep = utf8_decode(ballot.winner());
  }
  flush();
  return out;
}

TrackVerdict classify_track(const TextTrack& track,
                            const TrackTextClassifier& classifier,
                            double keep_threshold) {
  std::vector<std::string> texts;
  texts.reserve(track.entries.size());
  for (const TrackEntry& e : track.entries) texts.push_back(e.detection.text);
  const double score = classifier(texts);
  return score < keep_threshold ? TrackVerdict::kDrop : TrackVerdict::kKeep;
}

FrameSize resolve_frame_size(const OcrVideo& video, const ExtractorParams& params) {
  FrameSize size{static_cast<double>(video.frame_width),
                 static_cast<double>(video.frame_height)};
  if (size.width <= 0.0) size.width = params.frame_width;
  if (size.height <= 0.0) size.height = params.frame_height;
  if (size.width <= 0.0 || size.height <= 0.0) {
    double max_x = 0.0, max_y = 0.0;
    for (const FrameGroup& g : video.frames) {
      for (const FrameDetection& d : g.detections) {
        max_x = std::max(max_x, d.quad.envelope().max_x);
        max_y = std::max(max_y, d.quad.envelope().max_y);
      }
    }
    if (size.width <= 0.0) size.width = std::max(max_x, 1.0);
    if (size.height <= 0.0) size.height = std::max(max_y, 1.0);
  }
  return size;
}

std::vector<TextTrack> extract_tracks(const OcrVideo& video,
                                      const TrackerParams& tracker_params,
                                      const ExtractorParams& params,
                                      const ScorerHooks& hooks) {
  params.validate();
  tracker_params.validate();
  const FrameSize size = resolve_frame_size(video, params);

  // Empty texts are policy, not shape: the parser keeps them, we drop them.
  std::vector<FrameGroup> frames;
  frames.reserve(video.frames.size());
  for (const FrameGroup& g : video.frames) {
    FrameGroup kept{g.frame_index, g.time_ms, {}};
    for (const FrameDetection& d : g.detections) {
      if (!strip(utf8_decode(d.text)).empty()) kept.detections.push_back(d);
    }
    frames.push_back(std::move(kept));
  }

  const DetectionScorer scorer =
      hooks.image_scorer ? hooks.image_scorer : DetectionScorer(default_image_score);
  frames = filter_detections(frames, scorer, size.width, size.height,
                             params.image_score_threshold);

  std::vector<TextTrack> tracks = run_tracker(frames, tracker_params);
  if (tracker_params.position_rule) {
    tracks = position_filter(std::move(tracks), size.height, tracker_params);
  }
  return tracks;
}

std::vector<SubtitleSegment> sort_and_clip(std::vector<SubtitleSegment> segments) {
  std::stable_sort(segments.begin(), segments.end(),
                   [](const SubtitleSegment& a, const SubtitleSegment& b) {
                     return std::tie(a.start_ms, a.end_ms) < std::tie(b.start_ms, b.end_ms);
                   });
  int64_t max_end = 0;
  bool first = true;
  for (SubtitleSegment& s : segments) {
    if (!first && s.start_ms < max_end) s.start_ms = max_end;
    if (s.end_ms < s.start_ms) s.end_ms = s.start_ms;
    max_end = first ? s.end_ms : std::max(max_end, s.end_ms);
    first = false;
  }
  return segments;
}

Timeline build_visual_timeline(const OcrVideo& video,
                               const TrackerParams& tracker_params,
                               const ExtractorParams& params,
                               const ScorerHooks& hooks) {
  const std::vector<TextTrack> tracks = extract_tracks(video, tracker_params, params, hooks);
  const TrackTextClassifier classifier = hooks.text_classifier
      ? hooks.text_classifier
      : make_default_text_classifier(params.min_track_frames);

  std::vector<SubtitleSegment> segments;
  for (const TextTrack& t : tracks) {
    if (classify_track(t, classifier, params.keep_threshold) == TrackVerdict::kDrop) continue;
    for (SubtitleSegment& s : merge_track_text(t, params.merge_similarity_threshold)) {
      segments.push_back(std::move(s));
    }
  }
  return Timeline{video.video_id, sort_and_clip(std::move(segments))};
}

std::vector<std::pair<size_t, size_t>> assign_weak_labels(
    std::span<const RecognizedText> recognized,
    std::span<const std::string> weak_transcripts, double match_threshold) {
  struct Scored {
    double sim;
    size_t weak;
    size_t rec;
  };
  std::vector<std::u32string> rec_cps;
  rec_cps.reserve(recognized.size());
  for (const RecognizedText& r : recognized) rec_cps.push_back(utf8_decode(r.text));

  std::vector<Scored> pairs;
  for (size_t w = 0; w < weak_transcripts.size(); ++w) {
    const std::u32string weak = utf8_decode(weak_transcripts[w]);
    for (size_t r = 0; r < recognized.size(); ++r) {
      const double sim = char_similarity(weak, rec_cps[r]);
      if (sim >= match_threshold) pairs.push_back(Scored{sim, w, r});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Scored& a, const Scored& b) {
    if (a.sim != b.sim) return a.sim > b.sim;
    return std::tie(a.weak, a.rec) < std::tie(b.weak, b.rec);
  });

  std::vector<char> weak_used(weak_transcripts.size(), 0), rec_used(recognized.size(), 0);
  std::vector<std::pair<size_t, size_t>> out;
  for (const Scored& p : pairs) {
    if (weak_used[p.weak] || rec_used[p.rec]) continue;
    weak_used[p.weak] = rec_used[p.rec] = 1;
    out.emplace_back(p.weak, p.rec);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace subfuse
