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

#pragma once

// Visual subtitle extraction: detection pre-filter, track classification,
// frame-text merging and weak-label assignment.

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "subfuse/model.hpp"
#include "subfuse/tracker.hpp"

namespace subfuse {

struct ExtractorParams {
  double image_score_threshold = 0.05;
  double merge_similarity_threshold = 0.6;
  int min_track_frames = 3;
  double keep_threshold = 0.5;
  // Used when the OCR document carries no frame size; 0 means infer from
  // the detections' extent.
  int frame_width = 0;
  int frame_height = 0;

  void validate() const;
};

// Scores one detection in [0, 1]; higher means more subtitle-like.
using DetectionScorer =
    std::function<double(const FrameDetection&, double frame_w, double frame_h)>;
// Scores a track from its per-frame texts in [0, 1].
using TrackTextClassifier = std::function<double(std::span<const std::string>)>;

double default_image_score(const FrameDetection& d, double frame_w, double frame_h);
TrackTextClassifier make_default_text_classifier(int min_track_frames);

struct ScorerHooks {
  DetectionScorer image_scorer;          // default_image_score when empty
  TrackTextClassifier text_classifier;   // default rule when empty
};

std::vector<FrameGroup> filter_detections(std::span<const FrameGroup> frames,
                                          const DetectionScorer& scorer,
                                          double frame_w, double frame_h,
                                          double threshold);

// Most frequent text of a track; ties go to the higher mean confidence and
// then the earliest occurrence.
std::string majority_text(const TextTrack& track);

std::vector<SubtitleSegment> merge_track_text(const TextTrack& track,
                                              double merge_similarity_threshold);

enum class TrackVerdict { kKeep, kDrop };

TrackVerdict classify_track(const TextTrack& track,
                            const TrackTextClassifier& classifier,
                            double keep_threshold = 0.5);

struct FrameSize {
  double width = 0.0;
  double height = 0.0;
};

FrameSize resolve_frame_size(const OcrVideo& video, const ExtractorParams& params);

// Tracks kept after pre-filter, tracking and the position rule (the `track`
// stage of the pipeline).
std::vector<TextTrack> extract_tracks(const OcrVideo& video,
                                      const TrackerParams& tracker_params,
                                      const ExtractorParams& params,
                                      const ScorerHooks& hooks);

Timeline build_visual_timeline(const OcrVideo& video,
                               const TrackerParams& tracker_params,
                               const ExtractorParams& params,
                               const ScorerHooks& hooks = {});

// Sorts by start and clips each segment's start to the latest end seen so
// far, so the result never overlaps.
std::vector<SubtitleSegment> sort_and_clip(std::vector<SubtitleSegment> segments);

struct RecognizedText {
  std::string text;
  BoundingQuad quad;
};

// Greedy highest-similarity matching of weak transcripts onto recognized
// texts. Returns (weak index, recognized index) pairs ordered by weak index.
std::vector<std::pair<size_t, size_t>> assign_weak_labels(
    std::span<const RecognizedText> recognized,
    std::span<const std::string> weak_transcripts,
    double match_threshold = 0.9);

}  // namespace subfuse
