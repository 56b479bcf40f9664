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

#include <cstdint>
#include <span>
#include <vector>

#include "subfuse/model.hpp"

namespace subfuse {

struct TrackerParams {
  double gate_cost = 0.7;
  int max_gap_frames = 10;
  int band_count = 20;
  double min_band_fraction = 0.5;
  // Toggles the track-level position-frequency rule.
  bool position_rule = true;

  void validate() const;
};

enum class TrackState { kOpen, kClosed };

struct TrackEntry {
  int64_t frame_index = 0;
  FrameDetection detection;
  // Assignment cost at which this entry was linked (0 for the first one).
  double link_cost = 0.0;
};

struct TextTrack {
  int64_t track_id = 0;
  std::vector<TrackEntry> entries;
  TrackState state = TrackState::kOpen;

  int64_t last_frame() const { return entries.back().frame_index; }
};

// Working set threaded through track_step.
struct TrackerState {
  std::vector<TextTrack> open;
  std::vector<TextTrack> closed;
  int64_t next_id = 0;
};

// Intersection over union of the axis-aligned envelopes.
double iou(const BoundingQuad& a, const BoundingQuad& b);

// Links one frame's detections to the open tracks. Throws Error(kValidation)
// when a detection's frame_index differs from `frame_index` or when the
// frame does not come after every open track.
void track_step(TrackerState& state, int64_t frame_index,
                std::span<const FrameDetection> detections,
                const TrackerParams& params);

// Folds track_step over the frames; every returned track is closed and the
// result is ordered by track_id.
std::vector<TextTrack> run_tracker(std::span<const FrameGroup> frames,
                                   const TrackerParams& params);

// Keeps tracks whose detections mostly sit within one band of the modal
// vertical band.
std::vector<TextTrack> position_filter(std::vector<TextTrack> tracks,
                                       double frame_height,
                                       const TrackerParams& params);

}  // namespace subfuse
