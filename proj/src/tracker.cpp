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

#include "subfuse/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>
#include <tuple>

#include "subfuse/assignment.hpp"
#include "subfuse/error.hpp"

namespace subfuse {

void TrackerParams::validate() const {
  if (!(gate_cost >= 0.0 && gate_cost <= 1.0)) fail_validation("gate_cost must be in [0, 1]");
  if (max_gap_frames < 0) fail_validation("max_gap_frames must be >= 0");
  if (band_count < 2) fail_validation("band_count must be >= 2");
  if (!(min_band_fraction >= 0.0 && min_band_fraction <= 1.0)) {
    fail_validation("min_band_fraction must be in [0, 1]");
  }
}

double iou(const BoundingQuad& a, const BoundingQuad& b) {
  const Envelope ea = a.envelope();
  const Envelope eb = b.envelope();
  const double w = std::min(ea.max_x, eb.max_x) - std::max(ea.min_x, eb.min_x);
  const double h = std::min(ea.max_y, eb.max_y) - std::max(ea.min_y, eb.min_y);
  if (w <= 0.0 || h <= 0.0) return 0.0;
  const double inter = w * h;
  const double uni = ea.area() + eb.area() - inter;
  return uni > 0.0 ? std::clamp(inter / uni, 0.0, 1.0) : 0.0;
}

namespace {

// Total order on detections so that the tracker output does not depend on
// the order detections were listed within a frame.
bool canonical_less(const FrameDetection& a, const FrameDetection& b) {
  const Envelope ea = a.quad.envelope();
  const Envelope eb = b.quad.envelope();
  const auto ka = std::tie(ea.min_y, ea.min_x, ea.max_y, ea.max_x, a.text, a.conf);
  const auto kb = std::tie(eb.min_y, eb.min_x, eb.max_y, eb.max_x, b.text, b.conf);
  if (ka != kb) return ka < kb;
  const auto& pa = a.quad.points();
  const auto& pb = b.quad.points();
  for (size_t i = 0; i < 4; ++i) {
    if (pa[i].x != pb[i].x) return pa[i].x < pb[i].x;
    if (pa[i].y != pb[i].y) return pa[i].y < pb[i].y;
  }
  return false;
}

void close_track(TrackerState& state, size_t open_index) {
  TextTrack t = std::move(state.open[open_index]);
  t.state = TrackState::kClosed;
  state.closed.push_back(std::move(t));
  state.open.erase(state.open.begin() + static_cast<std::ptrdiff_t>(open_index));
}

}  // namespace

void track_step(TrackerState& state, int64_t frame_index,
                std::span<const FrameDetection> detections,
                const TrackerParams& params) {
  for (const FrameDetection& d : detections) {
    if (d.frame_index != frame_index) {
      fail_validation("frame_index " + std::to_string(frame_index) +
                      ": detection belongs to frame " + std::to_string(d.frame_index));
    }
  }
  for (const TextTrack& t : state.open) {
    if (t.last_frame() >= frame_index) {
      fail_validation("frame_index " + std::to_string(frame_index) +
                      ": not after track " + std::to_string(t.track_id) +
                      " (last frame " + std::to_string(t.last_frame()) + ")");
    }
  }

  // Tracks that already missed more than max_gap_frames frames are done.
  for (size_t i = state.open.size(); i-- > 0;) {
    const int64_t missed = frame_index - state.open[i].last_frame() - 1;
    if (missed > params.max_gap_frames) close_track(state, i);
  }

  std::vector<FrameDetection> dets(detections.begin(), detections.end());
  std::stable_sort(dets.begin(), dets.end(), canonical_less);

  std::vector<char> matched(dets.size(), 0);
  if (!state.open.empty() && !dets.empty()) {
    CostMatrix cost(state.open.size(), dets.size());
    for (size_t r = 0; r < state.open.size(); ++r) {
      const BoundingQuad& last = state.open[r].entries.back().detection.quad;
      for (size_t c = 0; c < dets.size(); ++c) cost(r, c) = 1.0 - iou(last, dets[c].quad);
    }
    const Assignment assignment = solve_assignment(cost);
    for (const auto& [r, c] : assignment.pairs) {
      if (cost(r, c) > params.gate_cost) continue;
      state.open[r].entries.push_back(TrackEntry{frame_index, dets[c], cost(r, c)});
      matched[c] = 1;
    }
  }
  for (size_t c = 0; c < dets.size(); ++c) {
    if (matched[c]) continue;
    TextTrack t;
    t.track_id = state.next_id++;
    t.entries.push_back(TrackEntry{frame_index, dets[c], 0.0});
    state.open.push_back(std::move(t));
  }
}

std::vector<TextTrack> run_tracker(std::span<const FrameGroup> frames,
                                   const TrackerParams& params) {
  params.validate();
  TrackerState state;
  for (const FrameGroup& g : frames) {
    track_step(state, g.frame_index, g.detections, params);
  }
  while (!state.open.empty()) close_track(state, state.open.size() - 1);
  std::vector<TextTrack> out = std::move(state.closed);
  std::sort(out.begin(), out.end(), [](const TextTrack& a, const TextTrack& b) {
    return a.track_id < b.track_id;
  });
  return out;
}

std::vector<TextTrack> position_filter(std::vector<TextTrack> tracks,
                                       double frame_height,
                                       const TrackerParams& params) {
  params.validate();
  if (!(frame_height > 0.0)) fail_validation("frame_height must be positive");
  if (tracks.empty()) return tracks;

  const double band_height = frame_height / params.band_count;
  auto band_of = [&](const FrameDetection& d) {
    const auto band = static_cast<int64_t>(std::floor(d.quad.envelope().center_y() / band_height));
    return std::clamp<int64_t>(band, 0, params.band_count - 1);
  };

  std::vector<size_t> histogram(static_cast<size_t>(params.band_count), 0);
  for (const TextTrack& t : tracks) {
    for (const TrackEntry& e : t.entries) ++histogram[static_cast<size_t>(band_of(e.detection))];
  }
  // Lowest band wins ties.
  const auto modal = static_cast<int64_t>(
      std::max_element(histogram.begin(), histogram.end()) - histogram.begin());

  std::vector<TextTrack> kept;
  for (TextTrack& t : tracks) {
    size_t near = 0;
    for (const TrackEntry& e : t.entries) {
      if (std::abs(band_of(e.detection) - modal) <= 1) ++near;
    }
    const double fraction = t.entries.empty() ? 0.0
        : static_cast<double>(near) / static_cast<double>(t.entries.size());
    if (fraction >= params.min_band_fraction) kept.push_back(std::move(t));
  }
  return kept;
}

}  // namespace subfuse
