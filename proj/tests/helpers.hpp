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
#include <string>
#include <vector>

#include "subfuse/model.hpp"
#include "subfuse/tracker.hpp"

namespace testing {

inline subfuse::FrameDetection det(int64_t frame, double x0, double y0, double x1, double y1,
                                   std::string text = "字幕", double conf = 0.9) {
  subfuse::FrameDetection d;
  d.frame_index = frame;
  d.time_ms = frame * 40;
  d.quad = subfuse::BoundingQuad::from_rect(x0, y0, x1, y1);
  d.text = std::move(text);
  d.conf = conf;
  return d;
}

// One track whose i-th entry carries texts[i], 100 ms apart.
inline subfuse::TextTrack track_of(const std::vector<std::string>& texts, double conf = 0.9) {
  subfuse::TextTrack t;
  for (size_t i = 0; i < texts.size(); ++i) {
    subfuse::FrameDetection d = det(static_cast<int64_t>(i), 100, 600, 500, 650, texts[i], conf);
    d.time_ms = static_cast<int64_t>(i) * 100;
    t.entries.push_back({d.frame_index, d, 0.0});
  }
  t.state = subfuse::TrackState::kClosed;
  return t;
}

inline subfuse::SubtitleSegment seg(int64_t start, int64_t end, std::string text) {
  subfuse::SubtitleSegment s;
  s.start_ms = start;
  s.end_ms = end;
  s.text = std::move(text);
  return s;
}

}  // namespace testing
