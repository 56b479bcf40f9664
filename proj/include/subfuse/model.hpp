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

// Core domain types plus ingestion and emission of the OCR frame, ASR
// segment and subtitle timeline documents.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace subfuse {

struct Point {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point&) const = default;
};

// Axis-aligned envelope of a quad.
struct Envelope {
  double min_x = 0.0;
  double min_y = 0.0;
  double max_x = 0.0;
  double max_y = 0.0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double area() const { return width() * height(); }
  double center_x() const { return 0.5 * (min_x + max_x); }
  double center_y() const { return 0.5 * (min_y + max_y); }
};

// Four corners in pixels: top-left, top-right, bottom-right, bottom-left.
// Coordinates are finite and non-negative and the envelope has positive
// extent on both axes.
class BoundingQuad {
 public:
  BoundingQuad() = default;

  // Throws Error(kValidation) when the invariants do not hold.
  static BoundingQuad from_points(const std::array<Point, 4>& points);
  // Convenience for axis-aligned rectangles.
  static BoundingQuad from_rect(double x0, double y0, double x1, double y1);

  const std::array<Point, 4>& points() const { return points_; }
  Envelope envelope() const;

  bool operator==(const BoundingQuad&) const = default;

 private:
  explicit BoundingQuad(const std::array<Point, 4>& points) : points_(points) {}

  std::array<Point, 4> points_{};
};

struct FrameDetection {
  int64_t frame_index = 0;
  int64_t time_ms = 0;
  BoundingQuad quad;
  std::string text;
  double conf = 0.0;

  bool operator==(const FrameDetection&) const = default;
};

// All detections of one frame.
struct FrameGroup {
  int64_t frame_index = 0;
  int64_t time_ms = 0;
  std::vector<FrameDetection> detections;

  bool operator==(const FrameGroup&) const = default;
};

struct OcrVideo {
  std::string video_id;
  // Optional frame dimensions; 0 when the document does not carry them.
  int frame_width = 0;
  int frame_height = 0;
  std::vector<FrameGroup> frames;

  bool operator==(const OcrVideo&) const = default;
};

struct AsrSegment {
  int64_t start_ms = 0;
  int64_t end_ms = 0;
  std::string text;
  std::optional<double> conf;

  bool operator==(const AsrSegment&) const = default;
};

struct AsrTranscript {
  std::string video_id;
  std::vector<AsrSegment> segments;

  bool operator==(const AsrTranscript&) const = default;
};

enum class SegmentSource { kVisual, kAudioPad, kFused };

std::string_view to_string(SegmentSource source);
SegmentSource segment_source_from_string(std::string_view name);

struct Candidate {
  std::string text;
  int support = 1;
  double mean_conf = 0.0;

  bool operator==(const Candidate&) const = default;
};

// One per-frame observation backing a visual segment.
struct FrameText {
  int64_t time_ms = 0;
  std::string text;

  bool operator==(const FrameText&) const = default;
};

struct SubtitleSegment {
  int64_t start_ms = 0;
  int64_t end_ms = 0;
  std::string text;
  SegmentSource source = SegmentSource::kVisual;
  std::vector<Candidate> candidates;
  std::vector<FrameText> frames;

  bool operator==(const SubtitleSegment&) const = default;
};

struct Timeline {
  std::string video_id;
  std::vector<SubtitleSegment> segments;

  bool operator==(const Timeline&) const = default;
};

// A document may hold one video (a JSON object) or several (a JSON array of
// such objects). `array_form` remembers which so outputs can mirror inputs.
template <typename T>
struct Batch {
  std::vector<T> items;
  bool array_form = false;
};

OcrVideo parse_ocr_frames(std::string_view document);
Batch<OcrVideo> parse_ocr_batch(std::string_view document);

AsrTranscript parse_asr_segments(std::string_view document);
Batch<AsrTranscript> parse_asr_batch(std::string_view document);

Timeline parse_timeline(std::string_view document);
Batch<Timeline> parse_timeline_batch(std::string_view document);

std::string write_timeline(const Timeline& timeline);
std::string write_timeline_batch(const Batch<Timeline>& batch);
std::string write_ocr_batch(const Batch<OcrVideo>& batch);
std::string write_asr_batch(const Batch<AsrTranscript>& batch);

// Throws Error(kValidation) naming the offending segment.
void validate_timeline(const Timeline& timeline);

std::string format_srt_time(int64_t ms);
std::string write_srt(const Timeline& timeline);

}  // namespace subfuse
