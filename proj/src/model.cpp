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

#include "subfuse/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "json_io.hpp"
#include "subfuse/error.hpp"
#include "subfuse/utf8.hpp"

namespace subfuse {

using json_io::Json;

BoundingQuad BoundingQuad::from_points(const std::array<Point, 4>& points) {
  for (const Point& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      fail_validation("quad coordinate is not finite");
    }
    if (p.x < 0.0 || p.y < 0.0) {
      fail_validation("quad coordinate is negative");
    }
  }
  BoundingQuad quad(points);
  const Envelope env = quad.envelope();
  if (!(env.width() > 0.0) || !(env.height() > 0.0)) {
    fail_validation("quad envelope has zero width or height");
  }
  return quad;
}

BoundingQuad BoundingQuad::from_rect(double x0, double y0, double x1,
                                     double y1) {
  return from_points({Point{x0, y0}, Point{x1, y0}, Point{x1, y1},
                      Point{x0, y1}});
}

Envelope BoundingQuad::envelope() const {
  Envelope env{points_[0].x, points_[0].y, points_[0].x, points_[0].y};
  for (const Point& p : points_) {
    env.min_x = std::min(env.min_x, p.x);
    env.min_y = std::min(env.min_y, p.y);
    env.max_x = std::max(env.max_x, p.x);
    env.max_y = std::max(env.max_y, p.y);
  }
  return env;
}

std::string_view to_string(SegmentSource source) {
  switch (source) {
    case SegmentSource::kVisual: return "visual";
    case SegmentSource::kAudioPad: return "audio_pad";
    case SegmentSource::kFused: return "fused";
  }
  return "visual";
}

SegmentSource segment_source_from_string(std::string_view name) {
  if (name == "visual") return SegmentSource::kVisual;
  if (name == "audio_pad") return SegmentSource::kAudioPad;
  if (name == "fused") return SegmentSource::kFused;
  fail_validation("unknown segment source \"" + std::string(name) + "\"");
}

namespace {

void check_text(const std::string& text, const std::string& where) {
  try {
    (void)utf8_decode(text);
  } catch (const Error&) {
    fail_validation(where + ": text is not valid UTF-8");
  }
}

BoundingQuad quad_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 4) {
    fail_validation(where + ": quad must hold exactly 4 points");
  }
  std::array<Point, 4> pts;
  for (size_t i = 0; i < 4; ++i) {
    const Json& p = j[i];
    if (!p.is_array() || p.size() != 2) {
      fail_validation(where + ": quad point must be an [x, y] pair");
    }
    pts[i] = Point{json_io::get_number(p[0], where), json_io::get_number(p[1], where)};
  }
  try {
    return BoundingQuad::from_points(pts);
  } catch (const Error& e) {
    fail_validation(where + ": " + e.what());
  }
}

Json quad_to_json(const BoundingQuad& quad) {
  Json pts = Json::array();
  for (const Point& p : quad.points()) pts.push_back(Json::array({p.x, p.y}));
  return pts;
}

OcrVideo ocr_from_json(const Json& doc) {
  const std::string where = "ocr document";
  OcrVideo video;
  video.video_id = json_io::get_string(doc, "video_id", where);
  if (doc.contains("frame_width")) {
    video.frame_width = static_cast<int>(json_io::get_int(doc, "frame_width", where));
  }
  if (doc.contains("frame_height")) {
    video.frame_height = static_cast<int>(json_io::get_int(doc, "frame_height", where));
  }
  if (video.frame_width < 0 || video.frame_height < 0) {
    fail_validation(where + ": frame dimensions must be non-negative");
  }
  const Json& frames = json_io::get_array(doc, "frames", where);
  video.frames.reserve(frames.size());
  for (size_t fi = 0; fi < frames.size(); ++fi) {
    const Json& f = frames[fi];
    std::string fwhere = "frames[" + std::to_string(fi) + "]";
    FrameGroup group;
    group.frame_index = json_io::get_int(f, "frame_index", fwhere);
    fwhere = "frame_index " + std::to_string(group.frame_index);
    group.time_ms = json_io::get_int(f, "time_ms", fwhere);
    if (group.frame_index < 0) fail_validation(fwhere + ": frame_index is negative");
    if (group.time_ms < 0) fail_validation(fwhere + ": time_ms is negative");
    const Json& dets = json_io::get_array(f, "detections", fwhere);
    for (size_t di = 0; di < dets.size(); ++di) {
      const std::string dwhere = fwhere + ": detection " + std::to_string(di);
      FrameDetection d;
      d.frame_index = group.frame_index;
      d.time_ms = group.time_ms;
      d.quad = quad_from_json(json_io::field(dets[di], "quad", dwhere), dwhere);
      d.text = json_io::get_string(dets[di], "text", dwhere);
      check_text(d.text, dwhere);
      d.conf = json_io::get_number(dets[di], "conf", dwhere);
      if (d.conf < 0.0 || d.conf > 1.0) {
        fail_validation(dwhere + ": conf outside [0, 1]");
      }
      group.detections.push_back(std::move(d));
    }
    video.frames.push_back(std::move(group));
  }
  std::stable_sort(video.frames.begin(), video.frames.end(),
                   [](const FrameGroup& a, const FrameGroup& b) {
                     return a.frame_index < b.frame_index;
                   });
  for (size_t i = 1; i < video.frames.size(); ++i) {
    const FrameGroup& prev = video.frames[i - 1];
    const FrameGroup& cur = video.frames[i];
    if (cur.frame_index == prev.frame_index) {
      fail_validation("frame_index " + std::to_string(cur.frame_index) +
                      ": duplicate frame");
    }
    if (cur.time_ms < prev.time_ms) {
      fail_validation("frame_index " + std::to_string(cur.frame_index) +
                      ": time_ms decreases relative to the previous frame");
    }
  }
  return video;
}

Json ocr_to_json(const OcrVideo& video) {
  Json doc;
  doc["video_id"] = video.video_id;
  if (video.frame_width > 0) doc["frame_width"] = video.frame_width;
  if (video.frame_height > 0) doc["frame_height"] = video.frame_height;
  Json frames = Json::array();
  for (const FrameGroup& g : video.frames) {
    Json dets = Json::array();
    for (const FrameDetection& d : g.detections) {
      dets.push_back({{"quad", quad_to_json(d.quad)}, {"text", d.text}, {"conf", d.conf}});
    }
    frames.push_back({{"frame_index", g.frame_index},
                      {"time_ms", g.time_ms},
                      {"detections", std::move(dets)}});
  }
  doc["frames"] = std::move(frames);
  return doc;
}

AsrTranscript asr_from_json(const Json& doc) {
  const std::string where = "asr document";
  AsrTranscript tr;
  tr.video_id = json_io::get_string(doc, "video_id", where);
  const Json& segs = json_io::get_array(doc, "segments", where);
  for (size_t i = 0; i < segs.size(); ++i) {
    const std::string swhere = "asr segment " + std::to_string(i);
    AsrSegment s;
    s.start_ms = json_io::get_int(segs[i], "start_ms", swhere);
    s.end_ms = json_io::get_int(segs[i], "end_ms", swhere);
    s.text = json_io::get_string(segs[i], "text", swhere);
    check_text(s.text, swhere);
    if (s.start_ms > s.end_ms) {
      fail_validation(swhere + ": start_ms " + std::to_string(s.start_ms) +
                      " is after end_ms " + std::to_string(s.end_ms));
    }
    if (strip(utf8_decode(s.text)).empty()) {
      fail_validation(swhere + ": text is empty");
    }
    if (segs[i].contains("conf") && !segs[i]["conf"].is_null()) {
      const double c = json_io::get_number(segs[i], "conf", swhere);
      if (c < 0.0 || c > 1.0) fail_validation(swhere + ": conf outside [0, 1]");
      s.conf = c;
    }
    tr.segments.push_back(std::move(s));
  }
  std::stable_sort(tr.segments.begin(), tr.segments.end(),
                   [](const AsrSegment& a, const AsrSegment& b) {
                     return a.start_ms < b.start_ms;
                   });
  return tr;
}

Json asr_to_json(const AsrTranscript& tr) {
  Json segs = Json::array();
  for (const AsrSegment& s : tr.segments) {
    Json j{{"start_ms", s.start_ms}, {"end_ms", s.end_ms}, {"text", s.text}};
    j["conf"] = s.conf ? Json(*s.conf) : Json(nullptr);
    segs.push_back(std::move(j));
  }
  return Json{{"video_id", tr.video_id}, {"segments", std::move(segs)}};
}

Timeline timeline_from_json(const Json& doc) {
  const std::string where = "timeline";
  Timeline tl;
  tl.video_id = json_io::get_string(doc, "video_id", where);
  const Json& segs = json_io::get_array(doc, "segments", where);
  for (size_t i = 0; i < segs.size(); ++i) {
    const std::string swhere = "segment " + std::to_string(i);
    const Json& js = segs[i];
    SubtitleSegment s;
    s.start_ms = json_io::get_int(js, "start_ms", swhere);
    s.end_ms = json_io::get_int(js, "end_ms", swhere);
    s.text = json_io::get_string(js, "text", swhere);
    check_text(s.text, swhere);
    if (js.contains("source")) {
      s.source = segment_source_from_string(json_io::get_string(js, "source", swhere));
    }
    if (js.contains("candidates")) {
      const Json& cands = json_io::get_array(js, "candidates", swhere);
      for (size_t c = 0; c < cands.size(); ++c) {
        const std::string cwhere = swhere + ": candidate " + std::to_string(c);
        Candidate cand;
        cand.text = json_io::get_string(cands[c], "text", cwhere);
        check_text(cand.text, cwhere);
        cand.support = static_cast<int>(json_io::get_int(cands[c], "support", cwhere));
        cand.mean_conf = json_io::get_number(cands[c], "mean_conf", cwhere);
        s.candidates.push_back(std::move(cand));
      }
    }
    if (js.contains("frames")) {
      const Json& frames = json_io::get_array(js, "frames", swhere);
      for (size_t f = 0; f < frames.size(); ++f) {
        const std::string fwhere = swhere + ": frame " + std::to_string(f);
        FrameText ft;
        ft.time_ms = json_io::get_int(frames[f], "time_ms", fwhere);
        ft.text = json_io::get_string(frames[f], "text", fwhere);
        check_text(ft.text, fwhere);
        s.frames.push_back(std::move(ft));
      }
    }
    tl.segments.push_back(std::move(s));
  }
  validate_timeline(tl);
  return tl;
}

Json timeline_to_json(const Timeline& tl) {
  Json segs = Json::array();
  for (const SubtitleSegment& s : tl.segments) {
    Json js{{"start_ms", s.start_ms},
            {"end_ms", s.end_ms},
            {"text", s.text},
            {"source", std::string(to_string(s.source))}};
    Json cands = Json::array();
    for (const Candidate& c : s.candidates) {
      cands.push_back({{"text", c.text}, {"support", c.support}, {"mean_conf", c.mean_conf}});
    }
    js["candidates"] = std::move(cands);
    if (!s.frames.empty()) {
      Json frames = Json::array();
      for (const FrameText& f : s.frames) {
        frames.push_back({{"time_ms", f.time_ms}, {"text", f.text}});
      }
      js["frames"] = std::move(frames);
    }
    segs.push_back(std::move(js));
  }
  return Json{{"video_id", tl.video_id}, {"segments", std::move(segs)}};
}

template <typename T, typename FromJson>
Batch<T> parse_batch(std::string_view document, FromJson from_json) {
  const Json doc = json_io::parse(document);
  Batch<T> batch;
  if (doc.is_array()) {
    batch.array_form = true;
    for (size_t i = 0; i < doc.size(); ++i) {
      try {
        batch.items.push_back(from_json(doc[i]));
      } catch (const Error& e) {
        throw Error(e.kind(), "video " + std::to_string(i) + ": " + e.what());
      }
    }
  } else {
    batch.items.push_back(from_json(doc));
  }
  return batch;
}

template <typename T, typename ToJson>
std::string write_batch(const Batch<T>& batch, ToJson to_json) {
  if (!batch.array_form && batch.items.size() == 1) {
    return json_io::dump(to_json(batch.items.front()));
  }
  Json arr = Json::array();
  for (const T& item : batch.items) arr.push_back(to_json(item));
  return json_io::dump(arr);
}

}  // namespace

OcrVideo parse_ocr_frames(std::string_view document) {
  return ocr_from_json(json_io::parse(document));
}

Batch<OcrVideo> parse_ocr_batch(std::string_view document) {
  return parse_batch<OcrVideo>(document, ocr_from_json);
}

AsrTranscript parse_asr_segments(std::string_view document) {
  return asr_from_json(json_io::parse(document));
}

Batch<AsrTranscript> parse_asr_batch(std::string_view document) {
  return parse_batch<AsrTranscript>(document, asr_from_json);
}

Timeline parse_timeline(std::string_view document) {
  return timeline_from_json(json_io::parse(document));
}

Batch<Timeline> parse_timeline_batch(std::string_view document) {
  return parse_batch<Timeline>(document, timeline_from_json);
}

std::string write_timeline(const Timeline& timeline) {
  return json_io::dump(timeline_to_json(timeline));
}

std::string write_timeline_batch(const Batch<Timeline>& batch) {
  return write_batch(batch, timeline_to_json);
}

std::string write_ocr_batch(const Batch<OcrVideo>& batch) {
  return write_batch(batch, ocr_to_json);
}

std::string write_asr_batch(const Batch<AsrTranscript>& batch) {
  return write_batch(batch, asr_to_json);
}

void validate_timeline(const Timeline& timeline) {
  int64_t prev_start = 0;
  int64_t max_end = 0;
  for (size_t i = 0; i < timeline.segments.size(); ++i) {
    const SubtitleSegment& s = timeline.segments[i];
    const std::string where = "segment " + std::to_string(i);
    if (s.start_ms < 0) fail_validation(where + ": start_ms is negative");
    if (s.start_ms > s.end_ms) fail_validation(where + ": start_ms is after end_ms");
    for (const Candidate& c : s.candidates) {
      if (c.support < 1) fail_validation(where + ": candidate support below 1");
      if (!(c.mean_conf >= 0.0 && c.mean_conf <= 1.0)) {
        fail_validation(where + ": candidate mean_conf outside [0, 1]");
      }
    }
    if (!s.candidates.empty() &&
        std::none_of(s.candidates.begin(), s.candidates.end(),
                     [&](const Candidate& c) { return c.text == s.text; })) {
      fail_validation(where + ": text is not one of the candidates");
    }
    if (i > 0) {
      if (s.start_ms < prev_start) fail_validation(where + ": segments not sorted by start_ms");
      if (s.start_ms < max_end) fail_validation(where + ": overlaps an earlier segment");
    }
    prev_start = s.start_ms;
    max_end = std::max(max_end, s.end_ms);
  }
}

std::string format_srt_time(int64_t ms) {
  if (ms < 0) ms = 0;
  const int64_t h = ms / 3'600'000;
  const int64_t m = (ms / 60'000) % 60;
  const int64_t s = (ms / 1000) % 60;
  const int64_t milli = ms % 1000;
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%02lld:%02lld:%02lld,%03lld",
                static_cast<long long>(h), static_cast<long long>(m),
                static_cast<long long>(s), static_cast<long long>(milli));
  return buf;
}

std::string write_srt(const Timeline& timeline) {
  std::string out;
  size_t index = 1;
  for (const SubtitleSegment& s : timeline.segments) {
    out += std::to_string(index++);
    out += '\n';
    out += format_srt_time(s.start_ms);
    out += " --> ";
    out += format_srt_time(s.end_ms);
    out += '\n';
    // CR characters would break LF-only framing.
    for (char c : s.text) {
      if (c != '\r') out += c;
    }
    out += "\n\n";
  }
  return out;
}

}  // namespace subfuse
