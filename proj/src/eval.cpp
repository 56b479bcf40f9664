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

#include "subfuse/eval.hpp"

#include <algorithm>
#include <cstdio>

#include "json_io.hpp"
#include "subfuse/error.hpp"
#include "subfuse/textsim.hpp"
#include "subfuse/utf8.hpp"

namespace subfuse {

double cer(std::string_view ref, std::string_view hyp) {
  const std::u32string r = strip(utf8_decode(ref));
  const std::u32string h = strip(utf8_decode(hyp));
  if (r.empty()) fail_validation("CER reference is empty");
  return static_cast<double>(edit_distance(r, h)) / static_cast<double>(r.size());
}

std::string timeline_text(const Timeline& timeline) {
  std::vector<const SubtitleSegment*> segs;
  for (const SubtitleSegment& s : timeline.segments) segs.push_back(&s);
  std::stable_sort(segs.begin(), segs.end(), [](const auto* a, const auto* b) {
    return a->start_ms < b->start_ms;
  });
  std::string out;
  for (const SubtitleSegment* s : segs) out += s->text;
  return out;
}

EvalReport eval_timelines(const std::map<std::string, Timeline>& refs,
                          const std::map<std::string, Timeline>& hyps,
                          Aggregation aggregation) {
  for (const auto& [id, tl] : hyps) {
    if (!refs.contains(id)) fail_validation("hypothesis video \"" + id + "\" has no reference");
  }
  EvalReport report;
  report.aggregation = aggregation;
  size_t total_edits = 0;
  size_t total_chars = 0;
  for (const auto& [id, ref_tl] : refs) {
    const std::u32string r = strip(utf8_decode(timeline_text(ref_tl)));
    if (r.empty()) fail_validation("reference for video \"" + id + "\" is empty");
    std::u32string h;
    if (auto it = hyps.find(id); it != hyps.end()) h = strip(utf8_decode(timeline_text(it->second)));
    VideoScore vs;
    vs.video_id = id;
    vs.edits = edit_distance(r, h);
    vs.ref_chars = r.size();
    vs.cer = static_cast<double>(vs.edits) / static_cast<double>(vs.ref_chars);
    total_edits += vs.edits;
    total_chars += vs.ref_chars;
    report.per_video.push_back(std::move(vs));
  }
  if (aggregation == Aggregation::kPooled) {
    report.aggregate_cer = total_chars == 0 ? 0.0
        : static_cast<double>(total_edits) / static_cast<double>(total_chars);
  } else {
    double sum = 0.0;
    for (const VideoScore& v : report.per_video) sum += v.cer;
    report.aggregate_cer = report.per_video.empty() ? 0.0 : sum / report.per_video.size();
  }
  return report;
}

std::string EvalReport::to_json() const {
  json_io::Json videos = json_io::Json::array();
  for (const VideoScore& v : per_video) {
    videos.push_back({{"video_id", v.video_id},
                      {"edits", v.edits},
                      {"ref_chars", v.ref_chars},
                      {"cer", v.cer}});
  }
  return json_io::dump({{"per_video", std::move(videos)},
                        {"aggregate_cer", aggregate_cer},
                        {"aggregation", aggregation == Aggregation::kPooled ? "pooled" : "macro"}});
}

std::string EvalReport::to_table() const {
  size_t width = 8;
  for (const VideoScore& v : per_video) width = std::max(width, v.video_id.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof(buf), "%-*s %8s %9s %8s\n", static_cast<int>(width), "video",
                "edits", "ref_chars", "cer");
  out += buf;
  for (const VideoScore& v : per_video) {
    std::snprintf(buf, sizeof(buf), "%-*s %8zu %9zu %8.4f\n", static_cast<int>(width),
                  v.video_id.c_str(), v.edits, v.ref_chars, v.cer);
    out += buf;
  }
  std::snprintf(buf, sizeof(buf), "%-*s %8s %9s %8.4f\n", static_cast<int>(width),
                aggregation == Aggregation::kPooled ? "pooled" : "macro", "", "", aggregate_cer);
  out += buf;
  return out;
}

}  // namespace subfuse
