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

#include "subfuse/pipeline.hpp"

#include <atomic>
#include <exception>
#include <map>
#include <set>
#include <thread>

#include "json_io.hpp"
#include "subfuse/error.hpp"
#include "subfuse/extractor.hpp"

namespace subfuse {

using json_io::Json;

void parallel_for(size_t n, int threads, const std::function<void(size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  const size_t workers = std::min<size_t>(n, static_cast<size_t>(std::max(1, threads)));
  if (workers <= 1) {
    for (size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (size_t i = next++; i < n; i = next++) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<VideoTracks> track_batch(const Batch<OcrVideo>& ocr, const PipelineConfig& config) {
  config.validate();
  std::vector<VideoTracks> out(ocr.items.size());
  parallel_for(out.size(), config.threads, [&](size_t i) {
    out[i].video_id = ocr.items[i].video_id;
    out[i].tracks = extract_tracks(ocr.items[i], config.tracker, config.extractor, {});
  });
  return out;
}

std::string write_tracks_batch(const std::vector<VideoTracks>& tracks, bool array_form) {
  auto video_json = [](const VideoTracks& v) {
    Json arr = Json::array();
    for (const TextTrack& t : v.tracks) {
      Json entries = Json::array();
      for (const TrackEntry& e : t.entries) {
        Json quad = Json::array();
        for (const Point& p : e.detection.quad.points()) quad.push_back(Json::array({p.x, p.y}));
        entries.push_back({{"frame_index", e.frame_index},
                           {"time_ms", e.detection.time_ms},
                           {"quad", std::move(quad)},
                           {"text", e.detection.text},
                           {"conf", e.detection.conf},
                           {"link_cost", e.link_cost}});
      }
      arr.push_back({{"track_id", t.track_id},
                     {"state", t.state == TrackState::kOpen ? "open" : "closed"},
                     {"entries", std::move(entries)}});
    }
    return Json{{"video_id", v.video_id}, {"tracks", std::move(arr)}};
  };
  if (!array_form && tracks.size() == 1) return json_io::dump(video_json(tracks.front()));
  Json doc = Json::array();
  for (const VideoTracks& v : tracks) doc.push_back(video_json(v));
  return json_io::dump(doc);
}

Batch<Timeline> extract_batch(const Batch<OcrVideo>& ocr, const PipelineConfig& config) {
  config.validate();
  Batch<Timeline> out{std::vector<Timeline>(ocr.items.size()), ocr.array_form};
  parallel_for(ocr.items.size(), config.threads, [&](size_t i) {
    out.items[i] = build_visual_timeline(ocr.items[i], config.tracker, config.extractor);
  });
  return out;
}

FuseBatchResult fuse_batch(const Batch<Timeline>& visual, const Batch<AsrTranscript>& asr,
                           const PipelineConfig& config, const NGramModel* universal,
                           const NGramModel* domain, const SyllableTable& table) {
  config.validate();
  std::map<std::string, const AsrTranscript*> by_id;
  for (const AsrTranscript& t : asr.items) {
    if (!by_id.emplace(t.video_id, &t).second) {
      fail_validation("duplicate video_id \"" + t.video_id + "\" in transcripts");
    }
  }
  std::set<std::string> seen;
  for (const Timeline& t : visual.items) {
    if (!seen.insert(t.video_id).second) {
      fail_validation("duplicate video_id \"" + t.video_id + "\" in timelines");
    }
  }
  const DualLm lms(universal, domain, config.dual_lm);
  FuseBatchResult out;
  out.timelines.array_form = visual.array_form;
  out.timelines.items.resize(visual.items.size());
  out.audits.resize(visual.items.size());
  parallel_for(visual.items.size(), config.threads, [&](size_t i) {
    const Timeline& v = visual.items[i];
    const auto it = by_id.find(v.video_id);
    const std::vector<AsrSegment> none;
    const std::vector<AsrSegment>& segs = it == by_id.end() ? none : it->second->segments;
    FusionResult r = fuse(v, segs, lms, table, config.fusion);
    out.timelines.items[i] = std::move(r.timeline);
    out.audits[i] = std::move(r.audit);
  });
  return out;
}

std::vector<std::vector<Hypothesis>> decode_batch(const std::vector<EmissionMatrix>& emissions,
                                                  const PipelineConfig& config,
                                                  const NGramModel* universal,
                                                  const NGramModel* domain) {
  config.validate();
  const DualLm lms(universal, domain, config.dual_lm);
  const NGramModel* rescore_model = domain != nullptr ? domain : universal;
  const Rescorer rescorer = rescore_model != nullptr ? make_lm_rescorer(*rescore_model) : Rescorer{};
  std::vector<std::vector<Hypothesis>> out(emissions.size());
  parallel_for(emissions.size(), config.threads, [&](size_t i) {
    auto hyps = prefix_beam_search(emissions[i], config.decode, lms.empty() ? nullptr : &lms);
    if (rescorer) hyps = rescore_nbest(std::move(hyps), rescorer, config.rescore_weight);
    out[i] = std::move(hyps);
  });
  return out;
}

std::string write_decode_batch(const std::vector<std::vector<Hypothesis>>& results,
                               bool array_form) {
  if (!array_form && results.size() == 1) return hypotheses_to_json(results.front());
  Json doc = Json::array();
  for (const auto& hyps : results) doc.push_back(Json::parse(hypotheses_to_json(hyps)));
  return json_io::dump(doc);
}

EvalReport eval_batch(const Batch<Timeline>& refs, const Batch<Timeline>& hyps,
                      Aggregation aggregation) {
  std::map<std::string, Timeline> r;
  std::map<std::string, Timeline> h;
  for (const Timeline& t : refs.items) {
    if (!r.emplace(t.video_id, t).second) fail_validation("duplicate video_id \"" + t.video_id + "\" in reference");
  }
  for (const Timeline& t : hyps.items) {
    if (!h.emplace(t.video_id, t).second) fail_validation("duplicate video_id \"" + t.video_id + "\" in hypothesis");
  }
  return eval_timelines(r, h, aggregation);
}

}  // namespace subfuse
